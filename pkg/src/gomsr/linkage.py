"""Linkage learning: normalized mutual information over gene positions and
UPGMA linkage trees, combined into the multi-tree family of subsets (FOS).

Symbol classes for the MI estimate are the integer codes from ``expr``: each
function is its own class, each variable index is its own class, and every
constant collapses into the single CONST class (frequency-based MI over raw
constant values would be meaningless).

All gene indices here are 0-based positions into the flat multi-tree
genotype; the debug dump prints them 1-based to match the documented
index mapping.
"""

from __future__ import annotations

import numpy as np

Subset = tuple[int, ...]


def estimate_mi(pop_codes: np.ndarray) -> np.ndarray:
    """Pairwise normalized MI matrix over gene positions.

    ``pop_codes`` is (population, positions). Normalization divides each
    pairwise MI by max(H(i), H(j)); positions with zero entropy get 0
    against everything. The diagonal is 0 by convention.
    """
    pop_codes = np.asarray(pop_codes)
    if pop_codes.ndim != 2 or pop_codes.shape[0] < 2:
        raise ValueError("MI estimation needs a 2-D population of size >= 2")
    P, m = pop_codes.shape

    ranks = np.empty((P, m), dtype=np.int64)
    n_classes = np.empty(m, dtype=np.int64)
    entropy = np.empty(m)
    for i in range(m):
        _, inv = np.unique(pop_codes[:, i], return_inverse=True)
        ranks[:, i] = inv
        k = int(inv.max()) + 1
        n_classes[i] = k
        p = np.bincount(inv, minlength=k) / P
        entropy[i] = float(-(p * np.log(p)).sum())

    nmi = np.zeros((m, m))
    for i in range(m):
        if n_classes[i] == 1:
            continue
        for j in range(i + 1, m):
            if n_classes[j] == 1:
                continue
            joint = ranks[:, i] * n_classes[j] + ranks[:, j]
            pj = np.bincount(joint, minlength=n_classes[i] * n_classes[j]) / P
            pj = pj[pj > 0]
            h_joint = float(-(pj * np.log(pj)).sum())
            mi = entropy[i] + entropy[j] - h_joint
            value = mi / max(entropy[i], entropy[j])
            value = min(max(value, 0.0), 1.0)  # clip float noise
            nmi[i, j] = nmi[j, i] = value
    return nmi


def _upgma_merges(sim: np.ndarray, rng: np.random.Generator) -> list[list[int]]:
    """Merge order of average-linkage clustering on a similarity matrix.

    Each step joins the pair of active clusters with maximal average pairwise
    similarity (exact weighted update), ties broken uniformly at random.
    Returns the merged member lists in merge order; the last one is the
    full universe.
    """
    m = sim.shape[0]
    avg = sim.astype(np.float64).copy()
    np.fill_diagonal(avg, -np.inf)
    alive = np.ones(m, dtype=bool)
    sizes = np.ones(m)
    members: list[list[int]] = [[i] for i in range(m)]
    merges: list[list[int]] = []
    for _ in range(m - 1):
        masked = np.where(np.outer(alive, alive), avg, -np.inf)
        best = masked.max()
        cand = np.argwhere(masked == best)
        cand = cand[cand[:, 0] < cand[:, 1]]
        if len(cand) > 1:
            i, j = cand[rng.integers(len(cand))]
        else:
            i, j = cand[0]
        i, j = int(i), int(j)
        ni, nj = sizes[i], sizes[j]
        avg[i, :] = (ni * avg[i, :] + nj * avg[j, :]) / (ni + nj)
        avg[:, i] = avg[i, :]
        avg[i, i] = -np.inf
        alive[j] = False
        sizes[i] = ni + nj
        members[i] = sorted(members[i] + members[j])
        merges.append(members[i])
    return merges


def build_linkage_tree(
    sim: np.ndarray,
    indices,
    keep_root: bool,
    rng: np.random.Generator,
) -> list[Subset]:
    """Linkage-tree FOS over a gene-index universe.

    Starts from the singletons, adds every UPGMA merge, and includes the
    full-universe subset only when ``keep_root``. ``sim`` is the global
    similarity matrix; it is restricted to ``indices`` here, so per-tree
    trees reuse the population-wide estimate.
    """
    idx = np.asarray(list(indices), dtype=np.int64)
    m = idx.size
    if m == 0:
        raise ValueError("empty index universe")
    fos: list[Subset] = [(int(g),) for g in idx]
    if m == 1:
        return fos if keep_root else []
    merges = _upgma_merges(sim[np.ix_(idx, idx)], rng)
    for local in merges[:-1]:
        fos.append(tuple(sorted(int(idx[p]) for p in local)))
    if keep_root:
        fos.append(tuple(sorted(int(g) for g in idx)))
    return fos


def build_multitree_fos(
    pop_codes: np.ndarray,
    n_trees: int,
    length: int,
    rng: np.random.Generator,
) -> list[Subset]:
    """Union FOS for multi-trees, duplicates removed.

    Combines the linkage tree over the whole genotype (root dropped, so whole
    solutions are never cloned) with one linkage tree per tree, each keeping
    its root so entire trees can be exchanged.
    """
    pop_codes = np.asarray(pop_codes)
    total = n_trees * length
    if pop_codes.shape[1] != total:
        raise ValueError("population width does not match n_trees * length")
    if pop_codes.shape[0] >= 2:
        sim = estimate_mi(pop_codes)
    else:
        sim = np.zeros((total, total))  # degenerate one-member pool
    subsets = build_linkage_tree(sim, range(total), keep_root=False, rng=rng)
    for k in range(n_trees):
        subsets.extend(
            build_linkage_tree(
                sim, range(k * length, (k + 1) * length), keep_root=True, rng=rng
            )
        )
    return list(dict.fromkeys(subsets))


def dump_fos(subsets: list[Subset]) -> str:
    """One subset per line, space-separated 1-based indices (debug format)."""
    return "\n".join(" ".join(str(i + 1) for i in s) for s in subsets)
