"""Concatenated multi-tree genotypes.

A multi-tree strings together n equal-template trees; gene indices simply
continue from one tree to the next, so a single flat code/constant array pair
covers the whole individual and linkage can span tree boundaries.

Per-tree prediction vectors, squared-error vectors, and the expressed-node
mask are cached and only recomputed for trees whose expressed region actually
changed; gene replacements confined to introns keep every cache valid.
"""

from __future__ import annotations

import numpy as np

from .dataset import Dataset
from .expr import (
    PrimitiveSet,
    TreeTemplate,
    evaluate,
    expressed_mask,
    sample_symbols,
    to_infix,
)

SEMANTIC_TOL = 1e-12


def gene_index_map(i: int, L: int, n_trees: int) -> tuple[int, int]:
    """Map a 1-based global gene index to (tree index, local position), 1-based.

    Index 1 is the first tree's root; index n*L is the last position of the
    last tree.
    """
    if not 1 <= i <= n_trees * L:
        raise IndexError(f"gene index {i} outside [1, {n_trees * L}]")
    return (i - 1) // L + 1, (i - 1) % L + 1


class MultiTree:
    """n fixed-template trees over one flat genotype, with semantics caches."""

    __slots__ = (
        "template",
        "n_trees",
        "codes",
        "consts",
        "_ds",
        "_sem",
        "_sq",
        "_mask",
        "_fresh",
        "_obj",
    )

    def __init__(
        self,
        template: TreeTemplate,
        n_trees: int,
        codes: np.ndarray,
        consts: np.ndarray,
    ):
        if n_trees < 1:
            raise ValueError("a multi-tree needs at least one tree")
        if codes.shape != (n_trees * template.length,):
            raise ValueError("genotype length does not match n_trees * template length")
        self.template = template
        self.n_trees = n_trees
        self.codes = codes
        self.consts = consts
        self._ds: Dataset | None = None
        self._sem: list[np.ndarray | None] = [None] * n_trees
        self._sq: list[np.ndarray | None] = [None] * n_trees
        self._mask: list[np.ndarray | None] = [None] * n_trees
        self._fresh = [False] * n_trees
        self._obj: np.ndarray | None = None

    @classmethod
    def random(
        cls,
        template: TreeTemplate,
        n_trees: int,
        prims: PrimitiveSet,
        rng: np.random.Generator,
    ) -> "MultiTree":
        parts = [sample_symbols(template, prims, rng) for _ in range(n_trees)]
        codes = np.concatenate([p[0] for p in parts])
        consts = np.concatenate([p[1] for p in parts])
        return cls(template, n_trees, codes, consts)

    @property
    def genotype_length(self) -> int:
        return self.n_trees * self.template.length

    def tree_codes(self, k: int) -> np.ndarray:
        L = self.template.length
        return self.codes[k * L : (k + 1) * L]

    def tree_consts(self, k: int) -> np.ndarray:
        L = self.template.length
        return self.consts[k * L : (k + 1) * L]

    def clone(self) -> "MultiTree":
        other = MultiTree(
            self.template, self.n_trees, self.codes.copy(), self.consts.copy()
        )
        other._ds = self._ds
        other._sem = list(self._sem)
        other._sq = list(self._sq)
        other._mask = list(self._mask)
        other._fresh = list(self._fresh)
        other._obj = None if self._obj is None else self._obj.copy()
        return other

    # -- caches ------------------------------------------------------------

    def _ensure(self, ds: Dataset) -> None:
        if self._ds is not ds:
            self._fresh = [False] * self.n_trees
            self._obj = None
            self._ds = ds
        for k in range(self.n_trees):
            if self._fresh[k]:
                continue
            codes = self.tree_codes(k)
            consts = self.tree_consts(k)
            sem = evaluate(codes, consts, self.template, ds.features)
            self._sem[k] = sem
            self._sq[k] = (sem - ds.targets) ** 2
            self._mask[k] = expressed_mask(codes, self.template)
            self._fresh[k] = True

    def semantics(self, ds: Dataset) -> list[np.ndarray]:
        """Per-tree prediction vectors on ``ds`` (cached until mutated)."""
        self._ensure(ds)
        return self._sem  # type: ignore[return-value]

    def squared_errors(self, ds: Dataset) -> list[np.ndarray]:
        self._ensure(ds)
        return self._sq  # type: ignore[return-value]

    # -- variation ---------------------------------------------------------

    def save_state(self, idx: np.ndarray) -> tuple:
        """Snapshot of genes at ``idx`` plus all caches, for exact undo."""
        return (
            idx,
            self.codes[idx].copy(),
            self.consts[idx].copy(),
            list(self._sem),
            list(self._sq),
            list(self._mask),
            list(self._fresh),
            self._obj,
        )

    def restore_state(self, saved: tuple) -> None:
        idx, codes, consts, sem, sq, mask, fresh, obj = saved
        self.codes[idx] = codes
        self.consts[idx] = consts
        self._sem = sem
        self._sq = sq
        self._mask = mask
        self._fresh = fresh
        self._obj = obj

    def replace_from(
        self,
        donor: "MultiTree",
        idx: np.ndarray,
        touched_trees: tuple[int, ...] | None = None,
    ) -> bool:
        """Copy the donor's genes at ``idx``; returns whether anything differed.

        Caches of a touched tree survive when every changed position is an
        intron of that tree.
        """
        my_codes = self.codes[idx]
        donor_codes = donor.codes[idx]
        diff = my_codes != donor_codes
        diff |= self.consts[idx] != donor.consts[idx]
        if not diff.any():
            return False
        changed = idx[diff]
        self.codes[changed] = donor.codes[changed]
        self.consts[changed] = donor.consts[changed]

        L = self.template.length
        if touched_trees is None:
            touched_trees = tuple(np.unique(changed // L).tolist())
        for k in touched_trees:
            lo = k * L
            local = changed[(changed >= lo) & (changed < lo + L)] - lo
            if local.size == 0:
                continue
            if self._fresh[k] and not self._mask[k][local].any():
                continue  # intron-only edit; semantics unchanged
            self._fresh[k] = False
            self._obj = None
        return True

    # -- presentation --------------------------------------------------------

    def infix(self) -> list[str]:
        return [
            to_infix(self.tree_codes(k), self.tree_consts(k), self.template)
            for k in range(self.n_trees)
        ]


def replace_genes(recipient: MultiTree, donor: MultiTree, subset) -> bool:
    """Gene replacement by 1-based global indices (the documented mapping)."""
    if (
        recipient.n_trees != donor.n_trees
        or recipient.template.length != donor.template.length
    ):
        raise ValueError("recipient and donor shapes differ")
    idx = np.asarray(sorted(subset), dtype=np.int64) - 1
    if idx.size and (idx[0] < 0 or idx[-1] >= recipient.genotype_length):
        raise IndexError("gene index outside the genotype")
    if idx.size == 0:
        return False
    return recipient.replace_from(donor, idx)


def semantically_equal(
    a: MultiTree, b: MultiTree, ds: Dataset, tol: float = SEMANTIC_TOL
) -> bool:
    """True iff every tree pair predicts identically on ``ds`` within ``tol``."""
    if a.n_trees != b.n_trees:
        raise ValueError("tree counts differ")
    sa = a.semantics(ds)
    sb = b.semantics(ds)
    return all(
        np.all(np.abs(va - vb) <= tol) for va, vb in zip(sa, sb)
    )
