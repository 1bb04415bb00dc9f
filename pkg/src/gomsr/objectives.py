"""Error objectives over multi-trees (all minimized).

E sums the per-tree mean squared errors. The diversified errors reward trees
that cover different records: D1 averages the per-record minimum squared
error over all trees; D2 averages the same quantity over tree pairs. For two
trees the three-way relation collapses to D1 = D2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .multitree import MultiTree

OBJECTIVE_LABELS = ("E", "D1", "D2")


def mse(predictions: np.ndarray, targets: np.ndarray) -> float:
    """Mean squared error of one prediction vector."""
    predictions = np.asarray(predictions, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if predictions.shape != targets.shape or predictions.ndim != 1:
        raise ValueError(
            f"shape mismatch: predictions {predictions.shape} vs targets {targets.shape}"
        )
    if predictions.size == 0:
        raise ValueError("mse needs at least one record")
    return float(np.mean((predictions - targets) ** 2))


def per_tree_mse(mt: MultiTree, ds: Dataset) -> list[float]:
    return [float(sq.mean()) for sq in mt.squared_errors(ds)]


def error_E(mt: MultiTree, ds: Dataset) -> float:
    """Sum of the individual trees' MSEs."""
    return float(sum(per_tree_mse(mt, ds)))


def diversified_D1(mt: MultiTree, ds: Dataset) -> float:
    """Mean over records of the minimum squared error among all trees."""
    if mt.n_trees < 2:
        raise ValueError("diversified error needs at least two trees")
    sq = mt.squared_errors(ds)
    return float(np.minimum.reduce(sq).mean())


def diversified_D2(mt: MultiTree, ds: Dataset) -> float:
    """Average over tree pairs of the pairwise per-record min squared error mean."""
    n = mt.n_trees
    if n < 2:
        raise ValueError("diversified error needs at least two trees")
    sq = mt.squared_errors(ds)
    total = 0.0
    for i in range(n - 1):
        for l in range(i + 1, n):
            total += float(np.minimum(sq[i], sq[l]).mean())
    return 2.0 * total / (n * (n - 1))


@dataclass(frozen=True)
class ObjectiveSet:
    """Fixed, ordered objective vector definition for one run."""

    labels: tuple[str, ...] = ("E", "D1")

    def __post_init__(self):
        if len(self.labels) < 1:
            raise ValueError("at least one objective required")
        for lab in self.labels:
            if lab not in OBJECTIVE_LABELS:
                raise ValueError(f"unknown objective {lab!r}")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate objective labels")

    @property
    def n_objectives(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        return self.labels.index(label)

    def evaluate(self, mt: MultiTree, ds: Dataset) -> np.ndarray:
        """Objective vector for one multi-tree, cached on the individual."""
        if mt._obj is not None and mt._ds is ds:
            return mt._obj
        if mt.n_trees < 2 and any(lab in self.labels for lab in ("D1", "D2")):
            raise ValueError("diversified error needs at least two trees")
        sq = mt.squared_errors(ds)
        values = np.empty(len(self.labels))
        min_sq = None
        for i, lab in enumerate(self.labels):
            if lab == "E":
                values[i] = sum(float(s.mean()) for s in sq)
            elif lab == "D1":
                if min_sq is None:
                    min_sq = np.minimum.reduce(sq)
                values[i] = float(min_sq.mean())
            else:
                values[i] = diversified_D2(mt, ds)
        mt._obj = values
        return values
