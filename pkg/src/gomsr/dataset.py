"""Tabular regression data: CSV loading, deterministic splits, synthetic generators.

All randomness goes through ``numpy.random.default_rng`` (PCG64), so every
split and every generated dataset replays bit-exactly for a fixed seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


class DatasetError(ValueError):
    """Raised for unreadable, malformed, or inconsistent input data."""


@dataclass(frozen=True)
class Dataset:
    """Immutable feature matrix plus target vector.

    ``features`` has one row per record and one column per input variable;
    ``targets`` holds one value per record. Both must be finite.
    """

    features: np.ndarray
    targets: np.ndarray
    names: tuple[str, ...] | None = None
    target_name: str = "y"

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        targets = np.asarray(self.targets, dtype=np.float64)
        if features.ndim != 2:
            raise DatasetError("features must be a 2-D array")
        if targets.ndim != 1:
            raise DatasetError("targets must be a 1-D array")
        if features.shape[0] != targets.shape[0]:
            raise DatasetError(
                f"row mismatch: {features.shape[0]} feature rows vs "
                f"{targets.shape[0]} targets"
            )
        if features.shape[0] < 1:
            raise DatasetError("dataset needs at least one record")
        if not np.all(np.isfinite(features)) or not np.all(np.isfinite(targets)):
            raise DatasetError("dataset contains non-finite values")
        if self.names is not None and len(self.names) != features.shape[1]:
            raise DatasetError("names length does not match feature count")
        features.setflags(write=False)
        targets.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "targets", targets)

    @property
    def n_records(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def feature_names(self) -> tuple[str, ...]:
        if self.names is not None:
            return self.names
        return tuple(f"x{j + 1}" for j in range(self.n_features))


@dataclass(frozen=True)
class SplitSpec:
    """Train fraction in (0, 1) plus the shuffle seed."""

    train_fraction: float = 0.75
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise DatasetError("train_fraction must lie strictly between 0 and 1")


def load_csv(
    path,
    target_column: str | int,
    header: bool = True,
) -> Dataset:
    """Load a comma-separated file and pull out one column as the target.

    ``target_column`` may be a column name (requires ``header=True``) or a
    0-based column index. Cells must parse as finite reals; parse failures
    report the offending row and column.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise DatasetError(f"{path}: file is empty")

    names: list[str] | None = None
    if header:
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise DatasetError(f"{path}: no data rows after header")

    n_cols = len(rows[0])
    if isinstance(target_column, str):
        if names is None:
            raise DatasetError("target column given by name but file has no header")
        try:
            target_idx = names.index(target_column)
        except ValueError:
            raise DatasetError(
                f"{path}: target column {target_column!r} not found "
                f"(columns: {', '.join(names)})"
            ) from None
    else:
        target_idx = int(target_column)
        if not 0 <= target_idx < n_cols:
            raise DatasetError(f"{path}: target column index {target_idx} out of range")

    values = np.empty((len(rows), n_cols), dtype=np.float64)
    for i, row in enumerate(rows):
        if len(row) != n_cols:
            raise DatasetError(
                f"{path}: row {i + 1} has {len(row)} cells, expected {n_cols}"
            )
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise DatasetError(
                    f"{path}: cannot parse cell at row {i + 1}, column {j + 1}: {cell!r}"
                ) from None
            if not np.isfinite(v):
                raise DatasetError(
                    f"{path}: non-finite value at row {i + 1}, column {j + 1}"
                )
            values[i, j] = v

    keep = [j for j in range(n_cols) if j != target_idx]
    feat_names = tuple(names[j] for j in keep) if names is not None else None
    target_name = names[target_idx] if names is not None else "y"
    return Dataset(
        features=values[:, keep],
        targets=values[:, target_idx],
        names=feat_names,
        target_name=target_name,
    )


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Shuffle records uniformly and partition into train / test.

    Deterministic for a fixed spec; every source row lands in exactly one
    side. Both sides must end up non-empty.
    """
    n = ds.n_records
    n_train = int(round(spec.train_fraction * n))
    if not 1 <= n_train <= n - 1:
        raise DatasetError(
            f"train_fraction {spec.train_fraction} leaves an empty side for {n} records"
        )
    rng = np.random.default_rng(spec.seed)
    perm = rng.permutation(n)
    train_idx, test_idx = perm[:n_train], perm[n_train:]

    def take(idx):
        return Dataset(
            features=ds.features[idx],
            targets=ds.targets[idx],
            names=ds.names,
            target_name=ds.target_name,
        )

    return take(train_idx), take(test_idx)


def gen_multimodal(seed: int, sigma: float = 10.0) -> Dataset:
    """Two regimes over one input on [0, 10]: 100 quadratic rows then 40 linear.

    Targets are x^2 plus Gaussian noise for the first 100 records and 2x plus
    Gaussian noise for the last 40; ``sigma`` scales the noise (0 gives the
    exact curves).
    """
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 10.0, size=140)
    noise = rng.normal(0.0, sigma, size=140) if sigma > 0 else np.zeros(140)
    y = np.concatenate([x[:100] ** 2 + noise[:100], 2.0 * x[100:] + noise[100:]])
    return Dataset(features=x[:, None], targets=y, names=("x1",))


def gen_hidden_variable(seed: int, sigma: float = 0.5) -> Dataset:
    """Hidden driver H on [0, 10]; both features are noisy copies, target is H.

    100 records with two input variables x1 = H + noise and x2 = H + noise;
    H itself never appears as a feature.
    """
    rng = np.random.default_rng(seed)
    h = rng.uniform(0.0, 10.0, size=100)
    if sigma > 0:
        x1 = h + rng.normal(0.0, sigma, size=100)
        x2 = h + rng.normal(0.0, sigma, size=100)
    else:
        x1 = h.copy()
        x2 = h.copy()
    return Dataset(
        features=np.column_stack([x1, x2]), targets=h, names=("x1", "x2")
    )


GENERATORS = {
    "multimodal": gen_multimodal,
    "hidden": gen_hidden_variable,
}
