"""Fixed-template expression trees encoded as flat symbol strings.

A template with ``height`` levels has 2**height - 1 node positions stored in
depth-first preorder (root first, then the whole left subtree, then the right
subtree), matching the position labels used throughout the search machinery.
Every position always carries a symbol; positions below a terminal are
introns and do not affect the tree's semantics.

Symbols are packed into two parallel arrays: an integer code per position and
a constant value per position (zero wherever the code is not CONST). Codes:

    0..3        binary functions (+, -, *, protected /)
    4           CONST (an ephemeral random constant; value in the float array)
    5 + j       variable j (0-based feature index)
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

PLUS, MINUS, TIMES, PDIV = 0, 1, 2, 3
FUNCTION_CODES = (PLUS, MINUS, TIMES, PDIV)
CONST = 4
VAR_BASE = 5

PDIV_EPS = 1e-6

_OP_GLYPH = {PLUS: "+", MINUS: "−", TIMES: "×", PDIV: "÷"}


def var_code(index: int) -> int:
    return VAR_BASE + index


@dataclass(frozen=True)
class TreeTemplate:
    """Shape of one expression tree: ``height`` levels, 2**height - 1 positions."""

    height: int

    def __post_init__(self):
        if self.height < 1:
            raise ValueError("template height must be >= 1 (1 gives a single node)")

    @property
    def length(self) -> int:
        return 2**self.height - 1

    @property
    def left(self) -> np.ndarray:
        """Preorder index of each position's left child (-1 at leaf positions)."""
        return _layout(self.height)[0]

    @property
    def right(self) -> np.ndarray:
        return _layout(self.height)[1]

    @property
    def leaf_positions(self) -> np.ndarray:
        """Positions on the last level, which can never hold functions."""
        return np.flatnonzero(_layout(self.height)[0] < 0)


@lru_cache(maxsize=None)
def _layout(height: int) -> tuple[np.ndarray, np.ndarray]:
    length = 2**height - 1
    left = np.full(length, -1, dtype=np.int64)
    right = np.full(length, -1, dtype=np.int64)

    def fill(pos: int, levels: int) -> None:
        if levels == 1:
            return
        child_size = 2 ** (levels - 1) - 1
        left[pos] = pos + 1
        right[pos] = pos + 1 + child_size
        fill(pos + 1, levels - 1)
        fill(pos + 1 + child_size, levels - 1)

    fill(0, height)
    left.setflags(write=False)
    right.setflags(write=False)
    return left, right


@dataclass(frozen=True)
class PrimitiveSet:
    """Alphabet for sampling: the four functions, the variables, optional ERCs.

    ``erc_range`` gives the uniform draw interval for constant values; None
    disables constants entirely.
    """

    n_variables: int
    erc_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.n_variables < 0:
            raise ValueError("n_variables must be >= 0")
        if self.n_variables == 0 and self.erc_range is None:
            raise ValueError("need at least one terminal (a variable or ERCs)")
        if self.erc_range is not None and not (
            np.isfinite(self.erc_range[0]) and np.isfinite(self.erc_range[1])
        ):
            raise ValueError("erc_range must be finite")

    @property
    def terminal_codes(self) -> tuple[int, ...]:
        codes = tuple(VAR_BASE + j for j in range(self.n_variables))
        if self.erc_range is not None:
            codes = codes + (CONST,)
        return codes

    @property
    def all_codes(self) -> tuple[int, ...]:
        return FUNCTION_CODES + self.terminal_codes

    def draw_constant(self, rng: np.random.Generator) -> float:
        lo, hi = self.erc_range
        return float(rng.uniform(lo, hi))


def primitives_for(ds, use_erc: bool = True) -> PrimitiveSet:
    """Primitive set bound to a dataset; ERC values span the target range."""
    erc = (float(ds.targets.min()), float(ds.targets.max())) if use_erc else None
    return PrimitiveSet(n_variables=ds.n_features, erc_range=erc)


def sample_symbols(
    template: TreeTemplate, prims: PrimitiveSet, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Sample one random genotype: internal positions draw from the full
    alphabet, last-level positions from terminals only; every CONST draw
    takes a fresh value."""
    length = template.length
    codes = np.empty(length, dtype=np.int16)
    consts = np.zeros(length, dtype=np.float64)
    internal = set(range(length)) - set(template.leaf_positions.tolist())
    full = prims.all_codes
    terminals = prims.terminal_codes
    for pos in range(length):
        alphabet = full if pos in internal else terminals
        code = alphabet[rng.integers(len(alphabet))]
        codes[pos] = code
        if code == CONST:
            consts[pos] = prims.draw_constant(rng)
    return codes, consts


def evaluate(
    codes: np.ndarray,
    consts: np.ndarray,
    template: TreeTemplate,
    X: np.ndarray,
) -> np.ndarray:
    """Predictions of the expressed subtree, one value per record.

    A terminal at any position ends recursion there; its descendants are
    ignored. Protected division keeps every output finite:
    a / b -> sign(b) * a / max(|b|, 1e-6) with sign(0) = 1.
    """
    left, right = _layout(template.height)
    n = X.shape[0]

    def ev(pos: int) -> np.ndarray:
        code = codes[pos]
        if code == CONST:
            return np.full(n, consts[pos])
        if code >= VAR_BASE:
            return X[:, code - VAR_BASE]
        a = ev(left[pos])
        b = ev(right[pos])
        if code == PLUS:
            return a + b
        if code == MINUS:
            return a - b
        if code == TIMES:
            return a * b
        return protected_div(a, b)

    out = ev(0)
    if np.shares_memory(out, X):
        out = out.copy()
    return out


def protected_div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    sign = np.where(b < 0, -1.0, 1.0)
    return sign * a / np.maximum(np.abs(b), PDIV_EPS)


def expressed_mask(codes: np.ndarray, template: TreeTemplate) -> np.ndarray:
    """Boolean mask of positions reachable from the root."""
    left, right = _layout(template.height)
    mask = np.zeros(template.length, dtype=bool)
    stack = [0]
    while stack:
        pos = stack.pop()
        mask[pos] = True
        if codes[pos] < CONST:
            stack.append(left[pos])
            stack.append(right[pos])
    return mask


def to_infix(codes: np.ndarray, consts: np.ndarray, template: TreeTemplate) -> str:
    """Parenthesized infix of the expressed subtree only.

    Variables print as x1, x2, ...; constants with 6 significant digits.
    """
    left, right = _layout(template.height)

    def render(pos: int) -> str:
        code = codes[pos]
        if code == CONST:
            return format(consts[pos], ".6g")
        if code >= VAR_BASE:
            return f"x{code - VAR_BASE + 1}"
        return f"({render(left[pos])} {_OP_GLYPH[code]} {render(right[pos])})"

    return render(0)
