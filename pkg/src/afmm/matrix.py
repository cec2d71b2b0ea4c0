"""Dense square matrices, seeded generation and density/mean measurements.

Matrices are stored row-major as read-only ``float64`` arrays. Integer-valued
matrices are held in the same storage; values stay exact up to 2**53.

Random generation uses numpy's PCG64 bit generator seeded directly with the
64-bit seed, so a given ``(GeneratorSpec, seed)`` always yields the same matrix.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

INTEGER_TOL = 1e-9
SEED_MASK = (1 << 64) - 1


class ShapeError(ValueError):
    """Raised for ragged, non-square or mismatched matrices."""


class DomainError(ValueError):
    """Raised for values outside an operation's domain."""


class UndefinedMeanError(ValueError):
    pass


class DenseMatrix:
    """An immutable n x n matrix of finite scalars."""

    __slots__ = ("_a",)

    def __init__(self, array):
        a = np.array(array, dtype=np.float64, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeError(f"expected a square 2-D array, got shape {a.shape}")
        if a.shape[0] < 1:
            raise ShapeError("matrix dimension must be at least 1")
        if not np.all(np.isfinite(a)):
            bad = tuple(int(v) for v in np.argwhere(~np.isfinite(a))[0])
            raise DomainError(f"non-finite value at index {bad}")
        a.flags.writeable = False
        self._a = a

    @property
    def n(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        """Read-only (n, n) view of the elements."""
        return self._a

    @property
    def data(self) -> np.ndarray:
        """Row-major flat view: element (i, j) is ``data[i * n + j]``."""
        return self._a.reshape(-1)

    def rows(self) -> list[list[float]]:
        return self._a.tolist()

    def __getitem__(self, idx):
        return self._a[idx]

    def __eq__(self, other):
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self._a.shape == other._a.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self):
        return hash((self.n, self._a.tobytes()))

    def __repr__(self):
        return f"DenseMatrix(n={self.n}, rows={self.rows()!r})"

    def is_integer_valued(self, tol: float = INTEGER_TOL) -> bool:
        return bool(np.all(np.abs(self._a - np.round(self._a)) <= tol))


def zeros(n: int) -> DenseMatrix:
    if n < 1:
        raise ShapeError(f"invalid dimension {n}")
    return DenseMatrix(np.zeros((n, n)))


def identity(n: int) -> DenseMatrix:
    if n < 1:
        raise ShapeError(f"invalid dimension {n}")
    return DenseMatrix(np.eye(n))


def from_rows(rows: Sequence[Sequence[float]]) -> DenseMatrix:
    rows = [list(r) for r in rows]
    n = len(rows)
    if n == 0:
        raise ShapeError("no rows given")
    for i, r in enumerate(rows):
        if len(r) != n:
            raise ShapeError(f"row {i} has {len(r)} entries, expected {n}")
    return DenseMatrix(rows)


class Role(enum.Enum):
    REAL = "real"
    INTEGER = "integer"


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters for :func:`generate`.

    ``density`` is the per-entry probability of a nonzero. For the integer role
    nonzeros are uniform on ``{1, ..., 2*mu_prime - 1}`` (mean ``mu_prime``);
    a non-integer ``mu_prime >= 1`` uses the two neighbouring integers weighted
    to the same mean. ``distribution="constant"`` makes every nonzero equal to
    ``mu_prime``. The real role draws uniformly from ``[value_low, value_high]``.
    """

    n: int
    density: float
    mu_prime: float = 1.0
    role: Role = Role.INTEGER
    value_low: float = 0.5
    value_high: float = 1.5
    distribution: str = "uniform"

    def __post_init__(self):
        if self.n < 1:
            raise ShapeError(f"invalid dimension {self.n}")
        if not 0.0 <= self.density <= 1.0:
            raise DomainError(f"density must lie in [0, 1], got {self.density}")
        if not self.mu_prime > 0:
            raise DomainError(f"mu_prime must be positive, got {self.mu_prime}")
        if self.distribution not in ("uniform", "constant"):
            raise DomainError(f"unknown distribution {self.distribution!r}")
        if self.role is Role.INTEGER:
            if self.mu_prime < 1:
                raise DomainError("integer role needs mu_prime >= 1 (nonzeros are positive integers)")
            if self.distribution == "constant" and self.mu_prime != int(self.mu_prime):
                raise DomainError("constant integer distribution needs an integer mu_prime")
        elif self.distribution == "uniform" and not 0 < self.value_low <= self.value_high:
            raise DomainError("real role needs 0 < value_low <= value_high")


def _nonzero_values(spec: GeneratorSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    mu = spec.mu_prime
    if spec.distribution == "constant":
        return np.full(size, float(mu))
    if spec.role is Role.REAL:
        return rng.uniform(spec.value_low, spec.value_high, size)
    if mu == int(mu):
        m = int(mu)
        return rng.integers(1, 2 * m, size, endpoint=False).astype(np.float64)
    lo = math.floor(mu)
    upper = rng.random(size) < (mu - lo)
    return (lo + upper).astype(np.float64)


def generate(spec: GeneratorSpec, seed: int) -> DenseMatrix:
    rng = np.random.Generator(np.random.PCG64(int(seed) & SEED_MASK))
    n = spec.n
    mask = rng.random((n, n)) < spec.density
    out = np.zeros((n, n))
    out[mask] = _nonzero_values(spec, rng, int(mask.sum()))
    return DenseMatrix(out)


def density(m: DenseMatrix) -> float:
    return np.count_nonzero(m.array) / m.n ** 2


def nonzero_mean(m: DenseMatrix) -> float:
    nz = m.array[m.array != 0]
    if nz.size == 0:
        raise UndefinedMeanError("matrix has no nonzero entries")
    return float(nz.mean())


def overall_mean(m: DenseMatrix) -> float:
    return float(m.array.sum()) / m.n ** 2


def approx_equal(a: DenseMatrix, b: DenseMatrix, rel_tol: float) -> bool:
    if a.n != b.n:
        raise ShapeError(f"dimension mismatch: {a.n} vs {b.n}")
    x, y = a.array, b.array
    scale = np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))
    return bool(np.all(np.abs(x - y) <= rel_tol * scale))


# Text format: first line n, then n lines of n whitespace-separated values.

def parse_matrix_text(text: str) -> DenseMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ShapeError("empty matrix text")
    try:
        n = int(lines[0])
    except ValueError:
        raise ShapeError(f"first line must be the dimension, got {lines[0]!r}") from None
    body = lines[1:]
    if len(body) != n:
        raise ShapeError(f"expected {n} rows, found {len(body)}")
    return from_rows([[float(tok) for tok in ln.split()] for ln in body])


def format_matrix_text(m: DenseMatrix) -> str:
    out = [str(m.n)]
    for row in m.array:
        out.append(" ".join(_fmt(v) for v in row))
    return "\n".join(out) + "\n"


def _fmt(v: float) -> str:
    if v == int(v) and abs(v) < 2**53:
        return str(int(v))
    return repr(float(v))


def read_matrix(path: str | Path) -> DenseMatrix:
    return parse_matrix_text(Path(path).read_text())


def write_matrix(m: DenseMatrix, path: str | Path) -> None:
    Path(path).write_text(format_matrix_text(m))


def as_matrix(obj: DenseMatrix | Iterable) -> DenseMatrix:
    return obj if isinstance(obj, DenseMatrix) else DenseMatrix(obj)
