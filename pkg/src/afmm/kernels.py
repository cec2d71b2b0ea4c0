"""Matrix multiplication kernels with exact operation counts.

Five kernels share one contract: take two n x n matrices, return the product
together with the number of scalar additions, multiplications and zero-skips
performed on element values. Loop-index arithmetic is never counted.

The AFMM kernels replace every multiplication with repeated addition: an
integer "rep-factor" element decides how many times a real "base" element is
added into the accumulator, and zero elements short-circuit whole loops. Their
cost therefore depends on the densities of both operands and on the mean of the
rep-factor values, whereas the classical kernels always cost n**3 of each.

All kernels accumulate ``Z[i, j]`` in increasing-k order, so integer-valued
inputs give bit-identical products across kernels.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numba
import numpy as np

from .matrix import INTEGER_TOL, DenseMatrix, DomainError, ShapeError

DEFAULT_STRASSEN_CUTOFF = 64


class KernelId(enum.Enum):
    IJK = "ijk"
    IKJ = "ikj"
    STRASSEN = "strassen"
    AFMM_A = "afmm-a"
    AFMM_B = "afmm-b"

    @property
    def is_afmm(self) -> bool:
        return self in (KernelId.AFMM_A, KernelId.AFMM_B)


@dataclass(frozen=True)
class OpCounts:
    additions: int = 0
    multiplications: int = 0
    zero_skips: int = 0

    def __add__(self, other: OpCounts) -> OpCounts:
        return OpCounts(
            self.additions + other.additions,
            self.multiplications + other.multiplications,
            self.zero_skips + other.zero_skips,
        )


@dataclass(frozen=True)
class MultiplyResult:
    product: DenseMatrix
    counts: OpCounts


# --- compiled loops -------------------------------------------------------
# No fastmath anywhere: reassociating the k-sums would break cross-kernel
# bit-identity for floats.

@numba.njit(cache=True)
def _ijk(x, y):
    n = x.shape[0]
    z = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc += x[i, k] * y[k, j]
            z[i, j] = acc
    return z


@numba.njit(cache=True)
def _ikj_into(x, y, z):
    n = x.shape[0]
    for i in range(n):
        for k in range(n):
            a = x[i, k]
            for j in range(n):
                z[i, j] += a * y[k, j]


@numba.njit(cache=True)
def _ikj_batched(xs, ys):
    out = np.zeros(xs.shape)
    for b in range(xs.shape[0]):
        _ikj_into(xs[b], ys[b], out[b])
    return out


@numba.njit(cache=True)
def _afmm_a(x, reps):
    n = x.shape[0]
    z = np.zeros((n, n))
    adds = 0
    skips = 0
    for i in range(n):
        for k in range(n):
            base = x[i, k]
            if base == 0.0:
                skips += 1
                continue
            for j in range(n):
                rep = reps[k, j]
                if rep == 0:
                    continue
                step = base
                if rep < 0:
                    step = -base
                    rep = -rep
                acc = z[i, j]
                for _ in range(rep):
                    acc += step
                z[i, j] = acc
                adds += rep
    return z, adds, skips


@numba.njit(cache=True)
def _afmm_b(reps, y):
    n = y.shape[0]
    z = np.zeros((n, n))
    adds = 0
    skips = 0
    for i in range(n):
        for k in range(n):
            rep = reps[i, k]
            if rep == 0:
                continue
            count = rep if rep > 0 else -rep
            for j in range(n):
                base = y[k, j]
                if base == 0.0:
                    skips += 1
                    continue
                step = base if rep > 0 else -base
                acc = z[i, j]
                for _ in range(count):
                    acc += step
                z[i, j] = acc
                adds += count
    return z, adds, skips


# --- public kernels -------------------------------------------------------

def _check_pair(x: DenseMatrix, y: DenseMatrix) -> int:
    if x.n != y.n:
        raise ShapeError(f"dimension mismatch: {x.n} vs {y.n}")
    return x.n


def _rep_factors(m: DenseMatrix, name: str) -> np.ndarray:
    a = m.array
    rounded = np.round(a)
    bad = np.abs(a - rounded) > INTEGER_TOL
    if bad.any():
        i, j = (int(v) for v in np.argwhere(bad)[0])
        raise DomainError(f"{name}[{i}, {j}] = {float(a[i, j])!r} is not integer-valued")
    return rounded.astype(np.int64)


def multiply_ijk(x: DenseMatrix, y: DenseMatrix) -> MultiplyResult:
    n = _check_pair(x, y)
    z = _ijk(x.array, y.array)
    return MultiplyResult(DenseMatrix(z), OpCounts(n**3, n**3, 0))


def multiply_ikj(x: DenseMatrix, y: DenseMatrix) -> MultiplyResult:
    n = _check_pair(x, y)
    z = np.zeros((n, n))
    _ikj_into(x.array, y.array, z)
    return MultiplyResult(DenseMatrix(z), OpCounts(n**3, n**3, 0))


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def _quadrants(m: np.ndarray):
    h = m.shape[1] // 2
    return m[:, :h, :h], m[:, :h, h:], m[:, h:, :h], m[:, h:, h:]


def multiply_strassen(x: DenseMatrix, y: DenseMatrix, cutoff: int = DEFAULT_STRASSEN_CUTOFF) -> MultiplyResult:
    """Strassen's seven-product recursion, evaluated breadth-first.

    Operands are zero-padded to the next power of two. Every level of the
    recursion is processed at once on a stack of equally sized blocks, so a
    tiny cutoff does not cost one Python call per leaf. Blocks of size
    ``<= cutoff`` are multiplied with the ikj kernel. Counts include the work
    done on padding.
    """
    n = _check_pair(x, y)
    if cutoff < 1:
        raise DomainError(f"cutoff must be >= 1, got {cutoff}")
    size = _next_pow2(n)
    a = np.zeros((1, size, size))
    b = np.zeros((1, size, size))
    a[0, :n, :n] = x.array
    b[0, :n, :n] = y.array

    adds = 0
    depth = 0
    while a.shape[1] > cutoff:
        batch, h = a.shape[0], a.shape[1] // 2
        a11, a12, a21, a22 = _quadrants(a)
        b11, b12, b21, b22 = _quadrants(b)
        a = np.stack([a11 + a22, a21 + a22, a11, a22, a11 + a12, a21 - a11, a12 - a22], axis=1)
        b = np.stack([b11 + b22, b11, b12 - b22, b21 - b11, b22, b11 + b12, b21 + b22], axis=1)
        a = a.reshape(batch * 7, h, h)
        b = b.reshape(batch * 7, h, h)
        adds += 10 * batch * h * h
        depth += 1

    leaves, m = a.shape[0], a.shape[1]
    c = _ikj_batched(a, b)
    adds += leaves * m**3
    mults = leaves * m**3

    for _ in range(depth):
        batch, h = c.shape[0] // 7, c.shape[1]
        p = c.reshape(batch, 7, h, h)
        m1, m2, m3, m4, m5, m6, m7 = (p[:, i] for i in range(7))
        up = np.empty((batch, 2 * h, 2 * h))
        up[:, :h, :h] = m1 + m4 - m5 + m7
        up[:, :h, h:] = m3 + m5
        up[:, h:, :h] = m2 + m4
        up[:, h:, h:] = m1 - m2 + m3 + m6
        adds += 8 * batch * h * h
        c = up

    return MultiplyResult(DenseMatrix(c[0, :n, :n]), OpCounts(adds, mults, 0))


def afmm_case_a(x: DenseMatrix, y: DenseMatrix) -> MultiplyResult:
    """AFMM with real pre-factor ``x`` and integer post-factor ``y``.

    Each nonzero ``x[i, k]`` is added ``|y[k, j]|`` times into ``z[i, j]``
    (negated for negative rep-factors). A zero base skips the whole j loop and
    is tallied in ``zero_skips``.
    """
    _check_pair(x, y)
    reps = _rep_factors(y, "Y")
    z, adds, skips = _afmm_a(x.array, reps)
    return MultiplyResult(DenseMatrix(z), OpCounts(int(adds), 0, int(skips)))


def afmm_case_b(x: DenseMatrix, y: DenseMatrix) -> MultiplyResult:
    """AFMM with integer pre-factor ``x`` and real post-factor ``y``.

    A zero rep-factor ``x[i, k]`` skips its j loop without being tallied; a
    zero base ``y[k, j]`` skips one j iteration and counts as a zero-skip.
    """
    _check_pair(x, y)
    reps = _rep_factors(x, "X")
    z, adds, skips = _afmm_b(reps, y.array)
    return MultiplyResult(DenseMatrix(z), OpCounts(int(adds), 0, int(skips)))


def multiply(kernel: KernelId | str, x: DenseMatrix, y: DenseMatrix,
             cutoff: int = DEFAULT_STRASSEN_CUTOFF) -> MultiplyResult:
    kernel = KernelId(kernel)
    if kernel is KernelId.STRASSEN:
        return multiply_strassen(x, y, cutoff)
    return KERNELS[kernel](x, y)


KERNELS = {
    KernelId.IJK: multiply_ijk,
    KernelId.IKJ: multiply_ikj,
    KernelId.STRASSEN: multiply_strassen,
    KernelId.AFMM_A: afmm_case_a,
    KernelId.AFMM_B: afmm_case_b,
}
