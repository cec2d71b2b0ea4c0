import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from afmm.kernels import (
    KERNELS, KernelId, OpCounts, afmm_case_a, afmm_case_b, multiply, multiply_ijk,
    multiply_ikj, multiply_strassen,
)
from afmm.matrix import DenseMatrix, DomainError, GeneratorSpec, Role, ShapeError, approx_equal, from_rows, generate, identity, zeros


# --- independent oracles: plain Python, no numpy, no shared code paths ------

def brute_product(x, y):
    n = len(x)
    return [[sum(x[i][k] * y[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def case_a_counts(x, y):
    n = len(x)
    adds = sum(abs(y[k][j]) for i in range(n) for k in range(n) if x[i][k] != 0 for j in range(n))
    skips = sum(1 for i in range(n) for k in range(n) if x[i][k] == 0)
    return adds, skips


def case_b_counts(x, y):
    n = len(x)
    adds = skips = 0
    for i in range(n):
        for k in range(n):
            if x[i][k] == 0:
                continue
            for j in range(n):
                if y[k][j] == 0:
                    skips += 1
                else:
                    adds += abs(x[i][k])
    return adds, skips


def strassen_reference(a, b, cutoff):
    """Depth-first textbook recursion on nested lists; returns (product, adds, mults)."""
    n = len(a)
    if n <= cutoff:
        return brute_product(a, b), n**3, n**3
    h = n // 2

    def q(m, r, c):
        return [row[c * h:(c + 1) * h] for row in m[r * h:(r + 1) * h]]

    def add(p, r, sign=1):
        return [[p[i][j] + sign * r[i][j] for j in range(h)] for i in range(h)]

    a11, a12, a21, a22 = q(a, 0, 0), q(a, 0, 1), q(a, 1, 0), q(a, 1, 1)
    b11, b12, b21, b22 = q(b, 0, 0), q(b, 0, 1), q(b, 1, 0), q(b, 1, 1)
    operands = [
        (add(a11, a22), add(b11, b22)), (add(a21, a22), b11), (a11, add(b12, b22, -1)),
        (a22, add(b21, b11, -1)), (add(a11, a12), b22), (add(a21, a11, -1), add(b11, b12)),
        (add(a12, a22, -1), add(b21, b22)),
    ]
    adds, mults, ms = 10 * h * h, 0, []
    for p, r in operands:
        prod, ad, mu = strassen_reference(p, r, cutoff)
        ms.append(prod)
        adds += ad
        mults += mu
    m1, m2, m3, m4, m5, m6, m7 = ms
    c11 = add(add(add(m1, m4), m5, -1), m7)
    c12 = add(m3, m5)
    c21 = add(m2, m4)
    c22 = add(add(add(m1, m2, -1), m3), m6)
    adds += 8 * h * h
    top = [r1 + r2 for r1, r2 in zip(c11, c12)]
    bottom = [r1 + r2 for r1, r2 in zip(c21, c22)]
    return top + bottom, adds, mults


def random_int_matrix(rng, n, lo=-9, hi=9):
    return DenseMatrix(rng.integers(lo, hi + 1, (n, n)))


X2 = from_rows([[2, 0], [0.5, 1]])
Y2 = from_rows([[3, 1], [0, 2]])
Z2 = [[6, 2], [1.5, 2.5]]


def test_hand_example_matches_brute_oracle():
    assert brute_product(X2.rows(), Y2.rows()) == Z2


@pytest.mark.parametrize("kernel", [k for k in KernelId if k is not KernelId.AFMM_B])
def test_hand_example_all_kernels(kernel):
    assert multiply(kernel, X2, Y2, cutoff=1).product.rows() == Z2


@pytest.mark.parametrize("kernel", list(KernelId))
def test_identity_left(kernel):
    y = generate(GeneratorSpec(5, 0.7, 4), 1)
    assert multiply(kernel, identity(5), y, cutoff=1).product == y


@pytest.mark.parametrize("fn", [multiply_ijk, multiply_ikj])
def test_classical_counts(fn):
    rng = np.random.default_rng(0)
    assert fn(random_int_matrix(rng, 8), random_int_matrix(rng, 8)).counts == OpCounts(512, 512, 0)
    assert fn(random_int_matrix(rng, 4), random_int_matrix(rng, 4)).counts == OpCounts(64, 64, 0)


def test_classical_counts_are_value_independent():
    a = generate(GeneratorSpec(16, 0.1, 2), 1)
    b = generate(GeneratorSpec(16, 0.9, 20), 2)
    for fn in (multiply_ijk, multiply_ikj):
        assert fn(a, a).counts == fn(b, b).counts == fn(zeros(16), b).counts


def test_ijk_against_brute_oracle_real():
    rng = np.random.default_rng(3)
    x, y = rng.normal(size=(7, 7)), rng.normal(size=(7, 7))
    got = multiply_ijk(DenseMatrix(x), DenseMatrix(y)).product
    assert approx_equal(got, DenseMatrix(brute_product(x.tolist(), y.tolist())), 1e-12)


def test_ikj_equals_ijk_exactly_on_integers():
    rng = np.random.default_rng(16)
    x, y = random_int_matrix(rng, 16, 0, 50), random_int_matrix(rng, 16, 0, 50)
    assert multiply_ikj(x, y).product == multiply_ijk(x, y).product
    assert multiply_ijk(x, y).product.rows() == brute_product(x.rows(), y.rows())


@pytest.mark.parametrize("fn", list(KERNELS.values()))
def test_dimension_mismatch(fn):
    with pytest.raises(ShapeError):
        fn(zeros(2), zeros(3))


# --- Strassen ----------------------------------------------------------------

def test_strassen_two_by_two_uses_seven_products():
    assert multiply_strassen(X2, Y2, cutoff=1).counts.multiplications == 7


@pytest.mark.parametrize("n", [1, 2, 4, 8, 16])
def test_strassen_power_of_two_count(n):
    x = generate(GeneratorSpec(n, 1.0, 3), n)
    assert multiply_strassen(x, x, cutoff=1).counts.multiplications == 7 ** int(np.log2(n))


def test_strassen_identity_4():
    y = DenseMatrix(np.random.default_rng(5).normal(size=(4, 4)))
    assert approx_equal(multiply_strassen(identity(4), y, cutoff=1).product, y, 1e-12)


def test_strassen_integer_8_cutoff_2():
    rng = np.random.default_rng(8)
    x, y = random_int_matrix(rng, 8), random_int_matrix(rng, 8)
    assert multiply_strassen(x, y, cutoff=2).product == multiply_ijk(x, y).product


@pytest.mark.parametrize("n,cutoff", [(1, 1), (2, 1), (3, 1), (4, 2), (5, 1), (8, 1), (8, 4), (7, 64), (12, 2)])
def test_strassen_against_depth_first_reference(n, cutoff):
    rng = np.random.default_rng(n * 100 + cutoff)
    x, y = random_int_matrix(rng, n), random_int_matrix(rng, n)
    size = 1 << (n - 1).bit_length()
    pad = lambda m: [row + [0] * (size - n) for row in m.rows()] + [[0] * size for _ in range(size - n)]
    ref, adds, mults = strassen_reference(pad(x), pad(y), cutoff)
    res = multiply_strassen(x, y, cutoff)
    assert res.product.rows() == [row[:n] for row in ref[:n]]
    assert res.counts == OpCounts(adds, mults, 0)


def test_strassen_rejects_bad_cutoff():
    with pytest.raises(DomainError):
        multiply_strassen(X2, Y2, cutoff=0)


# --- AFMM Case A ---------------------------------------------------------------

def test_case_a_hand_trace():
    res = afmm_case_a(X2, Y2)
    assert res.product.rows() == Z2
    assert res.counts == OpCounts(additions=10, multiplications=0, zero_skips=1)
    assert case_a_counts(X2.rows(), Y2.rows()) == (10, 1)


def test_case_a_zero_prefactor():
    y = generate(GeneratorSpec(6, 0.8, 5), 0)
    res = afmm_case_a(zeros(6), y)
    assert res.product == zeros(6)
    assert res.counts == OpCounts(0, 0, 36)


def test_case_a_identity():
    y = random_int_matrix(np.random.default_rng(1), 9)
    res = afmm_case_a(identity(9), y)
    assert res.product == y
    assert res.counts.additions == int(np.abs(y.array).sum())


def test_case_a_rejects_real_rep_factor():
    y = from_rows([[1, 2], [3, 2.5]])
    with pytest.raises(DomainError, match=r"Y\[1, 1\]"):
        afmm_case_a(X2, y)


def test_case_a_tolerates_near_integers():
    y = from_rows([[3 + 1e-11, 1], [0, 2 - 1e-11]])
    assert afmm_case_a(X2, y).product.rows() == Z2


def test_case_a_negative_rep_factors():
    x = from_rows([[1.5, -2], [0, 0.25]])
    y = from_rows([[-3, 2], [1, -4]])
    res = afmm_case_a(x, y)
    assert res.product.rows() == brute_product(x.rows(), y.rows())
    assert res.counts.additions == case_a_counts(x.rows(), y.rows())[0] == 3 + 2 + 1 + 4 + 1 + 4


# --- AFMM Case B ---------------------------------------------------------------

def test_case_b_hand_trace():
    x = from_rows([[3, 0], [1, 2]])
    y = from_rows([[0.5, 0], [1, 1]])
    res = afmm_case_b(x, y)
    assert res.product.rows() == [[1.5, 0], [2.5, 2]] == brute_product(x.rows(), y.rows())
    # 3 (x00 over y00) + 1 (x10 over y00) + 2 + 2 (x11 over row 1); zero bases y01 hit twice
    assert case_b_counts(x.rows(), y.rows()) == (8, 2)
    assert res.counts == OpCounts(additions=8, multiplications=0, zero_skips=2)


def test_case_b_zero_prefactor():
    y = generate(GeneratorSpec(5, 0.5, role=Role.REAL), 3)
    res = afmm_case_b(zeros(5), y)
    assert res.product == zeros(5)
    assert res.counts.additions == 0


def test_case_b_integer_oracle_16():
    rng = np.random.default_rng(160)
    x, y = random_int_matrix(rng, 16), random_int_matrix(rng, 16)
    assert afmm_case_b(x, y).product == multiply_ijk(x, y).product


def test_case_b_rejects_real_rep_factor():
    with pytest.raises(DomainError, match=r"X\[1, 0\]"):
        afmm_case_b(X2, Y2)


# --- properties ------------------------------------------------------------------

int_matrices = st.integers(1, 10).flatmap(
    lambda n: st.tuples(*(arrays(np.int64, (n, n), elements=st.integers(-40, 40)) for _ in range(2))))


@settings(max_examples=60, deadline=None)
@given(int_matrices, st.integers(1, 4))
def test_all_kernels_bit_identical_on_integers(pair, cutoff):
    x, y = (DenseMatrix(a) for a in pair)
    want = brute_product(x.rows(), y.rows())
    for kernel in KernelId:
        assert multiply(kernel, x, y, cutoff).product.rows() == want


@settings(max_examples=60, deadline=None)
@given(int_matrices)
def test_afmm_count_identities(pair):
    x, y = (DenseMatrix(a) for a in pair)
    a = afmm_case_a(x, y).counts
    b = afmm_case_b(x, y).counts
    assert (a.additions, a.zero_skips) == case_a_counts(x.rows(), y.rows())
    assert (b.additions, b.zero_skips) == case_b_counts(x.rows(), y.rows())
    assert a.multiplications == b.multiplications == 0
    n = x.n
    assert a.additions <= n**3 * max(1, int(np.abs(y.array).max()))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 24), d1=st.floats(0, 1), d2=st.floats(0, 1), mu=st.integers(1, 21), seed=st.integers(0, 2**32))
def test_case_a_tolerant_on_real_prefactor(n, d1, d2, mu, seed):
    x = generate(GeneratorSpec(n, d1, role=Role.REAL), seed)
    y = generate(GeneratorSpec(n, d2, mu), seed + 1)
    assert approx_equal(afmm_case_a(x, y).product, multiply_ijk(x, y).product, 1e-9)
    assert approx_equal(afmm_case_b(y, x).product, multiply_ijk(y, x).product, 1e-9)
