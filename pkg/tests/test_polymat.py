from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polygcrd.polymat import (
    BlockSpec, PolyMatrix, ShapeError, evaluate, frob_norm, mul, normalize, residual_norm,
    trim, vstack,
)

from oracles import random_rational

BITMEAD = [
    [[1, 1], [1, 0], [5, 2], [-1, -1]],
    [[2, 0], [2, 2], [3, 4], [1, 1]],
    [[0, 1], [1, 1], [2, 0], [1, 1]],
    [[0, 0], [0, 0], [0, 1], [0, 0]],
]


def F(x):
    return Fraction(x)


def test_vstack_two_rows():
    a = PolyMatrix.from_entries([[[0, 1], [1]]])
    b = PolyMatrix.from_entries([[[0], [0, 1]]])
    P, spec = vstack([a, b])
    assert spec == BlockSpec((1, 1))
    assert P.degree == 1
    assert P == PolyMatrix([[[0, 1], [0, 0]], [[1, 0], [0, 1]]], exact=True)


def test_vstack_single_block():
    a = PolyMatrix.identity(2, exact=True)
    P, spec = vstack([a])
    assert P == a and spec.sizes == (2,)


def test_vstack_bitmead_rows():
    c = np.array(BITMEAD)
    rows = [trim(PolyMatrix(c[:, i:i + 1, :].astype(object), exact=True)) for i in range(4)]
    assert [r.degree for r in rows] == [2, 2, 3, 2]
    P, spec = vstack(rows)
    assert P.shape == (4, 2) and P.degree == 3
    assert P == PolyMatrix(c.astype(object), exact=True)
    assert [b for b in spec.split(P)] == rows


def test_vstack_shape_error():
    with pytest.raises(ShapeError):
        vstack([PolyMatrix.identity(2), PolyMatrix.identity(3)])
    with pytest.raises(ShapeError):
        vstack([])


def test_eval_examples():
    P = PolyMatrix(np.array(BITMEAD, dtype=float))
    assert np.array_equal(evaluate(P, 0), P.coeffs[0])
    assert np.array_equal(evaluate(PolyMatrix.identity(3), 2.5 + 1j), np.eye(3))
    v1 = evaluate(PolyMatrix(np.array(BITMEAD).astype(object), exact=True), Fraction(1))
    assert list(v1[0]) == [3, 2]
    assert np.array_equal(v1.astype(float), np.sum(BITMEAD, axis=0))


def test_mul_examples():
    B = random_rational(np.random.default_rng(1), 2, 3, 2)
    assert mul(PolyMatrix.identity(2, exact=True), B) == B
    a = PolyMatrix.from_entries([[[1, 1]]])
    b = PolyMatrix.from_entries([[[1, -1]]])
    assert mul(a, b) == PolyMatrix.from_entries([[[1, 0, -1]]])
    with pytest.raises(ShapeError):
        mul(B, B)


def test_mul_bitmead_factors():
    # N G = P with the printed G; N obtained by exact division in test_exact
    G = PolyMatrix([[[5, 2], [1, 0]], [[2, 3], [0, 1]]], exact=True)
    P = PolyMatrix(np.array(BITMEAD).astype(object), exact=True)
    from polygcrd.exact import right_divide
    N = right_divide(P, G)
    assert mul(N, G) == P


def test_norm_and_normalize():
    Z = PolyMatrix.zeros(2, 2)
    assert frob_norm(Z) == 0.0 and normalize(Z) is Z
    assert frob_norm(PolyMatrix.identity(2)) == pytest.approx(np.sqrt(2), abs=1e-15)
    P = PolyMatrix(np.random.default_rng(0).standard_normal((3, 2, 2)))
    N1 = normalize(P)
    assert frob_norm(N1) == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(normalize(N1).coeffs, N1.coeffs, atol=1e-15, rtol=0)


def test_trim_examples():
    c = np.full((3, 1, 1), Fraction(0), dtype=object)
    c[1, 0, 0] = Fraction(1)
    assert trim(PolyMatrix(c, exact=True)).degree == 1
    f = np.zeros((4, 2, 2))
    f[:3] = np.random.default_rng(0).standard_normal((3, 2, 2))
    f /= np.linalg.norm(f)
    f[3, 0, 0] = 1e-18
    assert trim(PolyMatrix(f), 1e-13).degree == 2
    B = PolyMatrix(np.array(BITMEAD).astype(object), exact=True)
    assert trim(B) == B and trim(B).degree == 3


def test_zero_matrix_is_degree_zero():
    Z = trim(PolyMatrix(np.zeros((3, 2, 2))))
    assert Z.degree == 0 and Z.shape == (2, 2)


def test_immutable():
    P = PolyMatrix.identity(2)
    with pytest.raises(ValueError):
        P.coeffs[0, 0, 0] = 3.0


def test_rejects_nonfinite():
    with pytest.raises(ValueError):
        PolyMatrix(np.array([[[np.nan]]]))


def test_residual_norm_exact_zero():
    rng = np.random.default_rng(5)
    N = random_rational(rng, 3, 2, 1)
    G = random_rational(rng, 2, 2, 2)
    assert residual_norm(mul(N, G), N, G) == 0.0


def test_residual_norm_float_matches_plain():
    rng = np.random.default_rng(6)
    N = PolyMatrix(rng.standard_normal((2, 3, 2)))
    G = PolyMatrix(rng.standard_normal((2, 2, 4)))
    P = PolyMatrix(rng.standard_normal((3, 3, 4)))
    assert residual_norm(P, N, G) == pytest.approx(frob_norm(P - mul(N, G)), rel=1e-12)


small = st.integers(min_value=0, max_value=10_000)


@settings(max_examples=40, deadline=None)
@given(small)
def test_mul_associative_and_distributive(seed):
    rng = np.random.default_rng(seed)
    A = random_rational(rng, 2, 3, 2)
    B = random_rational(rng, 3, 2, 1)
    B2 = random_rational(rng, 3, 2, 2)
    C = random_rational(rng, 2, 2, 1)
    assert mul(mul(A, B), C) == mul(A, mul(B, C))
    assert mul(A, B + B2) == mul(A, B) + mul(A, B2)


@settings(max_examples=40, deadline=None)
@given(small)
def test_eval_is_multiplicative(seed):
    rng = np.random.default_rng(seed)
    A = PolyMatrix(rng.standard_normal((3, 2, 3)) + 1j * rng.standard_normal((3, 2, 3)))
    B = PolyMatrix(rng.standard_normal((2, 3, 2)))
    x = complex(*rng.uniform(-1.5, 1.5, 2))
    lhs = evaluate(mul(A, B), x)
    rhs = evaluate(A, x) @ evaluate(B, x)
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * max(1.0, np.linalg.norm(rhs))


@settings(max_examples=30, deadline=None)
@given(small, st.lists(st.integers(1, 3), min_size=1, max_size=4))
def test_vstack_split_roundtrip(seed, sizes):
    rng = np.random.default_rng(seed)
    blocks = [random_rational(rng, s, 2, int(rng.integers(0, 3))) for s in sizes]
    P, spec = vstack(blocks)
    assert [trim(b) for b in spec.split(P)] == [trim(b) for b in blocks]


@settings(max_examples=30, deadline=None)
@given(small)
def test_normalize_idempotent(seed):
    P = PolyMatrix(np.random.default_rng(seed).standard_normal((3, 2, 3)) * 10.0 ** (seed % 7 - 3))
    N1 = normalize(P)
    assert np.max(np.abs(normalize(N1).coeffs - N1.coeffs)) <= 1e-15
