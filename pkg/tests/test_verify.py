from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polygcrd.experiments import (
    bitmead_blocks, param_k_matrix, param_k_unitary, planted_instance, rng_for,
)
from polygcrd.gcrd import extract_gcrd
from polygcrd.polymat import PolyMatrix, ShapeError, mul
from polygcrd.verify import (
    condition_at, cross_check, diagnostics, float_right_divide, rationalize, residual,
    root_poly_check, zero_conditioning,
)

from oracles import planted, random_rational, random_unitary


def test_residual_examples():
    P = PolyMatrix(np.random.default_rng(0).standard_normal((3, 4, 2)))
    assert residual(P, P, PolyMatrix.identity(2)) == 0.0
    res = extract_gcrd(bitmead_blocks())
    from polygcrd.polymat import vstack
    Pb, _ = vstack(bitmead_blocks())
    assert residual(Pb, res.N_r, res.G_c) <= 1e-13
    N = random_rational(np.random.default_rng(1), 4, 2, 1)
    G = random_rational(np.random.default_rng(2), 2, 3, 2)
    assert residual(mul(N, G), N, G) == 0.0
    Pf = mul(N, G).to_numeric()
    assert residual(Pf, N.to_numeric(), G.to_numeric()) <= 1e-13
    with pytest.raises(ShapeError):
        residual(Pf, G, N)


def test_zero_conditioning_examples():
    G = PolyMatrix([[[0.0]], [[1.0]]])
    assert zero_conditioning(G, [0.0]) == [0.0]
    assert zero_conditioning(PolyMatrix.identity(2), [0.3, 1 + 2j]) == [1.0, 1.0]


def test_zero_conditioning_planted_table1_recipe():
    inst = planted_instance(rng_for(0), 60, 30, 5, 1)
    res = extract_gcrd(inst.P, 1e4 * np.finfo(float).eps)
    assert all(k <= 1e-8 for k in zero_conditioning(res.G_c, inst.zeros))


def test_root_poly_examples():
    J = PolyMatrix([[[0.0, 1.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, 1.0]]])
    assert root_poly_check(J) == (0.0, 0.0)
    assert root_poly_check(PolyMatrix.identity(2))[0] == 1.0
    with pytest.raises(ShapeError):
        root_poly_check(PolyMatrix.identity(1))


def test_root_poly_param_k_100():
    res = extract_gcrd(param_k_matrix(100.0, param_k_unitary(0)))
    rho3, rho4 = root_poly_check(res.G_c)
    assert rho3 == 0.0 and rho4 <= 1e-12


def test_diagnostics_fields():
    P = param_k_matrix(10.0, param_k_unitary(1))
    res = extract_gcrd(P, split=True)
    rep = diagnostics(P, res)
    assert rep.rank == 2 and rep.rho1 <= 1e-12 and rep.rho2 < 1e3
    assert rep.zeros_source == "staircase" and len(rep.kappa_inv) == 2
    assert all(0.0 <= k <= 1.0 for k in rep.kappa_inv)
    assert condition_at(PolyMatrix.identity(3)) == 1.0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_diagnostic_invariances(seed):
    rng = np.random.default_rng(seed)
    G = PolyMatrix(rng.standard_normal((2, 3, 3)) + 1j * rng.standard_normal((2, 3, 3)))
    zeros = list(rng.standard_normal(3))
    U = random_unitary(rng, 3)
    UG = PolyMatrix(np.einsum("ij,djk->dik", U, G.coeffs))
    assert np.allclose(zero_conditioning(G, zeros), zero_conditioning(UG, zeros), atol=1e-12, rtol=0)
    c = complex(*rng.uniform(0.5, 3, 2))
    r3, r4 = root_poly_check(G)
    s3, s4 = root_poly_check(G.scale(c))
    assert s3 == pytest.approx(abs(c) * r3, rel=1e-12)
    assert s4 == pytest.approx(abs(c) * r4, rel=1e-12)
    assert root_poly_check(mul(G, PolyMatrix.identity(3, exact=False))) == (r3, r4)


def test_rationalize():
    P = PolyMatrix(np.array([[[0.5, 1 / 3]], [[2.0, -0.25]]]))
    R = rationalize(P)
    assert R.exact and R.entries()[0][1] == [Fraction(1, 3), Fraction(-1, 4)]
    Q = rationalize(PolyMatrix(np.array([[[0.5 + 0.25j]]])))
    assert not Q.exact and Q.coeffs[0, 0, 0] == 0.5 + 0.25j


def test_float_right_divide():
    rng = np.random.default_rng(4)
    N = PolyMatrix(rng.standard_normal((2, 3, 2)))
    G = PolyMatrix(rng.standard_normal((2, 2, 2)))
    Q, res = float_right_divide(mul(N, G), G)
    assert res <= 1e-12 and np.allclose(Q.coeffs, N.coeffs)
    Q, res = float_right_divide(PolyMatrix(np.array([[[1.0]]])), PolyMatrix(np.array([[[0.0]], [[1.0]]])))
    assert Q is None and res > 0.1


def test_cross_check_identity_and_bitmead():
    rep = cross_check([PolyMatrix.identity(2, exact=True)])
    assert rep.passed and rep.rank_exact == rep.rank_numeric == 2
    rep = cross_check(bitmead_blocks())
    assert rep.passed and rep.rank_exact == 2


@pytest.mark.parametrize("seed", range(4))
def test_cross_check_planted(seed):
    rng = np.random.default_rng(seed)
    P, _ = planted(rng, 4, 3, 2, deg_g=2, deg_q=2)
    rep = cross_check([P[:2, :], P[2:, :]])
    assert rep.passed, rep.notes
