"""Independent oracles and random generators shared by the tests.

sympy supplies determinants, gcds and rational-function elimination, so
nothing here goes through polygcrd's own kernels.
"""
from fractions import Fraction
from functools import reduce
from itertools import combinations

import numpy as np
import sympy as sp

from polygcrd.polymat import PolyMatrix

lam = sp.Symbol("lam")


def to_sympy(P: PolyMatrix) -> sp.Matrix:
    ent = P.entries()
    return sp.Matrix(P.rows, P.cols, lambda i, j: sum(
        (sp.Rational(c.numerator, c.denominator) * lam**k for k, c in enumerate(ent[i][j])),
        sp.Integer(0)))


def from_sympy(M: sp.Matrix) -> PolyMatrix:
    rows, cols = M.shape
    entries = []
    for i in range(rows):
        row = []
        for j in range(cols):
            p = sp.Poly(sp.expand(M[i, j]), lam)
            row.append([Fraction(int(c.p), int(c.q)) for c in reversed(p.all_coeffs())])
        entries.append(row)
    return PolyMatrix.from_entries(entries, exact=True)


def monic(expr):
    expr = sp.expand(expr)
    if expr == 0:
        return sp.Integer(0)
    p = sp.Poly(expr, lam)
    return sp.expand(p.monic().as_expr())


def minor_gcds(M: sp.Matrix) -> list:
    """``d_k`` = monic gcd of all ``k x k`` minors, until they all vanish."""
    out = []
    m, n = M.shape
    for k in range(1, min(m, n) + 1):
        minors = [M.extract(list(r), list(c)).det()
                  for r in combinations(range(m), k) for c in combinations(range(n), k)]
        minors = [sp.expand(x) for x in minors if sp.expand(x) != 0]
        if not minors:
            break
        out.append(monic(reduce(sp.gcd, minors)))
    return out


def invariant_factors_oracle(M: sp.Matrix) -> list:
    d = minor_gcds(M)
    prev = sp.Integer(1)
    out = []
    for dk in d:
        out.append(monic(sp.cancel(dk / prev)))
        prev = dk
    return out


def sym_det(P: PolyMatrix):
    return sp.expand(to_sympy(P).det())


def rank_oracle(P: PolyMatrix) -> int:
    return to_sympy(P).rank(simplify=True)


# -- random generators -------------------------------------------------------

def _rand_fraction(rng, dens=(1, 1, 1, 2, 3)):
    return Fraction(int(rng.integers(-4, 5)), int(rng.choice(dens)))


def random_rational(rng, m, n, d, density=0.8) -> PolyMatrix:
    c = np.empty((d + 1, m, n), dtype=object)
    for idx in np.ndindex(c.shape):
        c[idx] = _rand_fraction(rng) if rng.random() < density else Fraction(0)
    return PolyMatrix(c, exact=True)


def random_unimodular(rng, n, steps=4, deg=1) -> PolyMatrix:
    """Product of elementary operations with polynomial multipliers."""
    U = sp.eye(n)
    for _ in range(steps):
        if n == 1:
            U = U * sp.Rational(int(rng.integers(1, 4)), int(rng.integers(1, 3)))
            continue
        i, j = rng.choice(n, 2, replace=False)
        q = sum((sp.Integer(int(rng.integers(-2, 3))) * lam**k for k in range(deg + 1)), sp.Integer(0))
        E = sp.eye(n)
        E[int(i), int(j)] = q
        U = E * U
        if rng.random() < 0.3:
            U.row_swap(int(i), int(j))
    return from_sympy(U.applyfunc(sp.expand))


def planted(rng, m, n, r, deg_g=1, deg_q=1):
    """Blocks of ``Q D`` with ``D`` an ``r x n`` planted CRD; returns (P, D)."""
    D = random_rational(rng, r, n, deg_g, density=0.7)
    Q = random_rational(rng, m, r, deg_q, density=0.7)
    return Q @ D, D


# -- pencils with known Kronecker structure ------------------------------------

def kronecker_pencil(rng, right=(), finite=(), infinite=(), left=(), mix=True):
    """Block-diagonal pencil ``A - lam E`` with prescribed structure.

    ``right``/``left``: minimal indices; ``finite``: eigenvalues (simple);
    ``infinite``: sizes of Jordan blocks at infinity.  With ``mix`` the pencil
    is multiplied by random unitaries on both sides.
    """
    blocks = []
    for eps in right:
        A = np.hstack([np.eye(eps), np.zeros((eps, 1))])
        E = np.hstack([np.zeros((eps, 1)), np.eye(eps)])
        blocks.append((A, E))
    if len(finite):
        blocks.append((np.diag(np.asarray(finite, dtype=complex)), np.eye(len(finite))))
    for k in infinite:
        blocks.append((np.eye(k), np.eye(k, k=1)))
    for eta in left:
        A = np.vstack([np.eye(eta), np.zeros((1, eta))])
        E = np.vstack([np.zeros((1, eta)), np.eye(eta)])
        blocks.append((A, E))
    p = sum(b[0].shape[0] for b in blocks)
    q = sum(b[0].shape[1] for b in blocks)
    A = np.zeros((p, q), dtype=complex)
    E = np.zeros((p, q), dtype=complex)
    i = j = 0
    for a, e in blocks:
        A[i:i + a.shape[0], j:j + a.shape[1]] = a
        E[i:i + a.shape[0], j:j + a.shape[1]] = e
        i += a.shape[0]
        j += a.shape[1]
    if mix:
        U = random_unitary(rng, p)
        V = random_unitary(rng, q)
        A, E = U @ A @ V, U @ E @ V
    return A, E


def random_unitary(rng, n):
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(X)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def eig_match(computed, planted, rel=1e-8) -> bool:
    computed = list(np.asarray(computed, dtype=complex))
    if len(computed) != len(planted):
        return False
    for mu in planted:
        k = int(np.argmin([abs(c - mu) for c in computed]))
        if abs(computed[k] - mu) > rel * max(1.0, abs(mu)):
            return False
        computed.pop(k)
    return True
