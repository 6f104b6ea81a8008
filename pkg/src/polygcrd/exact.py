"""Exact normal forms and divisor computations over Q[lam].

Matrices are converted to a matrix-of-polynomials view (lists of Fraction
coefficient lists) for elimination; the scalar polynomial work is done by
:mod:`polygcrd.kernels`.  Unimodular witnesses are not canonical, only the
Hermite form ``H`` and Smith form ``S`` are.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .kernels import padd, pdivmod, pmul, pneg, pscale, psub
from .polymat import PolyMatrix, ShapeError, mul, trim, vstack

__all__ = [
    "HermiteResult", "SmithResult", "InvalidRequest", "NotDivisible",
    "hermite_form", "smith_form", "gcrd_exact", "right_divide", "divides",
    "is_unimodular", "poly_det", "column_compress", "normal_rank",
    "solve_rational",
]


class InvalidRequest(ValueError):
    """A request that cannot be satisfied, e.g. fewer GCRD rows than the rank."""

    def __init__(self, message: str, rank: int | None = None):
        super().__init__(message)
        self.rank = rank


class NotDivisible(ArithmeticError):
    """No polynomial quotient exists within the searched degree range."""


# -- matrix-of-polynomials helpers -------------------------------------------

def _entries(P: PolyMatrix) -> list[list[list]]:
    if not P.exact:
        raise TypeError("the exact engine needs rational (exact) input")
    return P.entries()


def _from_entries(M: list[list[list]], rows: int, cols: int) -> PolyMatrix:
    d = max((len(e) for row in M for e in row), default=1) - 1
    d = max(d, 0)
    c = np.full((d + 1, rows, cols), Fraction(0), dtype=object)
    for i, row in enumerate(M):
        for j, e in enumerate(row):
            for k, v in enumerate(e):
                c[k, i, j] = v
    return PolyMatrix(c, exact=True)


def _eye(n: int) -> list[list[list]]:
    return [[[Fraction(1)] if i == j else [] for j in range(n)] for i in range(n)]


def _deg(p: list) -> int:
    return len(p) - 1 if p else -1


class _Tracked:
    """Working matrix with unimodular witnesses kept in sync.

    Maintains ``P = U @ S @ V`` and ``Vinv = V**-1`` under elementary row and
    column operations applied to ``S``.
    """

    def __init__(self, P: PolyMatrix, track_cols: bool):
        self.m, self.n = P.shape
        self.S = _entries(P)
        self.U = _eye(self.m)
        self.track_cols = track_cols
        if track_cols:
            self.V = _eye(self.n)
            self.Vinv = _eye(self.n)

    # row k <- row k - q * row i
    def row_axpy(self, k, i, q):
        if not q:
            return
        S, U = self.S, self.U
        S[k] = [psub(a, pmul(q, b)) for a, b in zip(S[k], S[i])]
        for row in U:
            row[i] = padd(row[i], pmul(q, row[k]))

    def row_swap(self, i, k):
        if i == k:
            return
        S = self.S
        S[i], S[k] = S[k], S[i]
        for row in self.U:
            row[i], row[k] = row[k], row[i]

    # row i <- c * row i for a nonzero constant c
    def row_scale(self, i, c):
        self.S[i] = [pscale(a, c) for a in self.S[i]]
        inv = 1 / c
        for row in self.U:
            row[i] = pscale(row[i], inv)

    # column k <- column k - q * column i
    def col_axpy(self, k, i, q):
        if not q:
            return
        S = self.S
        for row in S:
            row[k] = psub(row[k], pmul(q, row[i]))
        V, Vinv = self.V, self.Vinv
        V[i] = [padd(a, pmul(q, b)) for a, b in zip(V[i], V[k])]
        for row in Vinv:
            row[k] = psub(row[k], pmul(q, row[i]))

    def col_swap(self, i, k):
        if i == k:
            return
        for row in self.S:
            row[i], row[k] = row[k], row[i]
        self.V[i], self.V[k] = self.V[k], self.V[i]
        for row in self.Vinv:
            row[i], row[k] = row[k], row[i]


# -- Hermite ----------------------------------------------------------------

@dataclass(frozen=True)
class HermiteResult:
    """``P = U @ H`` with ``U`` unimodular and ``H`` in Hermite normal form."""

    U: PolyMatrix
    H: PolyMatrix
    rank: int
    pivots: tuple[int, ...]

    @property
    def compact_H(self) -> PolyMatrix:
        return self.H[: self.rank, :]

    @property
    def compact_U(self) -> PolyMatrix:
        return self.U[:, : self.rank]


def hermite_form(P: PolyMatrix) -> HermiteResult:
    """Row Hermite normal form by column-ordered polynomial row reduction."""
    W = _Tracked(P, track_cols=False)
    S, m, n = W.S, W.m, W.n
    i = 0
    pivots = []
    for j in range(n):
        if i >= m:
            break
        while True:
            nz = [k for k in range(i, m) if S[k][j]]
            if not nz:
                break
            p = min(nz, key=lambda k: len(S[k][j]))
            W.row_swap(i, p)
            below = [k for k in range(i + 1, m) if S[k][j]]
            if not below:
                break
            for k in below:
                q, _ = pdivmod(S[k][j], S[i][j])
                W.row_axpy(k, i, q)
        if not S[i][j]:
            continue
        lc = S[i][j][-1]
        if lc != 1:
            W.row_scale(i, 1 / lc)
        for k in range(i):
            if S[k][j]:
                q, _ = pdivmod(S[k][j], S[i][j])
                W.row_axpy(k, i, q)
        pivots.append(j)
        i += 1
    return HermiteResult(
        U=_from_entries(W.U, m, m),
        H=trim(_from_entries(S, m, n)),
        rank=len(pivots),
        pivots=tuple(pivots),
    )


def normal_rank(P: PolyMatrix) -> int:
    return hermite_form(P).rank


# -- Smith ------------------------------------------------------------------

@dataclass(frozen=True)
class SmithResult:
    """``P = U @ S @ V`` with monic invariant factors on the diagonal of ``S``."""

    U: PolyMatrix
    S: PolyMatrix
    V: PolyMatrix
    rank: int
    V_inv: PolyMatrix

    def invariant_factors(self) -> list[list[Fraction]]:
        ent = self.S.entries()
        return [ent[i][i] for i in range(self.rank)]


def smith_form(P: PolyMatrix) -> SmithResult:
    """Smith normal form by gcd-driven row and column reduction."""
    W = _Tracked(P, track_cols=True)
    S, m, n = W.S, W.m, W.n
    t = 0
    while t < min(m, n):
        cand = [(len(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j]]
        if not cand:
            break
        _, i, j = min(cand)
        W.row_swap(t, i)
        W.col_swap(t, j)
        while True:
            dirty = False
            for k in range(t + 1, m):
                if S[k][t]:
                    q, rem = pdivmod(S[k][t], S[t][t])
                    W.row_axpy(k, t, q)
                    dirty = dirty or bool(rem)
            for k in range(t + 1, n):
                if S[t][k]:
                    q, rem = pdivmod(S[t][k], S[t][t])
                    W.col_axpy(k, t, q)
                    dirty = dirty or bool(rem)
            if dirty:
                cand = [(len(S[k][t]), k, t) for k in range(t + 1, m) if S[k][t]]
                cand += [(len(S[t][k]), t, k) for k in range(t + 1, n) if S[t][k]]
                _, i, j = min(cand)
                W.row_swap(t, i)
                W.col_swap(t, j)
                continue
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                 if S[i][j] and pdivmod(S[i][j], S[t][t])[1]),
                None,
            )
            if bad is None:
                break
            # pull the offending row into row t; the next pass leaves a remainder
            W.row_axpy(t, bad[0], [Fraction(-1)])
        lc = S[t][t][-1]
        if lc != 1:
            W.row_scale(t, 1 / lc)
        t += 1
    return SmithResult(
        U=_from_entries(W.U, m, m),
        S=trim(_from_entries(S, m, n)),
        V=_from_entries(W.V, n, n),
        rank=t,
        V_inv=_from_entries(W.Vinv, n, n),
    )


# -- determinants -----------------------------------------------------------

def poly_det(P: PolyMatrix) -> list[Fraction]:
    """Determinant by fraction-free (Bareiss) elimination over Q[lam]."""
    if P.rows != P.cols:
        raise ShapeError("determinant needs a square matrix")
    n = P.rows
    if n == 0:
        return [Fraction(1)]
    M = _entries(P)
    sign = 1
    prev = [Fraction(1)]
    for k in range(n - 1):
        if not M[k][k]:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return []
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = psub(pmul(M[k][k], M[i][j]), pmul(M[i][k], M[k][j]))
                q, rem = pdivmod(num, prev)
                if rem:
                    raise ArithmeticError("inexact Bareiss division")
                M[i][j] = q
            M[i][k] = []
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return det if sign > 0 else pneg(det)


def is_unimodular(P: PolyMatrix) -> bool:
    """True iff ``det P`` is a nonzero constant."""
    det = poly_det(P)
    return len(det) == 1


# -- exact rational linear solve --------------------------------------------

def solve_rational(A: list[list[Fraction]], B: list[list[Fraction]]):
    """Solve ``A X = B`` exactly; return ``X`` (free variables zero) or None."""
    rows = len(A)
    ncol = len(A[0]) if rows else 0
    nrhs = len(B[0]) if rows else 0
    M = [list(A[i]) + list(B[i]) for i in range(rows)]
    piv_cols = []
    r = 0
    for c in range(ncol):
        p = next((i for i in range(r, rows) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                Mr = M[r]
                M[i] = [x - f * y for x, y in zip(M[i], Mr)]
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if any(M[i][ncol:]):
            return None
    X = [[Fraction(0)] * nrhs for _ in range(ncol)]
    for i, c in enumerate(piv_cols):
        X[c] = M[i][ncol:]
    return X


# -- division ---------------------------------------------------------------

def _try_quotient(P: PolyMatrix, D: PolyMatrix, e: int) -> PolyMatrix | None:
    m, n = P.shape
    ell = D.rows
    dd, dp = D.degree, P.degree
    K = e + dd
    if K < dp:
        return None
    zero = Fraction(0)
    Pc, Dc = P.coeffs, D.coeffs
    # unknown X = [Q_0 ... Q_e]; equations X @ M = [P_0 ... P_K]; solved as M^T X^T = R^T
    nun = ell * (e + 1)
    neq = n * (K + 1)
    MT = [[zero] * nun for _ in range(neq)]
    for i in range(e + 1):
        for s in range(dd + 1):
            k = i + s
            blk = Dc[s]
            for a in range(ell):
                for b in range(n):
                    v = blk[a, b]
                    if v:
                        MT[k * n + b][i * ell + a] = v
    RT = [[zero] * m for _ in range(neq)]
    for k in range(min(dp, K) + 1):
        for b in range(n):
            for a in range(m):
                RT[k * n + b][a] = Pc[k, a, b]
    X = solve_rational(MT, RT)
    if X is None:
        return None
    q = np.full((e + 1, m, ell), zero, dtype=object)
    for i in range(e + 1):
        for a in range(ell):
            row = X[i * ell + a]
            for t in range(m):
                q[i, t, a] = row[t]
    return trim(PolyMatrix(q, exact=True))


def right_divide(P: PolyMatrix, D: PolyMatrix) -> PolyMatrix:
    """Return ``Q`` with ``P == Q @ D`` exactly, or raise :class:`NotDivisible`.

    Quotient degrees are searched upward from ``deg P - deg D`` to
    ``deg P + (rows(D) - 1) * deg D``, which bounds the quotient whenever
    ``D`` has full row rank.
    """
    if P.cols != D.cols:
        raise ShapeError("right division needs equal column counts")
    P, D = trim(P), trim(D)
    m, ell = P.rows, D.rows
    if ell == 0 or not np.any(D.coeffs != 0):
        if not np.any(P.coeffs != 0):
            return PolyMatrix(np.full((1, m, ell), Fraction(0), dtype=object), exact=True)
        raise NotDivisible("only the zero matrix is divisible by a zero divisor")
    dp, dd = P.degree, D.degree
    lo = max(0, dp - dd)
    hi = dp + max(0, ell - 1) * dd
    for e in range(lo, max(lo, hi) + 1):
        Q = _try_quotient(P, D, e)
        if Q is not None:
            return Q
    raise NotDivisible(f"no quotient of degree <= {max(lo, hi)}")


def divides(D: PolyMatrix, P: PolyMatrix) -> bool:
    """True iff ``D`` is a right divisor of ``P``."""
    try:
        right_divide(P, D)
    except NotDivisible:
        return False
    return True


# -- GCRD and column compression -------------------------------------------

def _compound(blocks: Sequence[PolyMatrix]) -> PolyMatrix:
    P, _ = vstack(blocks)
    if not P.exact:
        raise TypeError("gcrd_exact needs rational blocks")
    m, n = P.shape
    if m < n:
        pad = PolyMatrix(np.full((1, n - m, n), Fraction(0), dtype=object), exact=True)
        P, _ = vstack([P, pad])
    return P


def gcrd_exact(blocks: Sequence[PolyMatrix], rows: int | None = None) -> PolyMatrix:
    """GCRD from the nonzero rows of the Hermite form of the compound matrix.

    ``rows`` (default: the normal rank ``r``) pads the compact GCRD with zero
    rows; ``rows < r`` raises :class:`InvalidRequest` carrying ``r``.
    """
    P = _compound(blocks)
    n = P.cols
    h = hermite_form(P)
    r = h.rank
    if rows is None:
        if r == 0:
            raise InvalidRequest("normal rank is 0; the row count must be given", rank=0)
        rows = r
    if rows < r:
        raise InvalidRequest(f"a GCRD needs at least {r} rows, got {rows}", rank=r)
    c = np.full((h.H.degree + 1, rows, n), Fraction(0), dtype=object)
    c[:, :r, :] = h.H.coeffs[:, :r, :]
    return trim(PolyMatrix(c, exact=True))


def column_compress(P: PolyMatrix) -> tuple[PolyMatrix, PolyMatrix]:
    """Return ``(Q, V)`` with ``P @ V == [Q, 0]``, ``V`` unimodular, ``rank Q = r``."""
    s = smith_form(P)
    PV = mul(P, s.V_inv)
    return PV[:, : s.rank], s.V_inv
