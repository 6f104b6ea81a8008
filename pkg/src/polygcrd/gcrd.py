"""Compact GCRD extraction by staircase reduction and state feedback.

Pipeline for a compound matrix ``P`` of degree ``d >= 1``:

1. normalize ``P`` to unit Frobenius norm;
2. stage-1 staircase of the companion pencil, giving unitary ``Q``, ``Z``
   and the trailing block ``[A33 - lam E33, A34 - lam E34; 0, C4]``;
3. complete ``[A33 - lam E33, A34 - lam E34]`` to a unimodular pencil with
   orthonormal constant rows ``[Z3 Z4]``;
4. the first ``r`` rows of the feedback matrix give ``G_c`` directly, and the
   completed trailing block realizes ``N_r``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .exact import InvalidRequest
from .pencil import (
    DEFAULT_TOL, Pencil, StaircaseForm, _rank_svd, check_tol, staircase_system,
)
from .polymat import (
    PolyMatrix, ShapeError, evaluate, frob_norm, residual_norm, trim, vstack, wide_residual,
)

__all__ = [
    "ConsistencyError", "RankDeficientError", "FeedbackEmbedding", "GcrdResult",
    "unimodular_embed", "build_feedback", "extract_gcrd", "refine_left_factor",
    "gcrd_characteristic_poly",
]

log = logging.getLogger(__name__)

# fixed off-axis points for the defensive rank probe of the embedding input
_PROBE_POINTS = (0.3717 + 0.5129j, -0.8123 + 0.2241j)

# Rank decisions inside the embedding are retried with a looser threshold
# when the factorization residual shows the completion was wrong.
EMBED_TOL_STEP = 10.0
EMBED_TOL_MAX = 1e-4
ACCEPT_FACTOR = 100.0


class ConsistencyError(RuntimeError):
    """Internal numerical consistency failure, usually a poorly chosen tolerance."""


class RankDeficientError(ValueError):
    """The polynomial matrix is singular where a regular one is needed."""


@dataclass
class FeedbackEmbedding:
    """Orthonormal rows ``W = [Z3 Z4]`` completing the part-3 pencil, and ``[I_r 0] F``."""

    W: np.ndarray
    F_row: np.ndarray
    part3_rows: int
    part3_cols: int
    c4_cols: int = 0

    @property
    def Z3(self) -> np.ndarray:
        return self.W[:, : self.part3_cols - self.c4_cols]

    @property
    def Z4(self) -> np.ndarray:
        return self.W[:, self.part3_cols - self.c4_cols:]


@dataclass
class GcrdResult:
    """Outcome of :func:`extract_gcrd`.

    ``G_c`` (``r x n``) and ``N_r`` (``m x r``) satisfy ``P ~= N_r @ G_c``;
    ``G`` and ``N`` are the ``rows``-sized versions (equal to the compact
    ones unless more rows were requested).
    """

    rank: int
    G_c: PolyMatrix
    N_r: PolyMatrix
    residual: float
    tol: float
    scale: float
    G: PolyMatrix
    N: PolyMatrix
    stage_ranks: list = field(default_factory=list)
    F_row: np.ndarray | None = None
    staircase: StaircaseForm | None = None
    embedding: FeedbackEmbedding | None = None
    embed_tol: float | None = None


# -- embedding -----------------------------------------------------------------

def unimodular_embed(K: Pencil, tol: float = DEFAULT_TOL, scale: float | None = None) -> np.ndarray:
    """Constant rows ``W`` with orthonormal rows making ``[K(lam); W]`` unimodular.

    ``K = A - lam E`` must have full row rank for every finite ``lam`` and a
    full-row-rank ``E``.  A column staircase peels off the right Kronecker
    blocks; each constant diagonal block is completed by the orthogonal
    complement of its row space.
    """
    tol = check_tol(tol)
    p, q = K.shape
    if p > q:
        raise ConsistencyError(f"cannot embed a {p}x{q} pencil with more rows than columns")
    if p == 0:
        return np.eye(q, dtype=np.result_type(K.A.dtype, np.float64))
    scale = K.norm() if scale is None else scale
    tol_abs = tol * scale
    for lam in _PROBE_POINTS:
        s = np.linalg.svd(K(lam), compute_uv=False)
        if s[-1] <= tol_abs * (1 + abs(lam)):
            raise ConsistencyError("part-3 pencil loses row rank at a probe point")

    dtype = np.result_type(K.A.dtype, K.E.dtype, np.float64)
    A = np.array(K.A, dtype=dtype)
    E = np.array(K.E, dtype=dtype)
    Zk = np.eye(q, dtype=dtype)
    W = np.zeros((q - p, q), dtype=dtype)
    r0 = c0 = w = 0
    while c0 < q:
        _, _, Vh, rk = _rank_svd(E[r0:, c0:], tol, scale)
        V = Vh.conj().T
        V = np.hstack([V[:, rk:], V[:, :rk]])
        A[:, c0:] = A[:, c0:] @ V
        E[:, c0:] = E[:, c0:] @ V
        Zk[:, c0:] = Zk[:, c0:] @ V
        nnull = (q - c0) - rk
        if nnull == 0:
            raise ConsistencyError("part-3 pencil has a regular (finite-zero) part")
        E[r0:, c0:c0 + nnull] = 0
        U, _, Xh, sk = _rank_svd(A[r0:, c0:c0 + nnull], tol, scale)
        Uh = U.conj().T
        A[r0:, :] = Uh @ A[r0:, :]
        E[r0:, :] = Uh @ E[r0:, :]
        A[r0 + sk:, c0:c0 + nnull] = 0
        extra = nnull - sk
        if w + extra > q - p:
            raise ConsistencyError("embedding would need more rows than the column excess")
        W[w:w + extra, c0:c0 + nnull] = Xh[sk:]
        w += extra
        r0 += sk
        c0 += nnull
    if r0 != p or w != q - p:
        raise ConsistencyError("part-3 pencil is not right invertible at this tolerance")
    return W @ Zk.conj().T


def build_feedback(form: StaircaseForm, W: np.ndarray, n: int) -> np.ndarray:
    """``[I_r 0] F = [0 ... 0 [I_r 0]] - [0 0 Z3 Z4] Z^H`` without ``Z1``."""
    r, w = W.shape
    N = form.Z.shape[0]
    if w != form.part3_cols + form.c4_cols:
        raise ConsistencyError("embedding width does not match the staircase partition")
    if r > n:
        raise ConsistencyError("rank exceeds the column count")
    padded = np.zeros((r, N), dtype=np.result_type(W.dtype, form.Z.dtype))
    padded[:, N - w:] = W
    F_row = -padded @ form.Z.conj().T
    F_row[:, N - n:N - n + r] += np.eye(r)
    return F_row


# -- factor extraction ------------------------------------------------------------

def _g_from_feedback(F_row: np.ndarray, d: int, n: int) -> PolyMatrix:
    r = F_row.shape[0]
    coeffs = np.empty((d + 1, r, n), dtype=F_row.dtype)
    for k in range(d + 1):
        # block j of [F_d ... F_1 F_0] multiplies lam**(d - j)
        j = d - k
        coeffs[k] = -F_row[:, j * n:(j + 1) * n]
    coeffs[0, :, :r] += np.eye(r)
    return PolyMatrix(coeffs)


def _n_from_system(form: StaircaseForm, W: np.ndarray, tol: float) -> PolyMatrix:
    rows, cols = form._ranges()
    A3 = form.A[rows["3"], cols["34"]]
    E3 = form.E[rows["3"], cols["34"]]
    C4 = form.A[rows["4"], cols["34"]]
    r = W.shape[0]
    k = A3.shape[1]
    Ahat = np.vstack([A3, W])
    Ehat = np.vstack([E3, np.zeros((r, k), dtype=E3.dtype)])
    Bhat = np.zeros((k, r), dtype=Ahat.dtype)
    Bhat[k - r:, :] = np.eye(r)
    lu = sla.lu_factor(Ahat)
    X = sla.lu_solve(lu, Bhat)
    terms = [C4 @ X]
    peak = np.linalg.norm(X)
    # Ahat^{-1} Ehat is nilpotent: the state sequence X reaches zero
    for _ in range(k):
        X = sla.lu_solve(lu, Ehat @ X)
        nx = np.linalg.norm(X)
        if nx <= tol * peak:
            break
        peak = max(peak, nx)
        terms.append(C4 @ X)
    return trim(PolyMatrix(np.stack(terms)), tol)


def refine_left_factor(P: PolyMatrix, N: PolyMatrix, G: PolyMatrix) -> PolyMatrix:
    """One step of iterative refinement of ``N`` in ``P ~= N G`` with ``G`` fixed.

    The residual is formed in extended precision; the correction solves the
    block-Toeplitz least-squares problem in working precision.  ``N`` is
    returned unchanged if the step does not lower the residual.
    """
    Pc, Nc, Gc = P.coeffs, N.coeffs, G.coeffs
    e, dg = Nc.shape[0] - 1, Gc.shape[0] - 1
    m, r = Nc.shape[1:]
    n = Gc.shape[2]
    if r == 0:
        return N
    R = wide_residual(Pc, Nc, Gc)
    K = R.shape[0] - 1
    dtype = np.result_type(Nc.dtype, Gc.dtype)
    T = np.zeros((r * (e + 1), n * (K + 1)), dtype=dtype)
    for i in range(e + 1):
        for s in range(dg + 1):
            T[i * r:(i + 1) * r, (i + s) * n:(i + s + 1) * n] = Gc[s]
    Rm = np.concatenate(list(R.astype(dtype)), axis=1)
    dX = np.linalg.lstsq(T.T, Rm.T, rcond=None)[0].T
    cand = Nc + np.stack([dX[:, i * r:(i + 1) * r] for i in range(e + 1)])
    before = np.linalg.norm(R.ravel())
    after = np.linalg.norm(wide_residual(Pc, cand, Gc).ravel())
    return PolyMatrix(cand) if after < before else N


def _complete_columns(N0: np.ndarray, extra: int, rng: np.random.Generator) -> np.ndarray:
    m, r = N0.shape
    R = rng.standard_normal((m, extra))
    if np.iscomplexobj(N0):
        R = R + 1j * rng.standard_normal((m, extra))
    if m >= r + extra:
        Qf, _ = np.linalg.qr(np.hstack([N0, R]))
        return Qf[:, r:r + extra]
    return R / np.linalg.norm(R, axis=0)


def _as_compound(blocks) -> PolyMatrix:
    if isinstance(blocks, PolyMatrix):
        return blocks
    P, _ = vstack(list(blocks))
    return P


def _pad_rows(P: PolyMatrix) -> tuple[PolyMatrix, int]:
    m, n = P.shape
    if m >= n:
        return P, m
    c = np.zeros((P.degree + 1, n, n), dtype=P.coeffs.dtype)
    c[:, :m, :] = P.coeffs
    return PolyMatrix(c), m


def extract_gcrd(blocks: Sequence[PolyMatrix] | PolyMatrix, tol: float = DEFAULT_TOL,
                 rows: int | None = None, complex_arithmetic: bool = True,
                 seed: int = 0, refine: bool = True, split: bool = False) -> GcrdResult:
    """Factor ``P = N_r G_c`` with ``G_c`` a compact GCRD of the blocks.

    ``rows`` (``>= r``) pads ``G`` with zero rows and completes ``N`` with
    linearly independent columns.  ``complex_arithmetic=False`` keeps real
    inputs in real (orthogonal) arithmetic.  ``seed`` only affects the
    column completion for ``rows > r``.  ``refine`` applies one step of
    iterative refinement to ``N_r`` (``G_c`` is never modified).  ``split``
    also runs stage 2 of the staircase so the finite zeros can be reported.
    """
    tol = check_tol(tol)
    P0 = _as_compound(blocks)
    if P0.exact:
        P0 = P0.to_numeric(np.float64)
    dtype = np.complex128 if complex_arithmetic or np.iscomplexobj(P0.coeffs) else np.float64
    P0 = trim(PolyMatrix(P0.coeffs.astype(dtype)))
    m, n = P0.shape
    P, m_orig = _pad_rows(P0)
    scale = frob_norm(P)
    rng = np.random.default_rng(seed)

    if scale == 0.0:
        result = _finish(P0, PolyMatrix(np.zeros((1, 0, n), dtype=dtype)),
                         PolyMatrix(np.zeros((1, m, 0), dtype=dtype)), 0, tol, scale, rows, rng)
        return result

    Pn = PolyMatrix(P.coeffs / scale)
    d = Pn.degree
    if d == 0:
        U, s, Vh, r = _rank_svd(Pn.coeffs[0], tol, 1.0)
        G_c = PolyMatrix(Vh[:r][None])
        N_r = PolyMatrix(((U[:m_orig, :r] * s[:r]) * scale)[None])
        res = _finish(P0, G_c, N_r, r, tol, scale, rows, rng)
        res.stage_ranks = [(m, r)]
        return res

    form = staircase_system(Pn, tol, split=split)
    rws, cls = form._ranges()
    K = Pencil(form.A[rws["3"], cls["34"]], form.E[rws["3"], cls["34"]])
    r = n - form.right_kronecker_count
    accept = ACCEPT_FACTOR * tol * scale
    best = None
    embed_tol = tol
    while True:
        try:
            W, F_row, G_c, N_r = _factor_pair(form, K, embed_tol, tol, d, n, m_orig, scale)
        except ConsistencyError:
            if best is None and embed_tol * EMBED_TOL_STEP > EMBED_TOL_MAX:
                raise
        else:
            if refine:
                N_r = refine_left_factor(P0, N_r, G_c)
            err = residual_norm(P0, N_r, G_c)
            if best is None or err < best[0]:
                best = (err, W, F_row, G_c, N_r, embed_tol)
            if err <= accept:
                break
        if embed_tol * EMBED_TOL_STEP > EMBED_TOL_MAX:
            break
        embed_tol *= EMBED_TOL_STEP
    _, W, F_row, G_c, N_r, embed_tol = best
    if embed_tol != tol:
        log.debug("gcrd: embedding accepted at tolerance %.1e", embed_tol)
    res = _finish(P0, G_c, N_r, r, tol, scale, rows, rng)
    res.embed_tol = embed_tol
    res.stage_ranks = list(form.stage1_steps)
    res.F_row = F_row
    res.staircase = form
    res.embedding = FeedbackEmbedding(W=W, F_row=F_row, part3_rows=form.part3_rows,
                                      part3_cols=form.part3_cols + form.c4_cols,
                                      c4_cols=form.c4_cols)
    return res


def _factor_pair(form, K, embed_tol, tol, d, n, m_orig, scale):
    W = unimodular_embed(K, embed_tol, scale=form.scale)
    if W.shape[0] != n - form.right_kronecker_count:
        raise ConsistencyError("rank bookkeeping mismatch between staircase and embedding")
    F_row = build_feedback(form, W, n)
    G_c = trim(_g_from_feedback(F_row, d, n), tol)
    N_r = _n_from_system(form, W, tol)
    N_r = PolyMatrix(N_r.coeffs[:, :m_orig, :] * scale)
    return W, F_row, G_c, N_r


def _finish(P0, G_c, N_r, r, tol, scale, rows, rng) -> GcrdResult:
    m, n = P0.shape
    residual = residual_norm(P0, N_r, G_c) if r else frob_norm(P0)
    G, N = G_c, N_r
    if rows is not None:
        if rows < r:
            raise InvalidRequest(f"a GCRD needs at least {r} rows, got {rows}", rank=r)
        extra = rows - r
        if extra:
            gc = np.zeros((G_c.degree + 1, rows, n), dtype=G_c.coeffs.dtype)
            gc[:, :r] = G_c.coeffs
            G = PolyMatrix(gc)
            nc = np.zeros((N_r.degree + 1, m, rows), dtype=N_r.coeffs.dtype)
            nc[:, :, :r] = N_r.coeffs
            nc[0, :, r:] = _complete_columns(N_r.coeffs[0], extra, rng)
            N = PolyMatrix(nc)
    log.debug("gcrd: rank=%d residual=%.3e tol=%.3e", r, residual, tol)
    return GcrdResult(rank=r, G_c=G_c, N_r=N_r, residual=residual, tol=tol,
                      scale=scale, G=G, N=N)


# -- characteristic polynomial --------------------------------------------------------

def gcrd_characteristic_poly(G, tol: float = 1e-10) -> np.ndarray:
    """Monic ``det G(lam)`` as ascending coefficients.

    Accepts a square :class:`PolyMatrix` or a :class:`GcrdResult`.  The
    determinant is interpolated from values on a circle; coefficients below
    ``tol`` relative to the largest are treated as zero when locating the
    leading term.
    """
    if isinstance(G, GcrdResult):
        G = G.G_c
    r, n = G.shape
    if r != n:
        raise ShapeError(f"characteristic polynomial needs a square GCRD, got {r}x{n}")
    if r == 0:
        return np.ones(1)
    probe = np.linalg.svd(evaluate(G, 0.6180339 + 0.2718281j), compute_uv=False)
    if probe[-1] <= 1e-12 * probe[0]:
        raise RankDeficientError("G(lam) is singular at a random point; rank deficient")
    D = r * G.degree
    npts = D + 1
    pts = np.exp(2j * np.pi * np.arange(npts) / npts)
    vals = np.array([np.linalg.det(evaluate(G, z)) for z in pts])
    # vals[k] = sum_j c_j w**(j k) with w = exp(2 pi i / N)
    coeffs = np.fft.fft(vals) / npts
    big = np.max(np.abs(coeffs))
    top = max(i for i in range(len(coeffs)) if abs(coeffs[i]) > tol * big)
    coeffs = coeffs[: top + 1] / coeffs[top]
    if np.all(np.abs(coeffs.imag) <= tol):
        coeffs = coeffs.real
    return coeffs
