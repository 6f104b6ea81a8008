"""Diagnostics for computed GCRD factorizations and the exact/numeric
cross-check."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import gcrd_exact, normal_rank
from .pencil import DEFAULT_TOL
from .polymat import PolyMatrix, ShapeError, evaluate, frob_norm, residual_norm, vstack

__all__ = [
    "DiagnosticsReport", "residual", "zero_conditioning", "root_poly_check",
    "condition_at", "diagnostics", "float_right_divide", "rationalize",
    "CrossCheck", "cross_check",
]


@dataclass
class DiagnosticsReport:
    rho1: float
    rho2: float
    rho3: float | None
    rho4: float | None
    kappa_inv: list[float]
    norm_N: float
    norm_G: float
    rank: int
    tol: float
    point: complex = 1.0
    zeros_source: str = "none"


def residual(P: PolyMatrix, N: PolyMatrix, G: PolyMatrix) -> float:
    """``||P - N G||_F`` over all coefficients (exactly 0 for exact factors).

    Float factors are multiplied in extended precision so the value reflects
    the factors rather than the rounding of the check itself.
    """
    return residual_norm(P, N, G)


def zero_conditioning(G: PolyMatrix, zeros: Sequence[complex], rank: int | None = None) -> list[float]:
    """``sigma_r / sigma_1`` of ``G(lam_i)``; ``0`` when ``G(lam_i) = 0``."""
    r = G.rows if rank is None else rank
    out = []
    for z in zeros:
        s = np.linalg.svd(evaluate(G, complex(z)), compute_uv=False)
        if r == 0 or s.size == 0 or s[0] == 0.0:
            out.append(0.0)
        else:
            out.append(float(s[min(r, s.size) - 1] / s[0]))
    return out


def root_poly_check(G: PolyMatrix) -> tuple[float, float]:
    """``(||G(0) e1||, ||G'(0) e1 - G(0) e2||)``."""
    if G.cols < 2:
        raise ShapeError("root polynomial check needs at least two columns")
    c = G.coeffs
    if G.exact:
        c = G.to_numeric().coeffs
    G0 = c[0]
    G1 = c[1] if c.shape[0] > 1 else np.zeros_like(G0)
    return float(np.linalg.norm(G0[:, 0])), float(np.linalg.norm(G1[:, 0] - G0[:, 1]))


def condition_at(G: PolyMatrix, point: complex = 1.0) -> float:
    """2-norm condition number of ``G(point)`` (``inf`` if singular)."""
    s = np.linalg.svd(evaluate(G, point), compute_uv=False)
    if s.size == 0:
        return 1.0
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


def diagnostics(P: PolyMatrix, result, zeros: Sequence[complex] | None = None,
                point: complex = 1.0) -> DiagnosticsReport:
    """Collect the standard measurements for a :class:`GcrdResult`.

    Without supplied ``zeros`` the finite eigenvalues of the staircase regular
    block are used when available.
    """
    G, N = result.G_c, result.N_r
    source = "supplied"
    if zeros is None:
        zeros, source = [], "none"
        form = result.staircase
        if form is not None and form.split:
            zeros, source = list(form.finite_eigenvalues()), "staircase"
    rho3 = rho4 = None
    if G.cols >= 2 and G.rows:
        rho3, rho4 = root_poly_check(G)
    return DiagnosticsReport(
        rho1=residual(P, N, G) if result.rank else frob_norm(P),
        rho2=condition_at(G, point) if G.rows else float("inf"),
        rho3=rho3, rho4=rho4,
        kappa_inv=zero_conditioning(G, zeros, result.rank),
        norm_N=frob_norm(N), norm_G=frob_norm(G),
        rank=result.rank, tol=result.tol, point=point, zeros_source=source,
    )


# -- float division and the exact cross-check ------------------------------------------

def float_right_divide(P: PolyMatrix, D: PolyMatrix, max_degree: int | None = None,
                       tol: float = 1e-6) -> tuple[PolyMatrix | None, float]:
    """Least-squares ``Q`` with ``P ~= Q D``.

    Quotient degrees are tried upward; the first with relative residual
    ``<= tol`` is returned together with that residual.  Otherwise
    ``(None, best_residual)``.
    """
    Pc = np.asarray(P.to_numeric().coeffs if P.exact else P.coeffs, dtype=np.complex128)
    Dc = np.asarray(D.to_numeric().coeffs if D.exact else D.coeffs, dtype=np.complex128)
    m, n = Pc.shape[1:]
    ell, dd, dp = Dc.shape[1], Dc.shape[0] - 1, Pc.shape[0] - 1
    pn = max(np.linalg.norm(Pc), 1e-300)
    if max_degree is None:
        max_degree = dp + max(0, ell - 1) * dd
    best = np.inf
    for e in range(max(0, dp - dd), max_degree + 1):
        K = e + dd
        T = np.zeros((ell * (e + 1), n * (K + 1)), dtype=np.complex128)
        for i in range(e + 1):
            for s in range(dd + 1):
                T[i * ell:(i + 1) * ell, (i + s) * n:(i + s + 1) * n] = Dc[s]
        R = np.zeros((m, n * (K + 1)), dtype=np.complex128)
        for k in range(dp + 1):
            R[:, k * n:(k + 1) * n] = Pc[k]
        X = np.linalg.lstsq(T.T, R.T, rcond=None)[0].T
        res = np.linalg.norm(X @ T - R) / pn
        best = min(best, res)
        if res <= tol:
            Q = np.stack([X[:, i * ell:(i + 1) * ell] for i in range(e + 1)])
            return PolyMatrix(Q), float(res)
    return None, float(best)


def rationalize(P: PolyMatrix, tol: float = 1e-10) -> PolyMatrix:
    """Round real coefficients to nearby fractions (continued fractions).

    Complex coefficients keep their type; their real and imaginary parts are
    rounded separately and the result stays numeric.
    """
    c = P.coeffs
    if P.exact:
        return P
    bound = max(1, int(round(1.0 / np.sqrt(tol))))

    def rnd(x: float) -> Fraction:
        return Fraction(float(x)).limit_denominator(bound)

    if np.iscomplexobj(c) and np.any(np.abs(c.imag) > tol):
        out = np.vectorize(lambda z: complex(float(rnd(z.real)), float(rnd(z.imag))))(c)
        return PolyMatrix(out.astype(np.complex128))
    re = np.real(c)
    out = np.empty(re.shape, dtype=object)
    for idx, x in np.ndenumerate(re):
        out[idx] = rnd(x)
    return PolyMatrix(out, exact=True)


@dataclass
class CrossCheck:
    passed: bool
    rank_exact: int
    rank_numeric: int
    kernel_dims: list[tuple[int, int]] = field(default_factory=list)
    div_oracle_by_numeric: float = np.inf
    div_numeric_by_oracle: float = np.inf
    notes: list[str] = field(default_factory=list)


def _numerical_rank(M: np.ndarray, tol: float) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def cross_check(blocks: Sequence[PolyMatrix], tol: float = DEFAULT_TOL, seed: int = 0,
                div_tol: float = 1e-6) -> CrossCheck:
    """Compare :func:`gcrd_exact` with the numeric engine on rational blocks."""
    from .gcrd import extract_gcrd

    P, _ = vstack(blocks)
    if not P.exact:
        raise TypeError("cross_check needs rational blocks")
    r_exact = normal_rank(P)
    res = extract_gcrd(blocks, tol, seed=seed)
    report = CrossCheck(passed=True, rank_exact=r_exact, rank_numeric=res.rank)
    if r_exact != res.rank:
        report.passed = False
        report.notes.append("rank mismatch")
        return report
    if r_exact == 0:
        report.div_oracle_by_numeric = report.div_numeric_by_oracle = 0.0
        return report

    rng = np.random.default_rng(seed)
    Pn = P.to_numeric()
    for _ in range(3):
        z = complex(*rng.uniform(-1.0, 1.0, 2))
        kp = P.cols - _numerical_rank(evaluate(Pn, z), 1e-9)
        kg = P.cols - _numerical_rank(evaluate(res.G_c, z), 1e-9)
        report.kernel_dims.append((kp, kg))
        if kp != kg:
            report.passed = False
            report.notes.append(f"kernel dimension mismatch at {z}")

    G_oracle = gcrd_exact(blocks)
    G_num = rationalize(res.G_c)
    _, a = float_right_divide(G_oracle, G_num, tol=div_tol)
    _, b = float_right_divide(G_num, G_oracle, tol=div_tol)
    report.div_oracle_by_numeric, report.div_numeric_by_oracle = a, b
    if a > div_tol or b > div_tol:
        report.passed = False
        report.notes.append("mutual division residual too large")
    return report
