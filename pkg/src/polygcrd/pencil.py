"""Pencil realizations of polynomial matrices and the staircase reduction.

All rank decisions are made on singular values.  Inside a staircase run the
absolute threshold is ``tol * scale`` where ``scale`` is the spectral norm of
the whole pencil, so a block made only of rounding noise is recognised as
rank zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .polymat import PolyMatrix, trim

__all__ = [
    "EPS", "DEFAULT_TOL", "LARGE_TOL", "DegenerateDegree", "Pencil",
    "SystemMatrix", "StaircaseForm", "build_s_lambda", "build_s_p",
    "row_compress", "col_compress", "staircase", "staircase_system",
    "check_tol",
]

EPS = float(np.finfo(float).eps)
DEFAULT_TOL = 1000 * EPS
LARGE_TOL = 1e4 * EPS


class DegenerateDegree(ValueError):
    """Raised for constant (degree 0) inputs, which have no companion pencil."""


def check_tol(tol: float) -> float:
    tol = float(tol)
    if not tol > 0 or not np.isfinite(tol):
        raise ValueError(f"tolerance must be a positive finite number, got {tol}")
    return tol


@dataclass(frozen=True)
class Pencil:
    """The matrix pencil ``A - lam * E``."""

    A: np.ndarray
    E: np.ndarray

    def __post_init__(self):
        if self.A.shape != self.E.shape or self.A.ndim != 2:
            raise ValueError("A and E must be 2-D arrays of one shape")
        if not (np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.E))):
            raise ValueError("pencil entries must be finite")

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def __call__(self, lam) -> np.ndarray:
        return self.A - lam * self.E

    def norm(self) -> float:
        """``max(||A||_2, ||E||_2)``; the scale for rank thresholds."""
        if self.A.size == 0:
            return 0.0
        return max(np.linalg.norm(self.A, 2), np.linalg.norm(self.E, 2))


@dataclass(frozen=True)
class SystemMatrix:
    """Generalized state-space system ``[[A - lam E, B], [C, D]]``.

    The represented matrix is ``D - C (A - lam E)^{-1} B``.
    """

    A: np.ndarray
    E: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    degree: int

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]

    @property
    def outputs(self) -> int:
        return self.C.shape[0]

    @property
    def inputs(self) -> int:
        return self.B.shape[1]

    def pencil(self) -> Pencil:
        """The full bordered pencil of the system matrix."""
        top = np.hstack([self.A, self.B])
        bot = np.hstack([self.C, self.D])
        Ez = np.zeros_like(top, shape=(self.A.shape[0], self.B.shape[1]))
        Eb = np.zeros_like(bot)
        return Pencil(np.vstack([top, bot]), np.vstack([np.hstack([self.E, Ez]), Eb]))

    def transfer(self, lam) -> np.ndarray:
        x = np.linalg.solve(self.A - lam * self.E, self.B)
        return self.D - self.C @ x


def _coeff_blocks(P: PolyMatrix) -> tuple[np.ndarray, int, int, int]:
    P = trim(P)
    if P.exact:
        P = P.to_numeric(np.float64)
    d = P.degree
    if d < 1:
        raise DegenerateDegree("a companion realization needs degree >= 1")
    m, n = P.shape
    # [P_d, ..., P_1, P_0]
    C = np.hstack([P.coeffs[k] for k in range(d, -1, -1)])
    return C, d, m, n


def build_s_lambda(P: PolyMatrix) -> Pencil:
    """Companion-like pencil of size ``(dn + m) x (dn + n)``.

    Top ``dn`` rows: ``I`` on the block diagonal and ``-lam I`` on the block
    superdiagonal; bottom rows ``[P_d ... P_1 P_0]``.
    """
    C, d, m, n = _coeff_blocks(P)
    dn = d * n
    A = np.zeros((dn + m, dn + n), dtype=C.dtype)
    E = np.zeros_like(A)
    A[:dn, :dn] = np.eye(dn)
    E[:dn, n:] = np.eye(dn)
    A[dn:, :] = C
    return Pencil(A, E)


def build_s_p(P: PolyMatrix) -> SystemMatrix:
    """Generalized state-space realization with state dimension ``(d+1) n``."""
    C, d, m, n = _coeff_blocks(P)
    N = (d + 1) * n
    A = np.eye(N, dtype=C.dtype)
    E = np.zeros((N, N), dtype=C.dtype)
    E[: d * n, n:] = np.eye(d * n)
    B = np.zeros((N, n), dtype=C.dtype)
    B[d * n:, :] = -np.eye(n)
    return SystemMatrix(A=A, E=E, B=B, C=C, D=np.zeros((m, n), dtype=C.dtype), degree=d)


# -- rank-revealing compressions ---------------------------------------------

def _svd(M: np.ndarray):
    try:
        return sla.svd(M, full_matrices=True, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        return sla.svd(M, full_matrices=True, lapack_driver="gesvd")


def _rank_svd(M: np.ndarray, tol: float, scale: float | None):
    rows, cols = M.shape
    if M.size == 0:
        return np.eye(rows, dtype=M.dtype), np.zeros(0), np.eye(cols, dtype=M.dtype), 0
    U, s, Vh = _svd(M)
    ref = s[0] if scale is None else scale
    rank = int(np.count_nonzero(s > tol * ref)) if ref > 0 else 0
    return U, s, Vh, rank


def row_compress(M: np.ndarray, tol: float = DEFAULT_TOL, scale: float | None = None):
    """Unitary ``U`` and rank ``rho`` with ``U^H M`` nonzero only in its top ``rho`` rows.

    The threshold is ``tol * scale``; ``scale`` defaults to ``sigma_max(M)``.
    """
    U, _, _, rank = _rank_svd(M, tol, scale)
    return U, rank


def col_compress(M: np.ndarray, tol: float = DEFAULT_TOL, scale: float | None = None):
    """Unitary ``V`` and rank ``rho`` with ``M V = [0, M_c]``, ``M_c`` of full column rank ``rho``."""
    _, _, Vh, rank = _rank_svd(M, tol, scale)
    V = Vh.conj().T
    return np.hstack([V[:, rank:], V[:, :rank]]), rank


# -- staircase -----------------------------------------------------------------

@dataclass
class StaircaseForm:
    """Result of a staircase reduction ``Q^H (A - lam E) Z``.

    Rows and columns split into a leading part (right Kronecker structure and
    finite zeros) and a trailing part 3 (infinite zeros, left Kronecker
    structure).  When stage 2 ran, the leading part is further split into
    part 1 (right Kronecker blocks) and part 2 (regular, finite zeros).  For
    system pencils the last ``out_rows`` rows and ``c4_cols`` columns hold the
    ``[0 C4]`` output block, reported separately from part 3.
    """

    Q: np.ndarray
    Z: np.ndarray
    A: np.ndarray
    E: np.ndarray
    tol: float
    tol_abs: float
    scale: float
    lead_rows: int
    lead_cols: int
    part1_rows: int | None = None
    part1_cols: int | None = None
    out_rows: int = 0
    c4_cols: int = 0
    stage1_steps: list = field(default_factory=list)
    stage2_steps: list = field(default_factory=list)

    @property
    def split(self) -> bool:
        return self.part1_rows is not None

    @property
    def part2_rows(self) -> int | None:
        return None if not self.split else self.lead_rows - self.part1_rows

    @property
    def part2_cols(self) -> int | None:
        return None if not self.split else self.lead_cols - self.part1_cols

    @property
    def part3_rows(self) -> int:
        return self.A.shape[0] - self.lead_rows - self.out_rows

    @property
    def part3_cols(self) -> int:
        return self.A.shape[1] - self.lead_cols - self.c4_cols

    @property
    def d_reg(self) -> int | None:
        """Size of the regular block holding the finite zeros."""
        return self.part2_cols

    @property
    def right_kronecker_count(self) -> int:
        """Number of right minimal indices, ``lead_cols - lead_rows``."""
        return self.lead_cols - self.lead_rows

    def block(self, rows: str, cols: str) -> Pencil:
        r, c = self._ranges()[0][rows], self._ranges()[1][cols]
        return Pencil(self.A[r, c], self.E[r, c])

    def _ranges(self):
        p, q = self.A.shape
        p3_end = p - self.out_rows
        q3_end = q - self.c4_cols
        r1 = self.part1_rows if self.split else self.lead_rows
        c1 = self.part1_cols if self.split else self.lead_cols
        rows = {
            "1": slice(0, r1), "2": slice(r1, self.lead_rows),
            "12": slice(0, self.lead_rows), "3": slice(self.lead_rows, p3_end),
            "4": slice(p3_end, p),
        }
        cols = {
            "1": slice(0, c1), "2": slice(c1, self.lead_cols),
            "12": slice(0, self.lead_cols), "3": slice(self.lead_cols, q3_end),
            "4": slice(q3_end, q), "34": slice(self.lead_cols, q),
        }
        return rows, cols

    def finite_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the regular part-2 pencil (needs stage 2)."""
        if not self.split:
            raise ValueError("finite eigenvalues need the stage-2 split")
        blk = self.block("2", "2")
        if blk.A.size == 0:
            return np.zeros(0, dtype=complex)
        return sla.eigvals(blk.A, blk.E)

    def lower_residual(self, A0: np.ndarray, E0: np.ndarray) -> float:
        """Largest norm of a block that must vanish in ``Q^H (A0 - lam E0) Z``."""
        At = self.Q.conj().T @ A0 @ self.Z
        Et = self.Q.conj().T @ E0 @ self.Z
        rows, cols = self._ranges()
        zero_blocks = [(rows["3"], cols["12"]), (rows["4"], cols["12"]), (rows["4"], cols["3"])]
        if self.split:
            zero_blocks.append((rows["2"], cols["1"]))
        worst = 0.0
        for r, c in zero_blocks:
            for M in (At[r, c], Et[r, c]):
                if M.size:
                    worst = max(worst, float(np.linalg.norm(M)))
        return worst


def _stage1(A, E, Q, Z, tol_abs_fn, first_rows: int | None):
    """Peel infinite/left structure off the bottom-right; returns (pr, qc, steps)."""
    p, q = A.shape
    pr, qc = p, q
    steps = []
    first = True
    while pr > 0:
        if first and first_rows is not None:
            rho = first_rows
        else:
            U, _, _, rk = tol_abs_fn(E[:pr, :qc])
            Uh = U.conj().T
            A[:pr, :] = Uh @ A[:pr, :]
            E[:pr, :] = Uh @ E[:pr, :]
            Q[:, :pr] = Q[:, :pr] @ U
            E[rk:pr, :qc] = 0
            rho = pr - rk
        first = False
        if rho == 0:
            break
        _, _, Vh, tk = tol_abs_fn(A[pr - rho:pr, :qc])
        V = Vh.conj().T
        V = np.hstack([V[:, tk:], V[:, :tk]])
        A[:, :qc] = A[:, :qc] @ V
        E[:, :qc] = E[:, :qc] @ V
        Z[:, :qc] = Z[:, :qc] @ V
        A[pr - rho:pr, :qc - tk] = 0
        steps.append((rho, tk))
        pr -= rho
        qc -= tk
    return pr, qc, steps


def _stage2(A, E, Q, Z, tol_abs_fn, pr, qc):
    """Split right Kronecker blocks from the regular part; returns (r1, c1, steps)."""
    r0 = c0 = 0
    steps = []
    while c0 < qc:
        _, _, Vh, rk = tol_abs_fn(E[r0:pr, c0:qc])
        V = Vh.conj().T
        V = np.hstack([V[:, rk:], V[:, :rk]])
        A[:, c0:qc] = A[:, c0:qc] @ V
        E[:, c0:qc] = E[:, c0:qc] @ V
        Z[:, c0:qc] = Z[:, c0:qc] @ V
        nnull = (qc - c0) - rk
        E[r0:pr, c0:c0 + nnull] = 0
        if nnull == 0:
            break
        U, _, _, sk = tol_abs_fn(A[r0:pr, c0:c0 + nnull])
        Uh = U.conj().T
        A[r0:pr, :] = Uh @ A[r0:pr, :]
        E[r0:pr, :] = Uh @ E[r0:pr, :]
        Q[:, r0:pr] = Q[:, r0:pr] @ U
        A[r0 + sk:pr, c0:c0 + nnull] = 0
        steps.append((nnull, sk))
        r0 += sk
        c0 += nnull
    return r0, c0, steps


def _working_copies(pencil: Pencil):
    dtype = np.result_type(pencil.A.dtype, pencil.E.dtype, np.float64)
    A = np.array(pencil.A, dtype=dtype)
    E = np.array(pencil.E, dtype=dtype)
    p, q = A.shape
    return A, E, np.eye(p, dtype=dtype), np.eye(q, dtype=dtype)


def staircase(pencil: Pencil, tol: float = DEFAULT_TOL, split: bool = True,
              scale: float | None = None) -> StaircaseForm:
    """Unitary three-part block upper triangular form of a general pencil."""
    tol = check_tol(tol)
    scale = pencil.norm() if scale is None else scale
    tol_abs = tol * scale

    def ranker(M):
        return _rank_svd(M, tol, scale)

    A, E, Q, Z = _working_copies(pencil)
    pr, qc, steps1 = _stage1(A, E, Q, Z, ranker, None)
    form = StaircaseForm(Q=Q, Z=Z, A=A, E=E, tol=tol, tol_abs=tol_abs, scale=scale,
                         lead_rows=pr, lead_cols=qc, stage1_steps=steps1)
    if split:
        r1, c1, steps2 = _stage2(A, E, Q, Z, ranker, pr, qc)
        form.part1_rows, form.part1_cols, form.stage2_steps = r1, c1, steps2
    return form


def staircase_system(P: PolyMatrix, tol: float = DEFAULT_TOL, split: bool = False,
                     scale: float | None = None) -> StaircaseForm:
    """Staircase of the companion pencil with left transform ``Q^H (+) I_m``.

    The first row compression is skipped: the lambda-coefficient of the
    companion pencil already has its ``m`` output rows equal to zero.  The
    returned ``Q`` is the full ``(dn + m)`` square transform whose trailing
    ``m x m`` block is the identity; ``c4_cols`` is the rank of
    ``[P_d ... P_0]``.
    """
    tol = check_tol(tol)
    S = build_s_lambda(P)
    m = P.rows
    scale = S.norm() if scale is None else scale
    tol_abs = tol * scale

    def ranker(M):
        return _rank_svd(M, tol, scale)

    A, E, Q, Z = _working_copies(S)
    pr, qc, steps1 = _stage1(A, E, Q, Z, ranker, m)
    form = StaircaseForm(Q=Q, Z=Z, A=A, E=E, tol=tol, tol_abs=tol_abs, scale=scale,
                         lead_rows=pr, lead_cols=qc, stage1_steps=steps1,
                         out_rows=m, c4_cols=steps1[0][1] if steps1 else 0)
    if split:
        r1, c1, steps2 = _stage2(A, E, Q, Z, ranker, pr, qc)
        form.part1_rows, form.part1_cols, form.stage2_steps = r1, c1, steps2
    return form
