"""Reproducible experiment drivers: Bitmead, the k-parameterised family and
planted random tables."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .gcrd import extract_gcrd, gcrd_characteristic_poly
from .pencil import DEFAULT_TOL, LARGE_TOL
from .polymat import PolyMatrix, mul, normalize
from .verify import diagnostics

GENERATOR = "PCG64"

BITMEAD_G = PolyMatrix(np.array([[[5.0, 2.0], [1.0, 0.0]], [[2.0, 3.0], [0.0, 1.0]]]))
BITMEAD_CHARPOLY = np.array([-1.0, 1.0, 1.0])


def bitmead_blocks() -> list[PolyMatrix]:
    """The four 1x2 rows of the Bitmead example, as separate blocks."""
    from .io import parse_input
    text = resources.files("polygcrd").joinpath("data/bitmead.json").read_text()
    return parse_input(json.loads(text)).blocks


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass
class ExperimentRow:
    values: dict
    extra: dict = field(default_factory=dict)


def run_bitmead(tol: float = DEFAULT_TOL) -> list[ExperimentRow]:
    t0 = time.perf_counter()
    res = extract_gcrd(bitmead_blocks(), tol)
    elapsed = time.perf_counter() - t0
    cp = gcrd_characteristic_poly(res)
    err = float(np.max(np.abs(cp - BITMEAD_CHARPOLY))) if cp.shape == BITMEAD_CHARPOLY.shape else np.inf
    return [ExperimentRow({"rank": res.rank, "residual": res.residual,
                           "charpoly_error": err, "seconds": elapsed},
                          {"result": res})]


# -- parameterised family ----------------------------------------------------------

def param_k_unitary(seed: int) -> np.ndarray:
    rng = rng_for(seed)
    X = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    Q, _ = np.linalg.qr(X)
    return Q


def param_k_matrix(k: float, Z: np.ndarray) -> PolyMatrix:
    c = np.zeros((3, 4, 2), dtype=np.complex128)
    c[2, 0, 0] = 1.0
    c[1, 0, 1] = 2.0
    c[1, 1, 1] = 1.0
    c[1, 2, 0] = 1.0
    c[1, 2, 1] = k
    c[0, 2, 1] = 1.0
    c[2, 3, 1] = 1.0
    return PolyMatrix(np.einsum("ij,djk->dik", Z, c))


def run_param_k(exponents=range(1, 7), seed: int = 0, tol: float = DEFAULT_TOL) -> list[ExperimentRow]:
    Z = param_k_unitary(seed)
    rows = []
    for e in exponents:
        P = param_k_matrix(10.0 ** e, Z)
        res = extract_gcrd(P, tol)
        rep = diagnostics(P, res, point=1.0)
        rows.append(ExperimentRow({"log10_k": e, "rank": res.rank, "rho1": rep.rho1,
                                   "rho2": rep.rho2, "rho3": rep.rho3, "rho4": rep.rho4},
                                  {"result": res}))
    return rows


# -- planted random instances -------------------------------------------------------

@dataclass
class PlantedInstance:
    P: PolyMatrix
    zeros: np.ndarray
    rank: int


def _gauss_poly(rng, deg, rows, cols) -> PolyMatrix:
    return PolyMatrix(rng.standard_normal((deg + 1, rows, cols)))


def planted_instance(rng: np.random.Generator, m: int, n: int, r: int,
                     deg_mn: int, deg_p: int = 4) -> PlantedInstance:
    """``P = M S N`` with ``S = I_{r-1} (+) p``, normalised to unit norm."""
    M = _gauss_poly(rng, deg_mn, m, r)
    N = _gauss_poly(rng, deg_mn, r, n)
    p = rng.standard_normal(deg_p + 1)
    s = np.zeros((deg_p + 1, r, r))
    s[0, : r - 1, : r - 1] = np.eye(r - 1)
    s[:, r - 1, r - 1] = p
    P = normalize(mul(mul(M, PolyMatrix(s)), N))
    zeros = np.roots(p[::-1])
    return PlantedInstance(P=P, zeros=zeros, rank=r)


TABLE_HEADER = ["norm_N_r", "norm_G_c", "norm_Res", "kappa_inv_1", "kappa_inv_2", "kappa_inv_3", "kappa_inv_4"]

RECIPES = {
    # desk-scale version of the 1000x500, rank 20 table
    "table1": dict(m=200, n=100, r=10, deg_mn=1, tol=LARGE_TOL),
    "table2": dict(m=4, n=3, r=2, deg_mn=10, tol=DEFAULT_TOL),
    "table3": dict(m=4, n=3, r=2, deg_mn=10, tol=10 * DEFAULT_TOL),
}


def run_random_table(recipe: str = "table1", count: int = 10, seed: int = 0,
                     tol: float | None = None) -> list[ExperimentRow]:
    spec = dict(RECIPES[recipe])
    default_tol = spec.pop("tol")
    tol = default_tol if tol is None else tol
    rng = rng_for(seed)
    rows = []
    for _ in range(count):
        inst = planted_instance(rng, **spec)
        res = extract_gcrd(inst.P, tol)
        rep = diagnostics(inst.P, res, zeros=inst.zeros)
        vals = dict(zip(TABLE_HEADER, [rep.norm_N, rep.norm_G, rep.rho1, *rep.kappa_inv]))
        vals["rank"] = res.rank
        rows.append(ExperimentRow(vals, {"result": res, "instance": inst}))
    return rows


def rows_to_csv(rows: list[ExperimentRow]) -> str:
    if not rows:
        return ""
    keys = list(rows[0].values)
    lines = [",".join(keys)]
    for row in rows:
        lines.append(",".join(_fmt(row.values[k]) for k in keys))
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))
