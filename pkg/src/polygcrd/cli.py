"""Command-line front end.

Exit codes: 0 ok, 1 usage, 2 parse, 3 numerical-consistency failure.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__
from .exact import InvalidRequest, gcrd_exact, hermite_form, right_divide, smith_form
from .experiments import (
    GENERATOR, RECIPES, rows_to_csv, run_bitmead, run_param_k, run_random_table,
)
from .gcrd import ConsistencyError, extract_gcrd
from .io import ParseError, dumps, encode_matrix, load_input
from .pencil import DEFAULT_TOL, build_s_lambda, staircase
from .polymat import PolyMatrix, ShapeError, normalize, residual_norm
from .verify import cross_check, diagnostics

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _matrix_doc(P: PolyMatrix) -> dict:
    return {"rows": P.rows, "cols": P.cols, "degree": P.degree,
            "field": "rational" if P.exact else "complex", "coeffs": encode_matrix(P)}


def _write(doc: dict, path: str | None) -> None:
    text = dumps(doc)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _report_header(args, data) -> dict:
    return {"generator": GENERATOR, "seed": args.seed, "m": data.P.rows, "n": data.P.cols,
            "blocks": list(data.spec.sizes), "field": data.field, "version": __version__}


# -- subcommands --------------------------------------------------------------------

def cmd_gcrd(args) -> int:
    data = load_input(args.input)
    doc = _report_header(args, data)
    t0 = time.perf_counter()
    if args.engine == "exact":
        if not data.P.exact:
            raise UsageError("the exact engine needs a rational input")
        G = gcrd_exact(data.blocks, rows=args.rows)
        r = sum(1 for i in range(G.rows) if np.any(G.coeffs[:, i, :] != 0))
        N = right_divide(data.P, G) if G.rows else PolyMatrix(
            np.zeros((1, data.P.rows, 0), dtype=object), exact=True)
        doc.update(engine="exact", rank=r, tol=0.0, G_c=_matrix_doc(G), N_r=_matrix_doc(N),
                   residual=residual_norm(data.P, N, G) if G.rows else 0.0)
    else:
        res = extract_gcrd(data.blocks, args.tol, rows=args.rows, seed=args.seed,
                           split=not args.skip_stage2)
        P = data.P.to_numeric() if data.P.exact else data.P
        rep = diagnostics(P, res)
        doc.update(engine="numeric", rank=res.rank, tol=res.tol, residual=res.residual,
                   G_c=_matrix_doc(res.G_c), N_r=_matrix_doc(res.N_r),
                   stage_ranks=[list(s) for s in res.stage_ranks],
                   diagnostics={"rho1": rep.rho1, "rho2": rep.rho2, "rho3": rep.rho3,
                                "rho4": rep.rho4, "kappa_inv": rep.kappa_inv,
                                "zeros_source": rep.zeros_source,
                                "norm_N_r": rep.norm_N, "norm_G_c": rep.norm_G})
        if args.rows is not None and args.rows != res.rank:
            doc.update(G=_matrix_doc(res.G), N=_matrix_doc(res.N))
    doc["timing_seconds"] = time.perf_counter() - t0
    _write(doc, args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.name == "bitmead":
        rows = run_bitmead(args.tol if args.tol is not None else DEFAULT_TOL)
    elif args.name == "param-k":
        rows = run_param_k(range(args.k_min, args.k_max + 1), seed=args.seed,
                           tol=args.tol if args.tol is not None else DEFAULT_TOL)
    else:
        rows = run_random_table(args.recipe, count=args.count, seed=args.seed, tol=args.tol)
    text = rows_to_csv(rows)
    if args.csv in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_normal_form(args) -> int:
    data = load_input(args.input)
    doc = _report_header(args, data)
    doc["form"] = args.form
    if args.form in ("hermite", "smith"):
        if not data.P.exact:
            raise UsageError(f"{args.form} form needs a rational input")
        if args.form == "hermite":
            h = hermite_form(data.P)
            doc.update(rank=h.rank, pivots=list(h.pivots), U=_matrix_doc(h.U), H=_matrix_doc(h.H))
        else:
            s = smith_form(data.P)
            doc.update(rank=s.rank, U=_matrix_doc(s.U), S=_matrix_doc(s.S), V=_matrix_doc(s.V),
                       invariant_factors=[[str(c) for c in f] for f in s.invariant_factors()])
    else:
        P = normalize(data.P.to_numeric() if data.P.exact else data.P)
        pen = build_s_lambda(P)
        f = staircase(pen, args.tol, split=True)
        doc.update(
            pencil_shape=list(pen.shape), tol=f.tol,
            part1=[f.part1_rows, f.part1_cols], part2=[f.part2_rows, f.part2_cols],
            part3=[f.part3_rows, f.part3_cols], finite_block=f.d_reg,
            right_kronecker=f.right_kronecker_count,
            pencil_normal_rank=f.A.shape[1] - f.right_kronecker_count,
            stage1_steps=[list(s) for s in f.stage1_steps],
            stage2_steps=[list(s) for s in f.stage2_steps],
            finite_eigenvalues=[complex(z) for z in f.finite_eigenvalues()],
        )
    _write(doc, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    data = load_input(args.input)
    if not data.P.exact:
        raise UsageError("verify cross-checks against the exact engine and needs a rational input")
    rep = cross_check(data.blocks, args.tol, seed=args.seed)
    doc = _report_header(args, data)
    doc.update(passed=rep.passed, rank_exact=rep.rank_exact, rank_numeric=rep.rank_numeric,
               kernel_dims=[list(k) for k in rep.kernel_dims],
               div_oracle_by_numeric=rep.div_oracle_by_numeric,
               div_numeric_by_oracle=rep.div_numeric_by_oracle, notes=rep.notes)
    _write(doc, args.out)
    return EXIT_OK if rep.passed else EXIT_NUMERIC


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polygcrd", description="Greatest common right divisors of polynomial matrices.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, tol_default=DEFAULT_TOL):
        sp.add_argument("--tol", type=float, default=tol_default,
                        help="relative rank tolerance (default 1000*eps)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="report path (default stdout)")

    g = sub.add_parser("gcrd", help="compute a GCRD")
    g.add_argument("input")
    common(g)
    g.add_argument("--rows", type=int, default=None, help="rows of the returned GCRD (>= rank)")
    g.add_argument("--engine", choices=("exact", "numeric"), default="numeric")
    g.add_argument("--skip-stage2", action=argparse.BooleanOptionalAction, default=True,
                   help="skip the right-Kronecker/finite split")
    g.set_defaults(func=cmd_gcrd)

    e = sub.add_parser("experiment", help="reproduce an experiment as CSV")
    e.add_argument("name", choices=("bitmead", "param-k", "random-table"))
    e.add_argument("--tol", type=float, default=None)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--csv", default=None, help="CSV path (default stdout)")
    e.add_argument("--k-min", type=int, default=1, help="smallest log10 k")
    e.add_argument("--k-max", type=int, default=6, help="largest log10 k")
    e.add_argument("--recipe", choices=sorted(RECIPES), default="table1")
    e.add_argument("--count", type=int, default=10)
    e.set_defaults(func=cmd_experiment)

    n = sub.add_parser("normal-form", help="Hermite, Smith or staircase form")
    n.add_argument("input")
    common(n)
    n.add_argument("--form", choices=("hermite", "smith", "staircase"), default="hermite")
    n.set_defaults(func=cmd_normal_form)

    v = sub.add_parser("verify", help="cross-check exact and numeric engines")
    v.add_argument("input")
    common(v)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "seed", 0) < 0:
            raise UsageError("--seed must be non-negative")
        return args.func(args)
    except UsageError as exc:
        print(f"polygcrd: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidRequest as exc:
        print(f"polygcrd: {exc} (computed rank {exc.rank})", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ShapeError, OSError) as exc:
        print(f"polygcrd: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConsistencyError as exc:
        print(f"polygcrd: numerical consistency failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
