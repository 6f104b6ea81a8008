"""Greatest common right divisors of polynomial matrices.

Two engines: an exact one over the rationals (Hermite/Smith forms) and a
floating-point one built on the staircase reduction of a state-space pencil.
"""
__version__ = "0.1.0"

from .exact import (  # noqa: E402
    HermiteResult, InvalidRequest, NotDivisible, SmithResult, divides, gcrd_exact,
    hermite_form, normal_rank, poly_det, right_divide, smith_form,
)
from .gcrd import (  # noqa: E402
    ConsistencyError, GcrdResult, RankDeficientError, extract_gcrd,
    gcrd_characteristic_poly,
)
from .kernels import BACKEND  # noqa: E402
from .pencil import (  # noqa: E402
    DEFAULT_TOL, LARGE_TOL, Pencil, StaircaseForm, build_s_lambda, build_s_p,
    staircase, staircase_system,
)
from .polymat import (  # noqa: E402
    BlockSpec, PolyMatrix, ShapeError, evaluate, frob_norm, mul, normalize, trim, vstack,
)
from .verify import DiagnosticsReport, cross_check, diagnostics  # noqa: E402

__all__ = [
    "__version__", "BACKEND",
    "PolyMatrix", "BlockSpec", "ShapeError", "vstack", "evaluate", "mul", "frob_norm",
    "normalize", "trim",
    "HermiteResult", "SmithResult", "InvalidRequest", "NotDivisible", "hermite_form",
    "smith_form", "normal_rank", "poly_det", "right_divide", "divides", "gcrd_exact",
    "Pencil", "StaircaseForm", "DEFAULT_TOL", "LARGE_TOL", "build_s_lambda", "build_s_p",
    "staircase", "staircase_system",
    "GcrdResult", "ConsistencyError", "RankDeficientError", "extract_gcrd",
    "gcrd_characteristic_poly",
    "DiagnosticsReport", "diagnostics", "cross_check",
]
