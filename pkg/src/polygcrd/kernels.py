"""Backend selection for the rational polynomial kernels.

The compiled extension is used when it imports; otherwise the pure-Python
module is used.  Setting ``POLYGCRD_PURE_PYTHON=1`` forces the fallback.
"""
import os

BACKEND = "python"

if os.environ.get("POLYGCRD_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._polyq_ext import (  # noqa: F401
            padd, paxpy, pdeg, pdivmod, pgcd, pmonic, pmul, pneg,
            pscale, psub, ptrim,
        )
        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from ._polyq import (  # noqa: F401
        padd, paxpy, pdeg, pdivmod, pgcd, pmonic, pmul, pneg, pscale,
        psub, ptrim,
    )

__all__ = [
    "BACKEND", "padd", "paxpy", "pdeg", "pdivmod", "pgcd", "pmonic",
    "pmul", "pneg", "pscale", "psub", "ptrim",
]
