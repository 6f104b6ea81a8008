"""JSON input and report documents."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polymat import BlockSpec, PolyMatrix

__all__ = [
    "ParseError", "InputData", "parse_input", "load_input", "emit_input",
    "encode_matrix", "decode_matrix", "dumps",
]


class ParseError(ValueError):
    pass


@dataclass
class InputData:
    P: PolyMatrix
    spec: BlockSpec
    field: str

    @property
    def blocks(self) -> list[PolyMatrix]:
        return self.spec.split(self.P)


def _rational(x, where: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise ParseError(f"{where}: rational entries must be 'p/q' strings or integers, got {x!r}")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: bad rational {x!r}") from exc


def _complex(x, where: str) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        x = [x, 0.0]
    if not (isinstance(x, list) and len(x) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x)):
        raise ParseError(f"{where}: complex entries must be [re, im] pairs, got {x!r}")
    if not all(math.isfinite(v) for v in x):
        raise ParseError(f"{where}: non-finite entry")
    return complex(x[0], x[1])


def parse_input(doc) -> InputData:
    """Validate a decoded input document (or its JSON text)."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    for key in ("m", "n", "coeffs"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    m, n = doc["m"], doc["n"]
    if not (isinstance(m, int) and isinstance(n, int)) or m < 1 or n < 1:
        raise ParseError("m and n must be positive integers")
    field = doc.get("field", "rational")
    if field not in ("rational", "complex"):
        raise ParseError(f"field must be 'rational' or 'complex', got {field!r}")
    blocks = doc.get("blocks", [m])
    if not isinstance(blocks, list) or not all(isinstance(b, int) and b >= 1 for b in blocks):
        raise ParseError("blocks must be a list of positive integers")
    if sum(blocks) != m:
        raise ParseError(f"block sizes sum to {sum(blocks)}, expected m = {m}")
    coeffs = doc["coeffs"]
    if not isinstance(coeffs, list) or not coeffs:
        raise ParseError("coeffs must be a non-empty list of matrices")
    conv = _rational if field == "rational" else _complex
    out = np.empty((len(coeffs), m, n), dtype=object if field == "rational" else np.complex128)
    for k, M in enumerate(coeffs):
        if not isinstance(M, list) or len(M) != m:
            raise ParseError(f"coeffs[{k}]: expected {m} rows")
        for i, row in enumerate(M):
            if not isinstance(row, list) or len(row) != n:
                raise ParseError(f"coeffs[{k}][{i}]: expected {n} entries")
            for j, x in enumerate(row):
                out[k, i, j] = conv(x, f"coeffs[{k}][{i}][{j}]")
    P = PolyMatrix(out, exact=field == "rational")
    return InputData(P=P, spec=BlockSpec(tuple(blocks)), field=field)


def load_input(path) -> InputData:
    with open(path, encoding="utf-8") as fh:
        return parse_input(fh.read())


def encode_matrix(P: PolyMatrix) -> list:
    """Coefficient list with ``"p/q"`` strings (exact) or ``[re, im]`` pairs."""
    c = P.coeffs
    if P.exact:
        return [[[str(x) for x in row] for row in M] for M in c]
    c = np.asarray(c, dtype=np.complex128)
    return [[[[float(z.real), float(z.imag)] for z in row] for row in M] for M in c]


def decode_matrix(data: list, exact: bool, rows: int, cols: int) -> PolyMatrix:
    conv = _rational if exact else _complex
    out = np.empty((max(1, len(data)), rows, cols), dtype=object if exact else np.complex128)
    if not data:
        out[...] = Fraction(0) if exact else 0.0
    for k, M in enumerate(data):
        for i, row in enumerate(M):
            for j, x in enumerate(row):
                out[k, i, j] = conv(x, f"[{k}][{i}][{j}]")
    return PolyMatrix(out, exact=exact)


def emit_input(data: InputData) -> dict:
    return {"m": data.P.rows, "n": data.P.cols, "blocks": list(data.spec.sizes),
            "field": data.field, "coeffs": encode_matrix(data.P)}


def _default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.complexfloating):
        return [float(o.real), float(o.imag)]
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(doc: dict) -> str:
    """Deterministic JSON; floats use Python's shortest round-trip repr."""
    return json.dumps(doc, indent=1, sort_keys=True, default=_default, allow_nan=True) + "\n"
