"""Polynomial matrices stored by coefficient.

``P(lam) = P_0 + P_1 lam + ... + P_d lam**d`` is held as one array of shape
``(d + 1, m, n)``.  Two scalar fields are supported:

* exact: ``dtype=object`` arrays of :class:`fractions.Fraction`;
* numeric: ``float64`` or ``complex128`` arrays (real data is treated as a
  subfield of the complex numbers).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Sequence

import numpy as np

__all__ = [
    "PolyMatrix", "BlockSpec", "ShapeError", "vstack", "evaluate", "mul",
    "frob_norm", "normalize", "trim", "as_fraction", "residual_norm", "wide_residual",
]


class ShapeError(ValueError):
    """Raised when polynomial matrix dimensions do not conform."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        if not np.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(float(x))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _to_exact_array(a) -> np.ndarray:
    a = np.asarray(a, dtype=object)
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(a.shape):
        out[idx] = as_fraction(a[idx])
    return out


class PolyMatrix:
    """An ``m x n`` polynomial matrix with coefficient-major storage.

    Instances are treated as immutable values; operations return new objects.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, exact: bool | None = None):
        if isinstance(coeffs, np.ndarray) and coeffs.ndim == 2:
            coeffs = coeffs[None]
        elif not isinstance(coeffs, np.ndarray):
            coeffs = list(coeffs)
            if not coeffs:
                raise ShapeError("a polynomial matrix needs at least one coefficient")
            first = np.asarray(coeffs[0], dtype=object)
            if first.ndim != 2:
                raise ShapeError("coefficients must be 2-D matrices")
            if any(np.shape(c) != first.shape for c in coeffs):
                raise ShapeError("all coefficient matrices must share one shape")
            if exact is None:
                exact = all(
                    isinstance(x, (Fraction, int, np.integer, str))
                    for c in coeffs for x in np.asarray(c, dtype=object).ravel()
                )
            coeffs = np.stack([np.asarray(c, dtype=object) for c in coeffs])
        if coeffs.ndim != 3:
            raise ShapeError(f"expected a (d+1, m, n) array, got shape {coeffs.shape}")
        if coeffs.shape[0] == 0:
            raise ShapeError("a polynomial matrix needs at least one coefficient")
        if exact is None:
            exact = coeffs.dtype == object
        if exact:
            coeffs = _to_exact_array(coeffs)
        else:
            kind = np.complex128 if np.iscomplexobj(coeffs) or coeffs.dtype == object and any(
                isinstance(x, complex) for x in coeffs.ravel()) else np.float64
            coeffs = np.array(coeffs, dtype=kind)
            if not np.all(np.isfinite(coeffs)):
                raise ValueError("polynomial matrix entries must be finite")
        coeffs.setflags(write=False)
        self.coeffs = coeffs

    # -- basic properties -------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.coeffs.dtype == object

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape[1], self.coeffs.shape[2]

    @property
    def rows(self) -> int:
        return self.coeffs.shape[1]

    @property
    def cols(self) -> int:
        return self.coeffs.shape[2]

    @property
    def degree(self) -> int:
        """Stored degree (``len(coeffs) - 1``); see :func:`trim`."""
        return self.coeffs.shape[0] - 1

    def __getitem__(self, key) -> "PolyMatrix":
        rows, cols = key if isinstance(key, tuple) else (key, slice(None))
        sub = self.coeffs[:, rows, cols]
        if sub.ndim != 3:
            raise IndexError("use slices to keep a 2-D polynomial matrix")
        return PolyMatrix(np.array(sub), exact=self.exact)

    def __repr__(self):
        kind = "exact" if self.exact else str(self.coeffs.dtype)
        return f"PolyMatrix({self.rows}x{self.cols}, degree={self.degree}, {kind})"

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        a, b = trim(self), trim(other)
        return a.coeffs.shape == b.coeffs.shape and bool(np.all(a.coeffs == b.coeffs))

    __hash__ = None

    # -- conversions ------------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int, exact: bool = False, dtype=np.float64) -> "PolyMatrix":
        if exact:
            return cls(np.full((1, rows, cols), Fraction(0), dtype=object), exact=True)
        return cls(np.zeros((1, rows, cols), dtype=dtype))

    @classmethod
    def identity(cls, n: int, exact: bool = False) -> "PolyMatrix":
        if exact:
            c = np.full((1, n, n), Fraction(0), dtype=object)
            for i in range(n):
                c[0, i, i] = Fraction(1)
            return cls(c, exact=True)
        return cls(np.eye(n)[None])

    @classmethod
    def from_entries(cls, entries: Sequence[Sequence[Sequence]], exact: bool = True) -> "PolyMatrix":
        """Build from a nested list ``entries[i][j] = [c0, c1, ...]``."""
        m = len(entries)
        n = len(entries[0]) if m else 0
        d = max((len(e) for row in entries for e in row), default=1) - 1
        d = max(d, 0)
        if exact:
            c = np.full((d + 1, m, n), Fraction(0), dtype=object)
        else:
            c = np.zeros((d + 1, m, n), dtype=np.complex128)
        for i, row in enumerate(entries):
            if len(row) != n:
                raise ShapeError("ragged entry list")
            for j, e in enumerate(row):
                for k, v in enumerate(e):
                    c[k, i, j] = as_fraction(v) if exact else v
        return cls(c, exact=exact)

    def entries(self) -> list[list[list]]:
        """Matrix-of-polynomials view: trimmed ascending coefficient lists."""
        out = []
        for i in range(self.rows):
            row = []
            for j in range(self.cols):
                e = list(self.coeffs[:, i, j])
                while e and not e[-1]:
                    e.pop()
                row.append(e)
            out.append(row)
        return out

    def to_numeric(self, dtype=np.complex128) -> "PolyMatrix":
        if not self.exact:
            return PolyMatrix(self.coeffs.astype(dtype))
        return PolyMatrix(np.vectorize(float, otypes=[np.float64])(self.coeffs).astype(dtype)
                          if self.coeffs.size else np.zeros(self.coeffs.shape, dtype=dtype))

    # -- arithmetic sugar -------------------------------------------------
    def __call__(self, x):
        return evaluate(self, x)

    def __matmul__(self, other):
        return mul(self, other)

    def __add__(self, other):
        return _combine(self, other, 1)

    def __sub__(self, other):
        return _combine(self, other, -1)

    def __neg__(self):
        return PolyMatrix(-self.coeffs, exact=self.exact)

    def scale(self, c) -> "PolyMatrix":
        return PolyMatrix(self.coeffs * c, exact=self.exact)

    @property
    def T(self) -> "PolyMatrix":
        return PolyMatrix(np.ascontiguousarray(self.coeffs.transpose(0, 2, 1)), exact=self.exact)


def _common(a: PolyMatrix, b: PolyMatrix):
    if a.exact and b.exact:
        return a.coeffs, b.coeffs, True
    ca = a.to_numeric(np.complex128).coeffs if a.exact else a.coeffs
    cb = b.to_numeric(np.complex128).coeffs if b.exact else b.coeffs
    return ca, cb, False


def _pad_degree(c: np.ndarray, d: int) -> np.ndarray:
    if c.shape[0] >= d + 1:
        return c
    extra = np.zeros((d + 1 - c.shape[0],) + c.shape[1:], dtype=c.dtype)
    if c.dtype == object:
        extra[...] = Fraction(0)
    return np.concatenate([c, extra])


def _combine(a: PolyMatrix, b: PolyMatrix, sign: int) -> PolyMatrix:
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    ca, cb, exact = _common(a, b)
    d = max(ca.shape[0], cb.shape[0]) - 1
    return trim(PolyMatrix(_pad_degree(ca, d) + sign * _pad_degree(cb, d), exact=exact))


@dataclass(frozen=True)
class BlockSpec:
    """Row partition ``m_1, ..., m_k`` of a compound matrix."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise ShapeError("block sizes must be positive")

    @property
    def total(self) -> int:
        return sum(self.sizes)

    def slices(self) -> list[slice]:
        out, start = [], 0
        for s in self.sizes:
            out.append(slice(start, start + s))
            start += s
        return out

    def split(self, P: PolyMatrix) -> list[PolyMatrix]:
        return [P[s, :] for s in self.slices()]


def vstack(blocks: Sequence[PolyMatrix]) -> tuple[PolyMatrix, BlockSpec]:
    """Stack blocks vertically, zero-padding each to the common degree."""
    if not blocks:
        raise ShapeError("vstack needs at least one block")
    n = blocks[0].cols
    if any(b.cols != n for b in blocks):
        raise ShapeError("all blocks must have the same number of columns")
    exact = all(b.exact for b in blocks)
    d = max(b.degree for b in blocks)
    parts = []
    for b in blocks:
        c = b.coeffs if exact or not b.exact else b.to_numeric().coeffs
        parts.append(_pad_degree(c, d))
    coeffs = np.concatenate(parts, axis=1)
    return PolyMatrix(coeffs, exact=exact), BlockSpec(tuple(b.rows for b in blocks))


def evaluate(P: PolyMatrix, x) -> np.ndarray:
    """Horner evaluation ``sum_i P_i x**i``."""
    c = P.coeffs
    if P.exact and isinstance(x, (Fraction, int)):
        acc = np.array(c[-1], dtype=object)
        for k in range(c.shape[0] - 2, -1, -1):
            acc = acc * x + c[k]
        return acc
    if P.exact:
        c = P.to_numeric().coeffs
    acc = np.array(c[-1], dtype=np.result_type(c.dtype, type(x) if isinstance(x, Number) else float))
    for k in range(c.shape[0] - 2, -1, -1):
        acc = acc * x + c[k]
    return acc


def mul(A: PolyMatrix, B: PolyMatrix) -> PolyMatrix:
    """Product by coefficient convolution; the result is trimmed."""
    if A.cols != B.rows:
        raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
    ca, cb, exact = _common(A, B)
    da, db = ca.shape[0] - 1, cb.shape[0] - 1
    dtype = object if exact else np.result_type(ca.dtype, cb.dtype)
    out = np.zeros((da + db + 1, A.rows, B.cols), dtype=dtype)
    if exact:
        out[...] = Fraction(0)
    for i in range(da + 1):
        for j in range(db + 1):
            out[i + j] = out[i + j] + ca[i] @ cb[j] if ca.shape[2] else out[i + j]
    return trim(PolyMatrix(out, exact=exact))


def frob_norm(P: PolyMatrix) -> float:
    """Frobenius norm of the stacked coefficient matrices."""
    c = P.coeffs
    if P.exact:
        return float(np.sqrt(float(sum(x * x for x in c.ravel())))) if c.size else 0.0
    return float(np.linalg.norm(c.ravel()))


def normalize(P: PolyMatrix) -> PolyMatrix:
    nrm = frob_norm(P)
    if nrm == 0.0:
        return P
    if P.exact:
        P = P.to_numeric(np.float64)
    return PolyMatrix(P.coeffs / nrm)


def trim(P: PolyMatrix, tol: float = 0.0) -> PolyMatrix:
    """Drop top coefficients whose norm is ``<= tol * ||P||``.

    With ``tol == 0`` only exactly zero top coefficients are removed.  At
    least the constant coefficient is always kept.
    """
    c = P.coeffs
    d = c.shape[0] - 1
    if P.exact or tol == 0.0:
        while d > 0 and not np.any(c[d] != 0):
            d -= 1
    else:
        thresh = tol * frob_norm(P)
        while d > 0 and np.linalg.norm(c[d]) <= thresh:
            d -= 1
    if d == c.shape[0] - 1:
        return P
    return PolyMatrix(np.array(c[: d + 1]), exact=P.exact)

def _conv_wide(N: np.ndarray, G: np.ndarray, dtype) -> np.ndarray:
    N, G = N.astype(dtype), G.astype(dtype)
    out = np.zeros((N.shape[0] + G.shape[0] - 1, N.shape[1], G.shape[2]), dtype=dtype)
    for i in range(N.shape[0]):
        for j in range(G.shape[0]):
            out[i + j] += N[i] @ G[j]
    return out


def wide_residual(P: np.ndarray, N: np.ndarray, G: np.ndarray) -> np.ndarray:
    wide = np.clongdouble if np.iscomplexobj(P) or np.iscomplexobj(N) else np.longdouble
    NG = _conv_wide(N, G, wide)
    d = max(P.shape[0], NG.shape[0])
    R = np.zeros((d,) + P.shape[1:], dtype=wide)
    R[: P.shape[0]] += P.astype(wide)
    R[: NG.shape[0]] -= NG
    return R



def residual_norm(P: PolyMatrix, N: PolyMatrix, G: PolyMatrix) -> float:
    """``||P - N G||_F``; exact for rational inputs, extended precision otherwise."""
    if N.cols != G.rows or N.rows != P.rows or G.cols != P.cols:
        raise ShapeError(f"incompatible shapes {P.shape}, {N.shape}, {G.shape}")
    if P.exact and N.exact and G.exact:
        return frob_norm(P - mul(N, G))
    num = [X.to_numeric().coeffs if X.exact else X.coeffs for X in (P, N, G)]
    return float(np.linalg.norm(wide_residual(*num).ravel()))
