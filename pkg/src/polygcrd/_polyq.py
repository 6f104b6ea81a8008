"""Scalar polynomial kernels over the rationals (pure-Python backend).

A polynomial is a list of :class:`fractions.Fraction` coefficients in
ascending degree order with no trailing zeros; the zero polynomial is the
empty list.  ``_polyq_ext`` mirrors every function here with the same
signature.
"""
from fractions import Fraction

__all__ = [
    "ptrim", "padd", "psub", "pneg", "pscale", "pmul", "pdivmod",
    "pgcd", "pmonic", "paxpy", "pdeg",
]


def ptrim(a):
    n = len(a)
    while n and not a[n - 1]:
        n -= 1
    return list(a[:n])


def pdeg(a):
    return len(a) - 1


def padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i in range(len(b)):
        out[i] = out[i] + b[i]
    return ptrim(out)


def pneg(a):
    return [-c for c in a]


def psub(a, b):
    na, nb = len(a), len(b)
    out = list(a) + [Fraction(0)] * max(0, nb - na)
    for i in range(nb):
        out[i] = out[i] - b[i]
    return ptrim(out)


def pscale(a, c):
    if not c:
        return []
    return [c * x for x in a]


def pmul(a, b):
    na, nb = len(a), len(b)
    if not na or not nb:
        return []
    out = [Fraction(0)] * (na + nb - 1)
    for i in range(na):
        ai = a[i]
        if not ai:
            continue
        for j in range(nb):
            out[i + j] += ai * b[j]
    return ptrim(out)


def paxpy(y, c, x, shift=0):
    """Return ``y - c * lambda**shift * x`` (the row-reduction update)."""
    if not c or not x:
        return list(y)
    n = max(len(y), len(x) + shift)
    out = list(y) + [Fraction(0)] * (n - len(y))
    for j in range(len(x)):
        out[j + shift] -= c * x[j]
    return ptrim(out)


def pdivmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    nb = len(b)
    if len(r) < nb:
        return [], ptrim(r)
    inv = 1 / Fraction(b[-1])
    q = [Fraction(0)] * (len(r) - nb + 1)
    for k in range(len(r) - nb, -1, -1):
        c = r[k + nb - 1] * inv
        q[k] = c
        if c:
            for j in range(nb):
                r[k + j] -= c * b[j]
    return ptrim(q), ptrim(r[:nb - 1])


def pmonic(a):
    if not a:
        return []
    lc = a[-1]
    if lc == 1:
        return list(a)
    inv = 1 / Fraction(lc)
    return [c * inv for c in a]


def pgcd(a, b):
    """Monic gcd; ``pgcd([], []) == []``."""
    a, b = ptrim(a), ptrim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return pmonic(a)
