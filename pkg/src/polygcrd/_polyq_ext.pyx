# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``polygcrd._polyq``; identical semantics."""
from fractions import Fraction
from math import gcd

cdef object ZERO = Fraction(0)


cpdef list ptrim(list a):
    cdef Py_ssize_t n = len(a)
    while n and not a[n - 1]:
        n -= 1
    return a[:n]


cpdef Py_ssize_t pdeg(list a):
    return len(a) - 1


cpdef list padd(list a, list b):
    cdef Py_ssize_t i
    cdef list out
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i in range(len(b)):
        out[i] = out[i] + b[i]
    return ptrim(out)


cpdef list pneg(list a):
    return [-c for c in a]


cpdef list psub(list a, list b):
    cdef Py_ssize_t i, na = len(a), nb = len(b)
    cdef list out = list(a)
    if nb > na:
        out.extend([ZERO] * (nb - na))
    for i in range(nb):
        out[i] = out[i] - b[i]
    return ptrim(out)


cpdef list pscale(list a, object c):
    if not c:
        return []
    return [c * x for x in a]


cdef tuple _integer_form(list a):
    """``(numerators over a common denominator, denominator)``."""
    cdef object den = 1, x
    for x in a:
        den = den * x.denominator // gcd(den, x.denominator)
    return [x.numerator * (den // x.denominator) for x in a], den


cpdef list pmul(list a, list b):
    # integer convolution, one normalisation per output coefficient
    cdef Py_ssize_t i, j, na = len(a), nb = len(b)
    cdef list A, B, out
    cdef object da, db, ai, den
    if not na or not nb:
        return []
    A, da = _integer_form(a)
    B, db = _integer_form(b)
    out = [0] * (na + nb - 1)
    for i in range(na):
        ai = A[i]
        if not ai:
            continue
        for j in range(nb):
            out[i + j] += ai * B[j]
    den = da * db
    return ptrim([Fraction(c, den) for c in out])


cpdef list paxpy(list y, object c, list x, Py_ssize_t shift=0):
    cdef Py_ssize_t j, n, ny = len(y), nx = len(x)
    cdef list out
    if not c or not nx:
        return list(y)
    n = max(ny, nx + shift)
    out = list(y)
    if n > ny:
        out.extend([ZERO] * (n - ny))
    for j in range(nx):
        out[j + shift] = out[j + shift] - c * x[j]
    return ptrim(out)


cpdef tuple pdivmod(list a, list b):
    # fraction-free elimination: the remainder is kept as R / D with integer R
    cdef Py_ssize_t k, j, nb = len(b), nr
    cdef list R, B, q
    cdef object D, db, lead, top, g, x
    if not nb:
        raise ZeroDivisionError("polynomial division by zero")
    nr = len(a)
    if nr < nb:
        return [], ptrim(list(a))
    R, D = _integer_form(a)
    B, db = _integer_form(b)
    lead = B[nb - 1]
    q = [ZERO] * (nr - nb + 1)
    for k in range(nr - nb, -1, -1):
        top = R[k + nb - 1]
        if not top:
            continue
        q[k] = Fraction(top * db, D * lead)
        for j in range(k + nb):
            R[j] = R[j] * lead
        for j in range(nb):
            R[k + j] = R[k + j] - top * B[j]
        D = D * lead
        g = D
        for x in R:
            if g == 1:
                break
            g = gcd(g, x)
        if g != 1:
            R = [x // g for x in R]
            D = D // g
    return ptrim(q), ptrim([Fraction(x, D) for x in R[:nb - 1]])


cpdef list pmonic(list a):
    cdef object inv
    if not a:
        return []
    if a[len(a) - 1] == 1:
        return list(a)
    inv = 1 / Fraction(a[len(a) - 1])
    return [c * inv for c in a]


cpdef list pgcd(list a, list b):
    a = ptrim(a)
    b = ptrim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return pmonic(a)
