import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polygcrd import _polyq, kernels

try:
    from polygcrd import _polyq_ext
except ImportError:  # extension not built
    _polyq_ext = None

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=7)
polys = st.lists(fracs, max_size=6)

needs_ext = pytest.mark.skipif(_polyq_ext is None, reason="compiled extension not built")


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    if _polyq_ext is not None:
        assert kernels.BACKEND == "cython"


def test_pure_python_env_override():
    env = dict(os.environ, POLYGCRD_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import polygcrd; print(polygcrd.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_reference_values():
    F = Fraction
    a = [F(1), F(1)]                      # 1 + x
    b = [F(-1), F(0), F(1)]               # x^2 - 1
    assert _polyq.pmul(a, a) == [F(1), F(2), F(1)]
    assert _polyq.pdivmod(b, a) == ([F(-1), F(1)], [])
    assert _polyq.pgcd(b, _polyq.pmul(a, a)) == [F(1), F(1)]
    assert _polyq.paxpy([F(1)], F(2), [F(1)], 2) == [F(1), F(0), F(-2)]
    assert _polyq.ptrim([F(1), F(0)]) == [F(1)] and _polyq.pdeg([]) == -1


@needs_ext
@settings(max_examples=200, deadline=None)
@given(polys, polys, fracs, st.integers(0, 3))
def test_backends_agree(a, b, c, k):
    P, C = _polyq, _polyq_ext
    a, b = P.ptrim(list(a)), P.ptrim(list(b))
    assert C.ptrim(list(a) + [Fraction(0)]) == a
    assert C.padd(a, b) == P.padd(a, b)
    assert C.psub(a, b) == P.psub(a, b)
    assert C.pmul(a, b) == P.pmul(a, b)
    assert C.pscale(a, c) == P.pscale(a, c)
    assert C.paxpy(a, c, b, k) == P.paxpy(a, c, b, k)
    assert C.pneg(a) == P.pneg(a)
    assert C.pgcd(a, b) == P.pgcd(a, b)
    if b:
        assert C.pdivmod(a, b) == P.pdivmod(a, b)
        assert C.pmonic(b) == P.pmonic(b)


@settings(max_examples=100, deadline=None)
@given(polys, polys.filter(lambda p: any(p)))
def test_division_identity(a, b):
    P = _polyq
    a, b = P.ptrim(list(a)), P.ptrim(list(b))
    q, r = P.pdivmod(a, b)
    assert P.padd(P.pmul(q, b), r) == a
    assert P.pdeg(r) < P.pdeg(b)


def test_pure_python_exact_engine_matches():
    code = (
        "import numpy as np, polygcrd\n"
        "from polygcrd import PolyMatrix, smith_form, hermite_form\n"
        "rng = np.random.default_rng(1)\n"
        "M = PolyMatrix(rng.integers(-3, 4, (3, 3, 3)).astype(object), exact=True)\n"
        "print(polygcrd.BACKEND, repr(smith_form(M).S.entries()), repr(hermite_form(M).H.entries()))\n"
    )
    outs = []
    for pure in ("1", "0"):
        env = dict(os.environ, POLYGCRD_PURE_PYTHON=pure)
        outs.append(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                   text=True, check=True).stdout.split(" ", 1))
    assert outs[0][0] == "python"
    assert outs[0][1] == outs[1][1]
