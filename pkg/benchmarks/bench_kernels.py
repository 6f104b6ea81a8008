"""Compare the compiled and pure-Python rational polynomial kernels.

Part 1 times the kernels directly from both modules.  Part 2 times Smith
forms end to end in two subprocesses, one with POLYGCRD_PURE_PYTHON=1.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import os
import subprocess
import sys
import timeit
from fractions import Fraction

import numpy as np

from polygcrd import _polyq

try:
    from polygcrd import _polyq_ext
except ImportError:
    _polyq_ext = None


def random_polys(rng, count, deg):
    return [[Fraction(int(x), int(y)) for x, y in zip(rng.integers(-9, 10, deg + 1),
                                                      rng.integers(1, 6, deg + 1))]
            for _ in range(count)]


def kernel_workload(mod, polys):
    acc = []
    for a, b in zip(polys[::2], polys[1::2]):
        p = mod.pmul(a, b)
        q, r = mod.pdivmod(p, mod.padd(b, a))
        acc.append(mod.pgcd(mod.pmul(a, q), mod.pmul(b, q)))
    return acc


END_TO_END = """
import time, numpy as np
from polygcrd import BACKEND, PolyMatrix, smith_form
rng = np.random.default_rng(7)
mats = [PolyMatrix(rng.integers(-3, 4, (3, 4, 4)).astype(object), exact=True) for _ in range({count})]
t = time.perf_counter()
for M in mats:
    smith_form(M)
print(BACKEND, time.perf_counter() - t)
"""


def end_to_end(pure: bool, count: int) -> tuple[str, float]:
    env = dict(os.environ)
    if pure:
        env["POLYGCRD_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", END_TO_END.format(count=count)],
                         env=env, capture_output=True, text=True, check=True).stdout.split()
    return out[0], float(out[1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--count", type=int, default=20, help="matrices for the end-to-end run")
    args = ap.parse_args()

    polys = random_polys(np.random.default_rng(0), 200, 6)
    print("kernels (pmul/pdivmod/pgcd on 100 pairs of degree-6 rationals)")
    base = min(timeit.repeat(lambda: kernel_workload(_polyq, polys), number=1, repeat=args.repeat))
    print(f"  python  {base * 1e3:9.2f} ms")
    if _polyq_ext is None:
        print("  cython  (extension not built)")
    else:
        assert kernel_workload(_polyq_ext, polys) == kernel_workload(_polyq, polys)
        t = min(timeit.repeat(lambda: kernel_workload(_polyq_ext, polys), number=1, repeat=args.repeat))
        print(f"  cython  {t * 1e3:9.2f} ms   speedup {base / t:5.2f}x")

    print(f"smith_form on {args.count} random 4x4 degree-2 integer matrices")
    for pure in (True, False):
        name, t = end_to_end(pure, args.count)
        print(f"  {name:7s} {t * 1e3:9.2f} ms")


if __name__ == "__main__":
    main()
