"""Compare the compiled and pure-Python kernels on family workloads.

    python benchmarks/bench_kernels.py [--repeat R]

Both backends are imported directly, so one process times both.  Results are
checked for equality before timing.
"""

import argparse
import time

from vdpkit import _pykernels as py
from vdpkit.family import build_pn
from vdpkit.groebner import _to_int_terms, buchberger
from vdpkit.poly import DEGREVLEX

try:
    from vdpkit import _ckernels as cy
except ImportError:
    cy = None


def workloads():
    p7, p8 = build_pn(7), build_pn(8)
    a, b = dict(p7.embed(8).items()), dict(p8.items())
    yield "mul p7*p8", lambda k: k.mul_terms(a, b)
    sq = py.mul_terms(b, b)
    yield "mul p8^2*p8", lambda k: k.mul_terms(sq, b)

    p = build_pn(6)
    # reduce a dense product against a reduced basis of (p_6, dp_6/dz_6)
    H = buchberger([p, p.diff(6)], DEGREVLEX)
    basis = []
    for g in H.basis:
        t = _to_int_terms(g)
        lead = max(t, key=DEGREVLEX.key)
        basis.append((lead, t[lead], [(e, c) for e, c in t.items() if e != lead]))
    target = _to_int_terms(p * p * p.diff(3))
    yield "reduce (p6^2 dp6) mod G", lambda k: k.reduce_int(target, basis, DEGREVLEX.negkey)


def end_to_end(repeat):
    """Wall time of the smoothness certificates n = 3..6 under each backend."""
    import os
    import subprocess
    import sys

    code = ("import time; from vdpkit.family import check_smooth; t=time.perf_counter(); "
            "[check_smooth(n) for n in range(3, 7)]; print(time.perf_counter()-t)")
    out = {}
    for name, env in (("python", {"VDPKIT_PURE_PYTHON": "1"}), ("cython", {})):
        runs = [float(subprocess.check_output([sys.executable, "-c", code],
                                              env={**os.environ, **env}, text=True))
                for _ in range(repeat)]
        out[name] = min(runs)
    return out


def bench(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled kernels not built; nothing to compare")
        return 1
    print(f"{'workload':28s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, fn in workloads():
        if fn(py) != fn(cy):
            raise SystemExit(f"backends disagree on {name}")
        tp, tc = bench(lambda: fn(py), args.repeat), bench(lambda: fn(cy), args.repeat)
        print(f"{name:28s} {tp:11.4f} {tc:11.4f} {tp / tc:7.2f}x")
    e = end_to_end(max(1, args.repeat // 2))
    print(f"{'smooth certificates n=3..6':28s} {e['python']:11.4f} {e['cython']:11.4f} "
          f"{e['python'] / e['cython']:7.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
