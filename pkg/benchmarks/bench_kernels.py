"""Time the numba kernels against the numpy fallback and check they agree.

    python3 benchmarks/bench_kernels.py [--sizes 100000 1000000 10000000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from dioseries import kernels
from dioseries.angles import SeriesKind, fixed_point
from dioseries.series import _residue_table


def _best(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(sizes, repeat):
    fp = fixed_point("const:golden", max(sizes))
    logb, lrad, sgn = _residue_table(SeriesKind.SIN, 1, 3)
    cases = {
        "angle_sum(golden, cos)": lambda be, n: be.angle_sum(fp.limbs, fp.err, True, True, 0.75, 0.0, 1, n + 1),
        "periodic_sum(1/3, sin)": lambda be, n: be.periodic_sum(logb, lrad, sgn, 1.0, 0.0, 1, n + 1),
    }
    backends = {"numpy": kernels.get_backend("numpy")}
    if kernels.numba_available():
        nb = kernels.get_backend("numba")
        # compile outside the timed region
        for fn in cases.values():
            fn(nb, 10)
        backends["numba"] = nb
    print(f"{'case':26s} {'N':>10s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup   |diff|/bound")
    for name, fn in cases.items():
        for n in sizes:
            res = {b: _best(lambda: fn(be, n), repeat) for b, be in backends.items()}
            times = " ".join(f"{res[b][0]:10.4f}" for b in backends)
            if "numba" in res:
                a, b = res["numba"][1], res["numpy"][1]
                diff = abs(a[0] - b[0]) / (a[1] + a[2] + b[1] + b[2])
                speed = res["numpy"][0] / res["numba"][0]
                print(f"{name:26s} {n:10d} {times}   {speed:7.2f}x  {diff:.3g}")
            else:
                print(f"{name:26s} {n:10d} {times}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10**5, 10**6, 10**7])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    np.seterr(all="ignore")
    run(args.sizes, args.repeat)


if __name__ == "__main__":
    main()
