"""Time the compiled fiber-chart kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from grreduce import _backend
from grreduce.reduction import fiber_chart, random_base


def cases():
    for n, k in ((3, 2), (4, 3), (6, 5)):
        chart = fiber_chart(random_base(n, k, seed=n))
        c = np.full(k, 0.5 / k)
        yield f"n={n} k={k}", chart.normals, c


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=2000)
    args = parser.parse_args()
    impls = _backend.available()
    if "cython" not in impls:
        print("compiled kernels not built; only the fallback is available")
    rng = np.random.default_rng(0)
    print(f"{'case':<10} {'kernel':<14} " + " ".join(f"{name:>12}" for name in impls) + "   speedup")
    for label, normals, c in cases():
        r = rng.uniform(0.1, 2.0, size=len(c))
        rb = rng.uniform(0.1, 2.0, size=(1000, len(c)))
        x0 = np.log(c / (1 - c.sum()))
        jobs = {
            "moments": lambda m: m.chart_moments(normals, r),
            "jacobian": lambda m: m.chart_jacobian(normals, r),
            "batch1000": lambda m: m.chart_moments_batch(normals, rb),
            "newton": lambda m: m.newton_moduli(normals, c, x0),
        }
        for kname, fn in jobs.items():
            reps = args.repeat // 100 if kname == "batch1000" else args.repeat
            times = {name: timeit.timeit(lambda m=m: fn(m), number=reps) / reps for name, m in impls.items()}
            speed = times["python"] / times["cython"] if "cython" in times else 1.0
            cols = " ".join(f"{times[name] * 1e6:10.2f}us" for name in impls)
            print(f"{label:<10} {kname:<14} {cols}   {speed:6.1f}x")


if __name__ == "__main__":
    main()
