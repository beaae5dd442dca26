"""Timing comparison of the compiled split kernel vs the numpy fallback.

Both backends are exercised in one process by swapping the kernel entry
point that the tree builder resolves at call time. Results are identical
bit-for-bit (the test suite proves this); only speed differs.

Run: python3 benchmarks/bench_kernels.py [--n 4000] [--p 20] [--trees 30]
"""

import argparse
import time

import numpy as np

from buildtime import _kernels
from buildtime._kernels import split_py
from buildtime.models import RegressorSpec, fit_spec

try:
    from buildtime._kernels import _split as compiled
except ImportError:
    compiled = None


def time_fit(spec, X, y, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fit_spec(spec, X, y)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=4000)
    parser.add_argument("--p", type=int, default=20)
    parser.add_argument("--trees", type=int, default=30)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    X = rng.normal(size=(args.n, args.p))
    y = 3.0 * (X[:, 0] > 0) * X[:, 1] + X[:, 2] ** 2 + rng.normal(size=args.n)

    specs = [
        ("CART", RegressorSpec("CART", {}, 0)),
        ("RF", RegressorSpec("RF", {"n_trees": args.trees}, 0)),
        ("SGB", RegressorSpec("SGB", {"n_trees": args.trees}, 0)),
    ]
    backends = [("python", split_py.scan_sorted)]
    if compiled is not None:
        backends.insert(0, ("compiled", compiled.scan_sorted))
    else:
        print("compiled kernel unavailable; timing the fallback only")

    print(f"n={args.n} p={args.p} trees={args.trees} "
          f"(best of {args.repeats})")
    print(f"{'model':<6} " + " ".join(f"{name:>10}" for name, _ in backends)
          + ("    speedup" if len(backends) == 2 else ""))
    original = _kernels.scan_sorted
    try:
        for label, spec in specs:
            times = []
            for _, kernel in backends:
                _kernels.scan_sorted = kernel
                times.append(time_fit(spec, X, y, args.repeats))
            row = f"{label:<6} " + " ".join(f"{t:>9.3f}s" for t in times)
            if len(times) == 2:
                row += f"    {times[1] / times[0]:>6.2f}x"
            print(row)
    finally:
        _kernels.scan_sorted = original


if __name__ == "__main__":
    main()
