"""Compare the compiled and pure-Python coefficient kernels.

Times ``k_table`` (every coefficient of one output density matrix) for each
backend and reports the largest relative disagreement between them.

    python benchmarks/bench_kernels.py --nmax 10 20 40 --repeat 5
"""

import argparse
import sys
import time

import numpy as np

from tmsvchannel import _pykernels

try:
    from tmsvchannel import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nmax", type=int, nargs="+", default=[8, 16, 32])
    p.add_argument("--q", type=float, default=0.6)
    p.add_argument("--t1", type=float, default=0.9)
    p.add_argument("--t2", type=float, default=0.7)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    if _ckernels is None:
        print("compiled kernels are not built; only the Python backend is available")
    q2, t1, t2 = args.q**2, args.t1**2, args.t2**2
    print(f"{'n_max':>6} {'python [s]':>12} {'cython [s]':>12} {'speedup':>8} {'max rel diff':>13}")
    for n_max in args.nmax:
        py_best = best_of(lambda: _pykernels.k_table(q2, t1, t2, n_max), args.repeat)
        row = f"{n_max:>6} {py_best:>12.4g}"
        if _ckernels is not None:
            c_best = best_of(lambda: _ckernels.k_table(q2, t1, t2, n_max, 1e-14, 10000), args.repeat)
            a = _pykernels.k_table(q2, t1, t2, n_max)
            b = np.asarray(_ckernels.k_table(q2, t1, t2, n_max, 1e-14, 10000))
            mask = a != 0
            diff = float(np.max(np.abs(a[mask] - b[mask]) / np.abs(a[mask]))) if mask.any() else 0.0
            row += f" {c_best:>12.4g} {py_best / c_best:>8.1f} {diff:>13.2e}"
        print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
