"""Compare the numba and numpy kernels behind the two statistics.

Usage::

    python benchmarks/bench_kernels.py [--sizes 50,100,500,1000] [--repeat 5]

Times are the best of ``--repeat`` runs per call, after one warm-up call so
numba compilation is excluded.
"""

import argparse
import time

import numpy as np

from paretogof import _kernels
from paretogof.distributions import pareto_sample


def best_time(fn, x, w, repeat):
    fn(x, w)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn(x, w)
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--sizes", default="50,100,500,1000")
    parser.add_argument("--k", type=int, default=3)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    kernels = {"integral": ("integral_count_numpy", "integral_count_numba"),
               "sup": ("sup_scan_numpy", "sup_scan_numba")}
    if not _kernels.HAVE_NUMBA:
        print("numba not installed; timing the numpy kernels only")

    print(f"{'kernel':<10}{'n':>6}{'numpy [ms]':>14}{'numba [ms]':>14}{'speed-up':>10}")
    for n in (int(s) for s in args.sizes.split(",")):
        x = np.sort(pareto_sample(n, 1.0, seed=n))
        w = _kernels.pair_weights(n, args.k)
        for name, (np_name, nb_name) in kernels.items():
            t_np = best_time(getattr(_kernels, np_name), x, w, args.repeat)
            nb = getattr(_kernels, nb_name)
            if nb is None:
                print(f"{name:<10}{n:>6}{1e3 * t_np:>14.3f}{'-':>14}{'-':>10}")
                continue
            t_nb = best_time(nb, x, w, args.repeat)
            print(f"{name:<10}{n:>6}{1e3 * t_np:>14.3f}{1e3 * t_nb:>14.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
