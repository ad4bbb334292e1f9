"""Compare the numba and numpy kernels on solver-sized problems.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both backends are imported directly, so the result does not depend on
AMPCAP_DISABLE_NUMBA.  The first numba call (compilation) is excluded.
"""

import argparse
import time

import numpy as np

from ampcap import kernels
from ampcap._backend import HAVE_NUMBA


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(A=10.0, K=11, seed=0):
    rng = np.random.default_rng(seed)
    points = np.sort(rng.uniform(-A, A, K))
    weights = rng.dirichlet(np.ones(K))
    logw = np.log(weights)
    y = np.linspace(-A - 11.0, A + 11.0, 20001)
    h = y[1] - y[0]
    vals = kernels.mixture_logpdf_np(y, points, logw)
    xs = np.linspace(-A, A, 2001)
    return {
        "mixture_logpdf": ((y, points, logw), "mixture_logpdf"),
        "mixture_pdf": ((y, points, weights), "mixture_pdf"),
        "gauss_smooth": ((xs, y[0], h, vals, 11.0), "gauss_smooth"),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy kernels can run")
    print(f"{'kernel':<16}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max |diff|':>14}")
    for name, (call_args, base) in cases().items():
        f_np = getattr(kernels, base + "_np")
        f_nb = getattr(kernels, base + "_nb")
        t_np = best_of(lambda: f_np(*call_args), args.repeat)
        r_np = f_np(*call_args)
        if HAVE_NUMBA:
            r_nb = f_nb(*call_args)  # compile
            t_nb = best_of(lambda: f_nb(*call_args), args.repeat)
            diff = max(float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
                       for a, b in zip(np.atleast_2d(r_np), np.atleast_2d(r_nb)))
            print(f"{name:<16}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}"
                  f"{t_np / t_nb:>10.1f}{diff:>14.2e}")
        else:
            print(f"{name:<16}{1e3 * t_np:>12.2f}{'-':>12}{'-':>10}{'-':>14}")


if __name__ == "__main__":
    main()
