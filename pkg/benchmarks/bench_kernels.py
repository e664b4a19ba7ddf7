"""Compare the compiled and pure-Python elimination kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints the best-of-N time per workload for each backend and the speedup.
Outputs of the two backends are compared before timing.
"""

import argparse
import timeit

import numpy as np

from nilalg import _kernels_py

try:
    from nilalg import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def workloads(rng):
    # (label, kernel name, args): shapes typical of wedge-space and enumeration calls
    out = []
    for p, r, c in ((3, 6, 15), (3, 15, 45), (5, 30, 66), (11, 40, 78)):
        out.append((f"rref p={p} {r}x{c}", "rref", (rng.integers(0, p, (r, c)), p)))
    for p, b, r, c in ((3, 2000, 4, 15), (3, 500, 10, 36), (7, 200, 12, 28)):
        out.append((f"batch_rank p={p} {b}x{r}x{c}", "batch_rank", (rng.integers(0, p, (b, r, c)), p)))
    return out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; timing the Python backend only")
    rng = np.random.default_rng(args.seed)
    print(f"{'workload':34} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for label, name, call_args in workloads(rng):
        py = getattr(_kernels_py, name)
        t_py = min(timeit.repeat(lambda: py(*call_args), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{label:34} {t_py:10.2f} {'-':>10} {'-':>8}")
            continue
        cy = getattr(_ckernels, name)
        if not same(py(*call_args), cy(*call_args)):
            raise SystemExit(f"{label}: backends disagree")
        t_cy = min(timeit.repeat(lambda: cy(*call_args), number=1, repeat=args.repeat)) * 1e3
        print(f"{label:34} {t_py:10.2f} {t_cy:10.2f} {t_py / t_cy:7.1f}x")


if __name__ == "__main__":
    main()
