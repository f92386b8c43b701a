"""Time the compiled kernels against the pure-Python ones.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

Prints one line per workload with the best time of each backend and the
speedup.  Outputs of the two backends are checked for equality first.
"""
from __future__ import annotations

import argparse
import random
import sys
import timeit

from matquad import _kernels_py

try:
    from matquad import _ckernels
except ImportError:
    _ckernels = None


def int_matrix(rng, rows, cols, bound=50):
    return [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)]


def low_rank(rng, rows, cols, r):
    a, b = int_matrix(rng, rows, r, 9), int_matrix(rng, r, cols, 9)
    return [[sum(a[i][k] * b[k][j] for k in range(r)) for j in range(cols)] for i in range(rows)]


def pencil(rng, size, deg):
    """Integer matrix polynomial with random coefficients of degree ``deg``."""
    def entry():
        c = [rng.randint(-9, 9) for _ in range(deg + 1)]
        while c and c[-1] == 0:
            c.pop()
        return c

    return [[entry() for _ in range(size)] for _ in range(size)]


def workloads(rng):
    yield "echelon 20x20 full", "echelon", (int_matrix(rng, 20, 20), 20)
    yield "echelon 40x40 full", "echelon", (int_matrix(rng, 40, 40), 40)
    yield "echelon 60x60 rank 30", "echelon", (low_rank(rng, 60, 60, 30), 60)
    yield "poly_det 6x6 deg 2", "poly_det", (pencil(rng, 6, 2),)
    yield "poly_det 10x10 deg 1", "poly_det", (pencil(rng, 10, 1),)
    yield "poly_det 12x12 deg 2", "poly_det", (pencil(rng, 12, 2),)


def best(fn, args, repeat):
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.2 and number < 1000:
        number *= 2
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels are not built; reinstall with Cython available", file=sys.stderr)
        return 1
    rng = random.Random(args.seed)
    print(f"{'workload':<24}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, fn, fargs in workloads(rng):
        py, cy = getattr(_kernels_py, fn), getattr(_ckernels, fn)
        if py(*fargs) != cy(*fargs):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 2
        tp, tc = best(py, fargs, args.repeat), best(cy, fargs, args.repeat)
        print(f"{name:<24}{tp * 1e3:>14.3f}{tc * 1e3:>14.3f}{tp / tc:>9.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
