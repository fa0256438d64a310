"""Compiled kernels against the interpreted fallback.

    python3 benchmarks/bench_kernels.py [--order 150] [--repeat 1]

Times the exact recursion for the weak series and the evaluation of the
rho-polynomial table at one point, the two loops that dominate a K = 150 run.
"""
import argparse
import timeit

import gmpy2
import mpmath

from cubicsum import _kernels_py, kernels
from cubicsum.odm import build_rho_polynomials
from cubicsum.perturbation import weak_coefficients
from cubicsum.precision import digits_for_order


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--order", type=int, default=150)
    parser.add_argument("--repeat", type=int, default=1)
    args = parser.parse_args()
    K = args.order
    if kernels.BACKEND != "compiled":
        raise SystemExit("compiled extension not importable; build it with pip install -e . --no-build-isolation")

    mpmath.mp.dps = digits_for_order(K)
    prec = mpmath.mp.prec + 20
    polys = build_rho_polynomials(weak_coefficients(0, K + 1), "a", K)
    rows = polys._mpfr_rows(prec)
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        x = gmpy2.mpfr("0.0123456789")

    cases = [
        (f"bender_wu(level=0, order={2 * K})", lambda m: m.bender_wu(0, 2 * K)),
        (f"horner_rows(K={K}, {prec} bits)", lambda m: m.horner_rows(rows, x, prec)),
    ]
    print(f"{'kernel':40s} {'compiled [s]':>13s} {'python [s]':>11s} {'speed-up':>9s}")
    for name, call in cases:
        fast = best(lambda: call(kernels), args.repeat)
        slow = best(lambda: call(_kernels_py), args.repeat)
        print(f"{name:40s} {fast:13.4f} {slow:11.4f} {slow / fast:9.1f}")


if __name__ == "__main__":
    main()
