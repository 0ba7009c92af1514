"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel is timed with timeit on inputs of the size the simulator uses
(n_max = 12, a 64-outcome chunk of conditional states, the teleportation
Hermite tables) and the outputs of both backends are compared.
"""
import argparse
import timeit

import numpy as np

from optodistill.kernels import load_backend


def cases(rng):
    d = 13
    amp = rng.normal(size=(64, d, d, d)) + 1j * rng.normal(size=(64, d, d, d))
    x = np.linspace(-8, 8, 15)
    return {
        "hermite_functions(40, 15 pts)": lambda k: k.hermite_functions(40, x),
        "hermite_polys(30, x)": lambda k: k.hermite_polys(30, 0.37),
        "eq6_sums(12, 20)": lambda k: k.eq6_sums(12, 20, 0.3, -0.2),
        "scatter_two_mode(64 x 13^3)": lambda k: k.scatter_two_mode(amp),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    py = load_backend("python")
    try:
        cy = load_backend("compiled")
    except ImportError:
        print("compiled backend not built; only timing the fallback")
        cy = None
    rng = np.random.default_rng(0)
    print(f"{'kernel':32s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s} {'max |diff|':>11s}")
    for name, fn in cases(rng).items():
        number = 3
        t_py = min(timeit.repeat(lambda: fn(py), number=number, repeat=args.repeat)) / number
        if cy is None:
            print(f"{name:32s} {t_py * 1e3:12.3f}")
            continue
        t_cy = min(timeit.repeat(lambda: fn(cy), number=number, repeat=args.repeat)) / number
        a, b = np.asarray(fn(py)), np.asarray(fn(cy))
        scale = max(np.max(np.abs(a)), 1e-300)
        diff = float(np.max(np.abs(a - b)) / scale)
        print(f"{name:32s} {t_py * 1e3:12.3f} {t_cy * 1e3:14.3f} {t_py / t_cy:8.1f}x {diff:11.1e}")


if __name__ == "__main__":
    main()
