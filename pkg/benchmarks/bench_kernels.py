"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--samples N] [--repeat R]
"""

import argparse
import importlib
import math
import timeit

from hyperbit import _fallback
from hyperbit.rng import derive_key


def cases(samples):
    key = derive_key(1)
    r = 1 / math.sqrt(2)
    return {
        "mc_weights": lambda m: m.mc_weights(0.3, 0.2, 0.3, 0.8, samples, key, True),
        "mc_pw": lambda m: m.mc_pw(-0.4, 0.3, 1, 0.2, samples, key, False),
        "gap_grid(2000)": lambda m: m.gap_grid(r, r, -1.0, math.sqrt(2) - 1, 2000),
        "simplex_grid_search(1e-3)": lambda m: m.simplex_grid_search(0.6, 0.45, 1000, 1e-3),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    try:
        compiled = importlib.import_module("hyperbit._kernels")
    except ImportError:
        compiled = None
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':28s} {'python (s)':>11s} {'compiled (s)':>13s} {'speedup':>8s}")
    for name, fn in cases(args.samples).items():
        t_py = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat))
        if compiled is None:
            print(f"{name:28s} {t_py:11.4f} {'-':>13s} {'-':>8s}")
            continue
        assert fn(compiled) == fn(_fallback), name
        t_c = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat))
        print(f"{name:28s} {t_py:11.4f} {t_c:13.4f} {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
