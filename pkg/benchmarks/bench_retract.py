"""Compare the compiled and pure-Python retraction kernels.

    python benchmarks/bench_retract.py [--depths 10 14 18] [--repeat 3]
"""
import argparse
import time

import numpy as np

from fiberlib import _kernels_py, kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depths", type=int, nargs="+", default=[10, 14, 18])
    ap.add_argument("--density", type=float, default=0.05, help="fraction of addresses that are planted")
    ap.add_argument("--queries", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    try:
        from fiberlib import _kernels as compiled
    except ImportError:
        compiled = None
    print(f"active backend: {kernels.BACKEND}")
    if compiled is None:
        print("compiled extension not built; timing the fallback only")
    g = np.random.default_rng(0)
    header = f"{'depth':>5} {'planted':>8} {'op':>14} {'python s':>10} {'cython s':>10} {'speedup':>8}"
    print(header)
    for depth in args.depths:
        size = 1 << depth
        planted = np.sort(g.choice(size, size=max(1, int(size * args.density)), replace=False)).astype(np.int64)
        queries = g.integers(0, size, size=args.queries).astype(np.int64)
        ops = {
            "nearest_table": lambda m: m.nearest_table(planted, depth),
            "retract_many": lambda m: m.retract_many(queries, planted, depth),
        }
        for name, op in ops.items():
            tp, outp = best_of(lambda: op(_kernels_py), args.repeat)
            if compiled is not None:
                tc, outc = best_of(lambda: op(compiled), args.repeat)
                assert np.array_equal(outp, outc), f"backends disagree on {name} at depth {depth}"
                print(f"{depth:>5} {len(planted):>8} {name:>14} {tp:>10.4f} {tc:>10.4f} {tp / tc:>7.1f}x")
            else:
                print(f"{depth:>5} {len(planted):>8} {name:>14} {tp:>10.4f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
