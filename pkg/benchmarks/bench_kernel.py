"""Compiled vs numpy erasure-recoverability kernel.

Times one block of erasure samples per backend and m, after checking that
both backends return identical indicator matrices.

    python3 benchmarks/bench_kernel.py --m 6 7 8 --block 4096
"""

import argparse
import time

import numpy as np

from rmpolar import kernel
from rmpolar.montecarlo import erasure_block, rm_rows


def time_backend(fn, rows, masks, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(rows, masks)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, nargs="+", default=[6, 7, 8])
    ap.add_argument("--block", type=int, default=4096, help="samples per timed block")
    ap.add_argument("--epsilon", type=float, default=0.4)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if "compiled" not in kernel.BACKENDS:
        print("compiled kernel unavailable; timing the numpy fallback only")
    print(f"{'m':>3} {'backend':>9} {'seconds':>10} {'samples/s':>12} {'speedup':>8}")
    for m in args.m:
        n = 1 << m
        rows = rm_rows(m)
        erased = erasure_block(n, args.epsilon, args.block, np.random.default_rng(args.seed))
        masks = kernel.pack_bool(~erased)
        results = {name: time_backend(fn, rows, masks, args.repeat) for name, fn in kernel.BACKENDS.items()}
        outs = [out for _, out in results.values()]
        if any(not np.array_equal(o, outs[0]) for o in outs[1:]):
            raise SystemExit(f"backends disagree at m={m}")
        base = results["python"][0]
        for name, (sec, _) in results.items():
            print(f"{m:>3} {name:>9} {sec:>10.4f} {args.block / sec:>12.0f} {base / sec:>7.1f}x")


if __name__ == "__main__":
    main()
