#!/usr/bin/env python3
"""Benchmark the subset-DP kernel: compiled extension vs numpy fallback.

The DP fill is the package's hot loop (2^n table entries, n set-bit probes
each). Both backends consume the same precomputed norm table and produce
bit-identical results; this script times the fill alone and the full oracle
call, best of ``--repeats`` runs.

    python benchmarks/bench_dp.py --sizes 10 14 16 18 --repeats 5 [--csv out.csv]
"""

import argparse
import time

import numpy as np

from steinitz import Gauge, philox_generator
from steinitz.kernels import available_backends, fill_g, subset_norm_table


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 12, 14, 16, 18])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    rng = philox_generator(args.seed)
    rows = []
    header = f"{'n':>4} {'table':>12}" + "".join(f" {b + ' fill':>14}" for b in backends)
    if len(backends) == 2:
        header += f" {'speedup':>9}"
    print(header)
    for n in args.sizes:
        vectors = rng.standard_normal((n, 4)) * 0.5
        t_table = best_of(lambda: subset_norm_table(vectors, Gauge(2.0), False), args.repeats)
        norms = subset_norm_table(vectors, Gauge(2.0), False)
        times = {}
        results = {}
        for b in backends:
            times[b] = best_of(lambda b=b: fill_g(norms, n, backend=b), args.repeats)
            results[b] = fill_g(norms, n, backend=b)
        if len(backends) == 2:
            assert np.array_equal(results["cython"], results["numpy"]), "backends disagree"
        line = f"{n:>4} {t_table * 1e3:>10.2f}ms" + "".join(f" {times[b] * 1e3:>12.2f}ms" for b in backends)
        if len(backends) == 2:
            line += f" {times['numpy'] / times['cython']:>8.1f}x"
        print(line)
        row = {"n": n, "table_ms": t_table * 1e3}
        row.update({f"{b}_fill_ms": times[b] * 1e3 for b in backends})
        rows.append(row)

    if args.csv:
        import csv

        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {args.csv}")


if __name__ == "__main__":
    main()
