"""Time the numba kernels against the numpy fallback on full brute-force runs.

    python benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Each case is run once per backend to warm caches (and trigger JIT
compilation) before timing.
"""

import argparse
import json
import statistics
import time

from modcurve import _kernels
from modcurve.families import SubgroupSpec
from modcurve.matgrp import _sl2_cached, invariants_bruteforce

CASES = [("x0", 39), ("ns+", 39), ("sp*", 40), ("x1", 40), ("xfull", 24), ("s4", 29),
         ("ns", 60)]


def time_case(spec, backend, repeat):
    invariants_bruteforce(spec, backend=backend)
    runs = []
    for _ in range(repeat):
        _sl2_cached.cache_clear()
        start = time.perf_counter()
        inv = invariants_bruteforce(spec, backend=backend)
        runs.append(time.perf_counter() - start)
    return inv, statistics.median(runs)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)

    backends = sorted(_kernels.BACKENDS)
    rows = []
    print(f"{'case':<12}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for family, level in CASES:
        spec = SubgroupSpec(family, level)
        times, results = {}, set()
        for b in backends:
            inv, times[b] = time_case(spec, b, args.repeat)
            results.add(inv.values)
        if len(results) != 1:
            raise SystemExit(f"backends disagree on {spec.label}: {results}")
        speedup = times["numpy"] / times["numba"] if "numba" in times else float("nan")
        print(f"{spec.label:<12}" + "".join(f"{times[b]:>11.4f}s" for b in backends)
              + f"{speedup:>9.1f}x")
        rows.append({"case": spec.label, **{f"{b}_seconds": times[b] for b in backends},
                     "speedup": speedup})
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
