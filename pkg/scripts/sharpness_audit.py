"""Compare every analytic bound against brute-force enumeration on random instances.

Usage: python3 scripts/sharpness_audit.py --instances 200 --grid-points 201 --seed 0
"""

import argparse
import collections
import sys
import time

import numpy as np

from monotone_ei import OutcomeBounds
from monotone_ei.oracle import local_sharpness_check, random_instance, sharpness_check, tilde_sharpness_check


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--instances", type=int, default=200)
    parser.add_argument("--grid-points", type=int, default=201)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--verbose", action="store_true", help="print every comparison")
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    start = time.perf_counter()
    counts = collections.Counter()
    failures = []
    for i in range(args.instances):
        n = (2, 3, 4)[i % 3]
        bounds = OutcomeBounds(-1.0, 2.0) if i % 7 == 6 else OutcomeBounds()
        data = random_instance(rng, n, bounds, flat=(i % 10 == 9))
        slope = 0.0 if i % 5 == 4 else float(rng.normal(0, 0.6))
        reports = {
            "global": sharpness_check(data, grid_points=args.grid_points),
            "local": local_sharpness_check(data.records[int(rng.integers(n))], bounds, slope,
                                           grid_points=args.grid_points),
        }
        dup = random_instance(rng, 3, bounds, duplicate=2 + i % 2)
        reports["pooled"] = tilde_sharpness_check(dup, dup.x[0], slope, grid_points=args.grid_points)
        for kind, report in reports.items():
            counts[kind] += len(report.checks)
            failures += [(i, kind, c) for c in report.failures]
            if args.verbose:
                for line in report.lines():
                    print(f"{i:4d} {kind:6s} {line}")

    elapsed = time.perf_counter() - start
    print(f"instances {args.instances}, grid {args.grid_points}, {elapsed:.1f}s")
    for kind, c in counts.items():
        print(f"  {kind:6s} comparisons {c}")
    print(f"  mismatches {len(failures)}")
    for i, kind, c in failures[:20]:
        print(f"    instance {i} {kind}: {c.line()}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
