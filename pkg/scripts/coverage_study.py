"""Monte Carlo coverage of the bootstrap confidence interval for the gap.

Each replication draws ``n`` equal-size neighborhoods with prevalence from
Beta(2, 2) and mean outcome 0.3 + 0.4 x plus uniform noise, so the two groups
share a mean inside every neighborhood and the true gap is
0.4 Var(X_N) / Var(X) = 0.08.

Usage: python3 scripts/coverage_study.py --datasets 200 --replicates 200
"""

import argparse
import sys
import time

import numpy as np

from monotone_ei import AssumptionSet, bootstrap, bounds_for, imbens_manski_ci, load_aggregate

TRUE_D = 0.08


def draw(seed, n):
    rng = np.random.default_rng(seed)
    x = rng.beta(2, 2, n)
    m = 0.3 + 0.4 * x + rng.uniform(-0.1, 0.1, n)
    return load_aggregate([(f"n{i}", 1, x[i], m[i]) for i in range(n)])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--datasets", type=int, default=200)
    parser.add_argument("--neighborhoods", type=int, default=100)
    parser.add_argument("--replicates", type=int, default=200)
    parser.add_argument("--level", type=float, default=0.95)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    cr = AssumptionSet(contextual_reinforcement=True)

    def stat(d):
        return bounds_for(d, "D", cr)

    start = time.perf_counter()
    covered = used = 0
    widths = []
    for s in range(args.seed, args.seed + args.datasets):
        data = draw(s, args.neighborhoods)
        interval = stat(data).interval
        if interval.rejected:
            continue
        boot = bootstrap(data, stat, args.replicates, seed=s, workers=args.workers)
        ci = imbens_manski_ci(interval, boot.se[0], boot.se[1], args.level)
        covered += ci.lo <= TRUE_D <= ci.hi
        widths.append(ci.hi - ci.lo)
        used += 1
    elapsed = time.perf_counter() - start
    print(f"datasets {used} (of {args.datasets}), B = {args.replicates}, level {args.level}")
    print(f"coverage of D = {TRUE_D}: {covered}/{used} = {covered / max(used, 1):.3f}")
    print(f"mean CI width {np.mean(widths):.4f}, {elapsed:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
