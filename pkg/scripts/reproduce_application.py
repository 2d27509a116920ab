"""Bounds on the vaccination gap between two partisan groups from county aggregates.

The input is an aggregate CSV (``id,population,x_share,y_mean``) with one row
per county: ``x_share`` is the Republican two-party vote share and ``y_mean``
the share of residents vaccinated. Group 1 is therefore the Republican group
and the gap is Republican minus Democratic. The data are not shipped with the
package; see the README for how to assemble the table.

Usage: python3 scripts/reproduce_application.py counties.csv --replicates 1000 --seed 0
"""

import argparse
import json
import sys

from monotone_ei import (
    AssumptionSet,
    bootstrap,
    bounds_for,
    ecological_regression,
    imbens_manski_ci,
    method_of_bounds,
    neighborhood_model,
    read_aggregate_csv,
)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("input")
    parser.add_argument("--replicates", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    data = read_aggregate_csv(args.input)
    cr = AssumptionSet(contextual_reinforcement=True)
    mob, er, nm = method_of_bounds(data), ecological_regression(data), neighborhood_model(data)
    out = {
        "counties": len(data),
        "no_assumption_gap": [mob.d.lo, mob.d.hi],
        "er": {"d": er.d, "y1": er.y1, "y0": er.y0},
        "nm": {"d": nm.d, "y1": nm.y1, "y0": nm.y0},
    }
    for target in ("D", "Y1", "Y0"):
        iv = bounds_for(data, target, cr).interval
        out[f"cr_{target}"] = [iv.lo, iv.hi]
    d = bounds_for(data, "D", cr).interval
    boot = bootstrap(data, lambda s: bounds_for(s, "D", cr), args.replicates, seed=args.seed,
                     workers=args.workers)
    ci = imbens_manski_ci(d, boot.se[0], boot.se[1])
    out["cr_D_ci95"] = [ci.lo, ci.hi]
    out["bootstrap_failures"] = boot.failures
    print(json.dumps(out, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
