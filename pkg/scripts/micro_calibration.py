"""Bias and standard-error calibration of the conditional covariance estimator.

Draws repeated individual samples from one synthetic population and compares
the mean estimate with the population value and the mean reported standard
error with the spread across draws.

Usage: python3 scripts/micro_calibration.py --outcome binary --draws 500 --size 5000
"""

import argparse
import math
import sys

import numpy as np

from monotone_ei import PopulationConfig, conditional_covariance, synthesize_population


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outcome", choices=["binary", "continuous"], default="binary")
    parser.add_argument("--individual-sd", type=float, default=0.1, help="continuous outcomes only")
    parser.add_argument("--neighborhoods", type=int, default=40)
    parser.add_argument("--draws", type=int, default=500)
    parser.add_argument("--size", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args(argv)

    truth = synthesize_population(PopulationConfig(
        n_neighborhoods=args.neighborhoods, mu1=(0.6, -0.3), mu0=(0.7, -0.2), outcome=args.outcome,
        individual_sd=args.individual_sd, seed=args.seed))
    est = {"within": ([], []), "between": ([], [])}
    for r in range(args.draws):
        m = truth.to_micro(args.size, seed=r)
        for key, e in (("within", conditional_covariance(m.xn, m.y, m.weight, m.x.astype(int))),
                       ("between", conditional_covariance(m.x, m.y, m.weight, m.stratum))):
            est[key][0].append(e.theta)
            est[key][1].append(e.se)

    print(f"{args.outcome} outcome, {args.draws} draws of {args.size}")
    for key, true in (("within", truth.delta_w), ("between", truth.delta_b)):
        theta, se = np.array(est[key][0]), np.array(est[key][1])
        sd = theta.std(ddof=1)
        print(f"  {key:7s} true {true:+.5f}  mean {theta.mean():+.5f}  bias/MCse "
              f"{(theta.mean() - true) / (sd / math.sqrt(args.draws)):+.2f}  SE/sd {se.mean() / sd:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
