"""Acceptance criteria, one test each, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
happen; they are also repeated in the terminal summary.
"""

import collections
import math
import os
import time

import numpy as np
import pytest

from monotone_ei import (
    AssumptionSet,
    OutcomeBounds,
    PopulationConfig,
    bootstrap,
    bounds_for,
    conditional_covariance,
    ecological_regression,
    im_critical_value,
    imbens_manski_ci,
    load_aggregate,
    local_derivative,
    method_of_bounds,
    neighborhood_model,
    read_aggregate_csv,
    synthesize_population,
)
from monotone_ei.micro import MicroData, estimate_delta_signs
from monotone_ei.oracle import (
    local_sharpness_check,
    random_instance,
    sharpness_check,
    tilde_sharpness_check,
)

from conftest import record_criterion

APPLICATION_ENV = "MONOTONE_EI_APPLICATION_CSV"


def rel_close(a, b, rel, floor=1e-15):
    return abs(a - b) <= rel * max(abs(a), abs(b)) + floor


# -- identity suite --------------------------------------------------------------

def test_identity_suite():
    start = time.perf_counter()
    bad = []
    for seed in range(500):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 51))
        data = random_instance(rng, n)
        er, nm = ecological_regression(data), neighborhood_model(data)
        g = data.moments.gamma
        if not rel_close(nm.d, g * er.d, 1e-12):
            bad.append((seed, "D_NM != gamma D_ER", nm.d, g * er.d))
        if abs(er.d) < abs(nm.d) * (1 - 1e-12):
            bad.append((seed, "|D_ER| < |D_NM|", er.d, nm.d))
        if abs(nm.d) > 1e-12 and np.sign(er.d) != np.sign(nm.d):
            bad.append((seed, "sign mismatch", er.d, nm.d))
        if not method_of_bounds(data).d.contains(nm.d, tol=1e-12):
            bad.append((seed, "D_NM outside MOB", nm.d, None))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 10
    record_criterion("identity suite", ok,
                     f"500 datasets, {len(bad)} violations, {elapsed:.2f}s (limit 10s)"
                     + (f"; first {bad[0]}" if bad else ""))
    assert ok


# -- bias identities --------------------------------------------------------------

def bias_configs():
    polys = [((0.6, 0.0), (0.4, 0.0)), ((0.3, 0.4), (0.2, 0.3)), ((0.8, -0.5), (0.5, 0.2, -0.3)),
             ((0.5, 0.3, -0.2), (0.3, 0.2, 0.1)), ((0.2, 0.6), (0.6, -0.4))]
    for k in range(200):
        mu1, mu0 = polys[k % len(polys)]
        yield PopulationConfig(
            n_neighborhoods=5 + k % 30,
            prevalence=("uniform", "beta", "grid")[k % 3],
            mu1=mu1, mu0=mu0,
            outcome="binary" if k % 4 == 3 else "continuous",
            bounds=(0.0, 1.0),
            seed=k,
        )


def test_bias_identities():
    start = time.perf_counter()
    worst, bad = 0.0, []
    for cfg in bias_configs():
        t = synthesize_population(cfg)
        m = t.data.moments
        er, nm = ecological_regression(t.data), neighborhood_model(t.data)
        pairs = {
            "D_ER": (er.d - t.d, t.delta_w / m.var_xn),
            "D_NM": (nm.d - t.d, -t.delta_b / m.var_x),
            "Y1_ER": (er.y1 - t.y1, t.delta_w * (1 - m.ex) / m.var_xn),
            "Y0_ER": (er.y0 - t.y0, -t.delta_w * m.ex / m.var_xn),
            "Y1_NM": (nm.y1 - t.y1, -t.delta_b / m.ex),
            "Y0_NM": (nm.y0 - t.y0, t.delta_b / (1 - m.ex)),
            "decomposition": (t.d, (t.delta_b + t.delta_w) / ((1 - m.gamma) * m.var_x)),
        }
        for name, (lhs, rhs) in pairs.items():
            err = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
            if not rel_close(lhs, rhs, 1e-9, floor=1e-13):
                bad.append((cfg.seed, name, lhs, rhs))
            if max(abs(lhs), abs(rhs)) > 1e-6:
                worst = max(worst, err)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 30
    record_criterion("bias identities", ok,
                     f"200 populations x 7 identities, {len(bad)} violations, worst relative error "
                     f"{worst:.1e} (limit 1e-9), {elapsed:.1f}s (limit 30s)")
    assert ok


# -- sharpness audit -------------------------------------------------------------

def test_sharpness_audit():
    start = time.perf_counter()
    failures, checks = [], 0
    exercised = collections.Counter()
    for i in range(200):
        rng = np.random.default_rng(10_000 + i)
        n = (2, 3, 4)[i % 3]
        bounds = OutcomeBounds(-1.0, 2.0) if i % 7 == 6 else OutcomeBounds()
        data = random_instance(rng, n, bounds, flat=(i % 10 == 9))
        report = sharpness_check(data, grid_points=201)
        checks += len(report.checks)
        failures += [(i, "global", c) for c in report.failures]
        for c in report.checks:
            if not c.analytic.rejected:
                exercised[(c.target, c.cell)] += 1

        slope = 0.0 if i % 5 == 4 else float(rng.normal(0, 0.6))
        report = local_sharpness_check(data.records[int(rng.integers(n))], bounds, slope, grid_points=201)
        checks += len(report.checks)
        failures += [(i, "local", c) for c in report.failures]

        dup = random_instance(rng, 3, bounds, duplicate=2 + i % 2)
        report = tilde_sharpness_check(dup, dup.x[0], slope, grid_points=201)
        checks += len(report.checks)
        failures += [(i, "pooled", c) for c in report.failures]
    elapsed = time.perf_counter() - start
    cells = {cell for _, cell in exercised}
    ok = not failures and elapsed < 300
    detail = (f"200 instances (|N| in 2..4, grid 201), {checks} comparisons incl. local and pooled, "
              f"{len(failures)} mismatches, {len(cells)} distinct global cells with a non-rejected "
              f"interval, {elapsed:.0f}s (limit 300s)")
    if failures:
        i, kind, c = failures[0]
        detail += f"; first: instance {i} {kind}: {c.line()}"
    record_criterion("sharpness audit", ok, detail)
    assert ok


# -- worked example -----------------------------------------------------------------

def test_worked_example():
    data = load_aggregate([("a", 100, 0.2, 0.3), ("b", 100, 0.8, 0.9)])
    mob = method_of_bounds(data)
    er, nm = ecological_regression(data), neighborhood_model(data)
    shaded = bounds_for(data, "D", AssumptionSet("nonneg", "nonneg")).interval
    got = {
        "MOB D": (mob.d.lo, mob.d.hi), "ER": (er.d, er.y1, er.y0), "NM": (nm.d, nm.y1, nm.y0),
        "shaded D": (shaded.lo, shaded.hi),
    }
    want = {"MOB D": (0.2, 0.8), "ER": (1.0, 1.1, 0.1), "NM": (0.36, 0.78, 0.42), "shaded D": (0.36, 0.8)}
    # exact up to binary rounding of the decimal inputs
    worst = max(abs(g - w) for k in want for g, w in zip(got[k], want[k]))
    ok = worst <= 1e-12
    record_criterion("worked example", ok, f"Dataset A, max deviation {worst:.1e} from the stated values")
    assert ok


# -- kernel derivative -------------------------------------------------------------

def test_kernel_derivative():
    xs = np.linspace(0, 1, 500)
    lin = load_aggregate([(f"g{i}", 1, x, 0.1 + 0.4 * x) for i, x in enumerate(xs)])
    worst_lin = max(abs(local_derivative(lin, x0, h).slope - 0.4)
                    for x0 in (0.0, 0.1, 0.5, 0.9, 1.0) for h in (0.02, 0.05, 0.2, 0.5))
    quad = load_aggregate([(f"g{i}", 1, x, x * x) for i, x in enumerate(xs)])
    q_err = abs(local_derivative(quad, 0.5, 0.05).slope - 1.0)
    ok = worst_lin <= 1e-8 and q_err <= 0.05
    record_criterion("kernel derivative", ok,
                     f"linear max error {worst_lin:.1e} (limit 1e-8); quadratic |slope(0.5) - 1| = "
                     f"{q_err:.1e} at h = 0.05 (limit 0.05)")
    assert ok


# -- conditional covariance ------------------------------------------------------

def null_micro(rng, n=2000, n_nb=40):
    xn_nb = rng.uniform(0.05, 0.95, n_nb)
    member = rng.integers(0, n_nb, n)
    x = (rng.uniform(size=n) < xn_nb[member]).astype(int)
    return MicroData(x, rng.normal(0.5, 0.1, n), xn_nb[member], np.ones(n), member.astype(str))


def replicate(truth, reps, n):
    theta = {"b": [], "w": []}
    se = {"b": [], "w": []}
    for r in range(reps):
        m = truth.to_micro(n, seed=r)
        for key, est in (("b", conditional_covariance(m.x, m.y, m.weight, m.stratum)),
                         ("w", conditional_covariance(m.xn, m.y, m.weight, m.x.astype(int)))):
            theta[key].append(est.theta)
            se[key].append(est.se)
    return {k: np.array(v) for k, v in theta.items()}, {k: np.array(v) for k, v in se.items()}


def test_conditional_covariance():
    start = time.perf_counter()
    inside = {"w": 0, "b": 0}
    for s in range(500):
        est = estimate_delta_signs(null_micro(np.random.default_rng(s)))
        inside["w"] += abs(est.delta_w.theta) < 3 * est.delta_w.se
        inside["b"] += abs(est.delta_b.theta) < 3 * est.delta_b.se
    null_ok = min(inside.values()) >= 495

    truth = synthesize_population(PopulationConfig(
        n_neighborhoods=40, mu1=(0.6, -0.3), mu0=(0.7, -0.2), outcome="binary", seed=11))
    theta, se = replicate(truth, 500, 5000)
    parts, known_ok = [], True
    for key, true in (("w", truth.delta_w), ("b", truth.delta_b)):
        sd = theta[key].std(ddof=1)
        bias = abs(theta[key].mean() - true)
        ratio = se[key].mean() / sd
        known_ok &= bias < 3 * sd / math.sqrt(500) and abs(ratio - 1) <= 0.2
        parts.append(f"delta_{key}: true {true:.5f}, |bias| {bias:.1e} vs 3 MC se {3 * sd / math.sqrt(500):.1e}, "
                     f"SE/sd {ratio:.3f}")
    elapsed = time.perf_counter() - start
    ok = null_ok and known_ok and elapsed < 120
    record_criterion("conditional covariance", ok,
                     f"null DGP within 3 SE: delta_w {inside['w']}/500, delta_b {inside['b']}/500 (need 495); "
                     + "; ".join(parts) + f"; {elapsed:.1f}s (limit 120s)")

    # diagnostic, not a criterion: low-noise continuous outcomes, where the
    # formula's treatment of Var(A | C) as known matters
    low_noise = synthesize_population(PopulationConfig(
        n_neighborhoods=40, mu1=(0.6, -0.3), mu0=(0.7, -0.2), seed=11))
    th, s = replicate(low_noise, 200, 5000)
    ratios = {k: s[k].mean() / th[k].std(ddof=1) for k in th}
    print(f"note  low-noise continuous outcome: SE/sd delta_w {ratios['w']:.3f}, delta_b {ratios['b']:.3f}")
    assert ok


# -- inference -------------------------------------------------------------------

def coverage_dataset(seed, n=100):
    rng = np.random.default_rng(seed)
    x = rng.beta(2, 2, n)
    m = 0.3 + 0.4 * x + rng.uniform(-0.1, 0.1, n)
    # equal group means within each neighborhood: D = 0.4 Var(X_N) / Var(X) = 0.08
    return load_aggregate([(f"n{i}", 1, x[i], m[i]) for i in range(n)])


def test_inference():
    start = time.perf_counter()
    c_point = im_critical_value(0.0, 1.0, 0.95)
    c_wide = im_critical_value(1.0, 0.1, 0.95)
    crit_ok = abs(c_point - 1.959964) <= 1e-5 and abs(c_wide - 1.644854) <= 1e-5

    cr = AssumptionSet(contextual_reinforcement=True)
    true_d = 0.08

    def stat(d):
        return bounds_for(d, "D", cr)

    covered, used, failures = 0, 0, 0
    for s in range(200):
        data = coverage_dataset(s)
        interval = stat(data).interval
        if interval.rejected:
            continue
        boot = bootstrap(data, stat, 200, seed=s)
        failures += boot.failures
        ci = imbens_manski_ci(interval, boot.se[0], boot.se[1], 0.95)
        covered += ci.lo <= true_d <= ci.hi
        used += 1
    rate = covered / used
    elapsed = time.perf_counter() - start
    ok = crit_ok and 0.90 <= rate <= 0.99 and used == 200 and elapsed < 300
    record_criterion("inference", ok,
                     f"c = {c_point:.6f} (point) and {c_wide:.6f} (wide); coverage of D = 0.08 by the 95% "
                     f"CR-bounds CI {covered}/{used} = {rate:.3f} (need 0.90-0.99), "
                     f"{failures} failed replicates, {elapsed:.0f}s (limit 300s)")
    assert ok


# -- optional: the county application -------------------------------------------

@pytest.mark.skipif(not os.environ.get(APPLICATION_ENV),
                    reason=f"set {APPLICATION_ENV} to the county table to run")
def test_application():
    data = read_aggregate_csv(os.environ[APPLICATION_ENV])
    mob = method_of_bounds(data)
    er, nm = ecological_regression(data), neighborhood_model(data)
    cr = AssumptionSet(contextual_reinforcement=True)
    d = bounds_for(data, "D", cr).interval
    y1 = bounds_for(data, "Y1", cr).interval
    y0 = bounds_for(data, "Y0", cr).interval
    boot = bootstrap(data, lambda s: bounds_for(s, "D", cr), 1000, seed=0)
    ci = imbens_manski_ci(d, boot.se[0], boot.se[1])
    checks = {
        "MOB gap": ((mob.d.lo, mob.d.hi), (-0.774, 0.528)),
        "NM": ((nm.d,), (-0.055,)),
        "ER": ((er.d,), (-0.479,)),
        "CR bounds": ((d.lo, d.hi), (-0.479, -0.055)),
        "CI": ((ci.lo, ci.hi), (-0.518, -0.051)),
    }
    bad = [k for k, (got, want) in checks.items() if any(abs(g - w) > 0.02 for g, w in zip(got, want))]
    # group 1 is the Republican vote share; group 0 the Democratic share
    if not (0.61 - 0.02 <= y0.lo and y0.hi <= 0.81 + 0.02):
        bad.append("Democratic mean")
    if not (0.33 - 0.02 <= y1.lo and y1.hi <= 0.56 + 0.02):
        bad.append("Republican mean")
    ok = not bad
    record_criterion("application (optional)", ok,
                     "; ".join(f"{k} {tuple(round(g, 3) for g in got)}" for k, (got, _) in checks.items())
                     + (f"; off by more than 0.02: {', '.join(bad)}" if bad else ""))
    assert ok
