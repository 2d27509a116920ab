"""Command-line interface.

Exit codes: 0 success, 1 input or configuration error, 2 statistical
rejection or insufficiency (rejected assumption, undefined slope, failed
bootstrap, failed audit).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .bounds import bounds_for, method_of_bounds
from .core import AssumptionSet, Interval, OutcomeBounds, read_aggregate_csv
from .errors import INPUT_ERRORS, DegenerateError, EIError, UndefinedDerivativeError
from .estimators import ecological_regression, neighborhood_model
from .inference import bootstrap, imbens_manski_ci
from .local import (
    cv_scores,
    local_derivative,
    local_monotone_bounds,
    slope_curve,
    tilde_monotone_bounds,
)
from .micro import DEFAULT_BIN_WIDTH, estimate_delta_signs, read_micro_csv, sign_verdict
from .oracle import (
    local_sharpness_check,
    random_instance,
    sharpness_check,
    tilde_sharpness_check,
)

SEED_ENV = "MONOTONE_EI_SEED"
GROUP_TARGET = {"d": "D", "1": "Y1", "0": "Y0"}

# option name -> (type, default) for values that a config file may also set
OPTIONS = {
    "input": (str, None),
    "bounds": (str, "0:1"),
    "within": (str, "unknown"),
    "between": (str, "unknown"),
    "cr": (bool, False),
    "group": (str, "d"),
    "bandwidth": (float, None),
    "cv_folds": (int, 10),
    "replicates": (int, 1000),
    "seed": (int, None),
    "level": (float, 0.95),
    "format": (str, "json"),
    "threads": (int, None),
    "output": (str, None),
    "statistic": (str, "bounds"),
    "bin_width": (float, DEFAULT_BIN_WIDTH),
    "grid_points": (int, 201),
    "instances": (int, 20),
    "curve": (str, None),
    "skip_undefined": (bool, False),
    "assume_same_outcome": (bool, False),
}


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(f"{self.prog}: error: {message}", 1)


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    bounds: OutcomeBounds = field(default_factory=OutcomeBounds)
    assumptions: AssumptionSet = field(default_factory=AssumptionSet)
    group: str = "d"
    bandwidth: Optional[float] = None
    cv_folds: int = 10
    replicates: int = 1000
    seed: int = 0
    level: float = 0.95
    format: str = "json"
    threads: int = 1
    output: Optional[str] = None
    statistic: str = "bounds"
    bin_width: float = DEFAULT_BIN_WIDTH
    grid_points: int = 201
    instances: int = 20
    curve: Optional[str] = None
    skip_undefined: bool = False
    assume_same_outcome: bool = False


def read_config_file(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; keys may use dashes."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}", 1) from None
    for k, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{k}: expected key = value", 1)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in OPTIONS:
            raise CliError(f"{path}:{k}: unknown key {key!r}", 1)
        kind = OPTIONS[key][0]
        try:
            if kind is bool:
                if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(value)
                out[key] = value.lower() in ("true", "1", "yes")
            else:
                out[key] = kind(value)
        except ValueError:
            raise CliError(f"{path}:{k}: bad value {value!r} for {key}", 1) from None
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(args.config) if getattr(args, "config", None) else {}

    def pick(name):
        v = getattr(args, name, None)
        if v is not None:
            return v
        if name in file_values:
            return file_values[name]
        return OPTIONS[name][1]

    seed = pick("seed")
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise CliError(f"{SEED_ENV} must be an integer, got {env!r}", 1) from None
    threads = pick("threads") or (os.cpu_count() or 1)
    fmt = pick("format")
    if fmt not in ("json", "table", "csv"):
        raise CliError(f"--format must be json, table or csv, got {fmt!r}", 1)
    group = str(pick("group")).lower()
    if group not in GROUP_TARGET:
        raise CliError(f"--group must be 0, 1 or d, got {group!r}", 1)
    return RunConfig(
        command=args.command,
        input=pick("input"),
        bounds=OutcomeBounds.parse(pick("bounds")),
        assumptions=AssumptionSet(pick("within"), pick("between"), bool(pick("cr"))),
        group=group,
        bandwidth=pick("bandwidth"),
        cv_folds=pick("cv_folds"),
        replicates=pick("replicates"),
        seed=seed,
        level=pick("level"),
        format=fmt,
        threads=max(1, int(threads)),
        output=pick("output"),
        statistic=pick("statistic"),
        bin_width=pick("bin_width"),
        grid_points=pick("grid_points"),
        instances=pick("instances"),
        curve=pick("curve"),
        skip_undefined=bool(pick("skip_undefined")),
        assume_same_outcome=bool(pick("assume_same_outcome")),
    )


# -- output helpers ----------------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: NaN/inf become null, numpy scalars become Python."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def _interval_text(i: Optional[dict]) -> str:
    if not i:
        return "-"
    if i["status"] == "rejected":
        return f"rejected ({_fmt(i['lo'])} > {_fmt(i['hi'])})"
    if i["status"] == "identified":
        return f"{_fmt(i['lo'])} (point)"
    return f"[{_fmt(i['lo'])}, {_fmt(i['hi'])}]"


def _emit(cfg: RunConfig, payload: dict, table: list[str], rows: list[list]) -> None:
    if cfg.format == "json":
        text = json.dumps(_clean(payload), indent=2) + "\n"
    elif cfg.format == "table":
        text = "\n".join(table) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for r in rows:
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in r])
        text = buf.getvalue()
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _require_input(cfg: RunConfig) -> str:
    if not cfg.input:
        raise CliError("--input is required", 1)
    return cfg.input


def _load(cfg: RunConfig):
    path = _require_input(cfg)
    try:
        return read_aggregate_csv(path, cfg.bounds)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", 1) from None
    except EIError as exc:
        # anything wrong with the file itself is an input error
        raise CliError(f"{path}: {exc}", 1) from None


SIGN_TEXT = {1: "+", -1: "-", 0: "0"}


# -- commands ------------------------------------------------------------------------

def cmd_bounds(cfg: RunConfig) -> int:
    data = _load(cfg)
    m = data.moments
    nm = neighborhood_model(data)
    try:
        er = ecological_regression(data)
        er_note = None
    except DegenerateError as exc:
        er, er_note = None, str(exc)
    mob = method_of_bounds(data)
    reports = {t: bounds_for(data, t, cfg.assumptions) for t in ("D", "Y1", "Y0")}
    rejected = [r for r in reports.values() if r.rejected]
    payload = {
        "input": cfg.input,
        "n_neighborhoods": len(data),
        "normalization": data.normalization,
        "outcome_bounds": {"lo": cfg.bounds.lo, "hi": cfg.bounds.hi},
        "assumptions": cfg.assumptions.as_dict(),
        "moments": m.as_dict(),
        "mob": mob.as_dict(),
        "er": er.as_dict() if er else None,
        "nm": nm.as_dict(),
    }
    for t, r in reports.items():
        payload[t.lower()] = {**r.interval.as_dict(), "cell": r.cell.as_dict(),
                              "rejection_reason": r.rejection_reason}
    if cfg.assumptions.contextual_reinforcement:
        payload["sign"] = SIGN_TEXT[reports["D"].cr_sign]
    payload["diagnostics"] = {
        "er_feasible": er.feasible if er else None,
        "er_unavailable": er_note,
        "rejected": [r.rejection_reason for r in rejected],
    }
    table = [
        f"neighborhoods {len(data)}   E[X] {m.ex:.4f}   E[Y] {m.ey:.4f}   gamma {m.gamma:.4f}",
        f"assumptions   {cfg.assumptions.label}",
        f"ER            D {_fmt(er.d) if er else '-'}  Y1 {_fmt(er.y1) if er else '-'}  Y0 {_fmt(er.y0) if er else '-'}"
        + ("" if not er or er.feasible else "  (outside outcome bounds)"),
        f"NM            D {_fmt(nm.d)}  Y1 {_fmt(nm.y1)}  Y0 {_fmt(nm.y0)}",
        f"MOB           D {_interval_text(mob.d.as_dict())}  Y1 {_interval_text(mob.y1.as_dict())}  Y0 {_interval_text(mob.y0.as_dict())}",
    ]
    for t, r in reports.items():
        table.append(f"{t:<13} {_interval_text(r.interval.as_dict())}")
    if "sign" in payload:
        table.append(f"sign of D     {payload['sign']}")
    rows = [["target", "lo", "hi", "status", "rejection_reason"]]
    for t, r in reports.items():
        rows.append([t, r.interval.lo, r.interval.hi, r.interval.status.value, r.rejection_reason])
    _emit(cfg, payload, table, rows)
    if rejected:
        for r in rejected:
            print(f"rejected: {r.target}: {r.rejection_reason}", file=sys.stderr)
        return 2
    return 0


def cmd_local(cfg: RunConfig) -> int:
    data = _load(cfg)
    a = cfg.assumptions
    needs_slope = a.within.value != "unknown" or a.contextual_reinforcement
    bandwidth, cv = cfg.bandwidth, None
    if bandwidth is None:
        result = cv_scores(data, folds=cfg.cv_folds, seed=cfg.seed)
        bandwidth, cv = result.bandwidth, result
    pooled = not cfg.assume_same_outcome
    rows_out, undefined = [], []
    for rec in data.records:
        # the slope is reported for every neighborhood, even where the cell ignores it
        try:
            est = local_derivative(data, rec.x, bandwidth)
        except UndefinedDerivativeError as exc:
            undefined.append((rec.id, str(exc)))
            continue
        slope, n_eff = est.slope, est.effective_n
        use = slope if needs_slope else None
        if pooled:
            rep = tilde_monotone_bounds(data, rec.x, a, slope=use)
        else:
            rep = local_monotone_bounds(rec, data.bounds, a, slope=use, assume_same_outcome=True)
        rows_out.append((rec, slope, n_eff, rep))
    if undefined and not cfg.skip_undefined:
        names = ", ".join(i for i, _ in undefined)
        raise CliError(f"slope undefined at {len(undefined)} neighborhood(s): {names} "
                       f"(bandwidth {bandwidth:.4g}); widen the bandwidth or pass --skip-undefined", 2)
    grid, level, slope_c, n_eff_c = slope_curve(data, bandwidth)
    curve = [{"x": float(g), "level": float(l), "slope": float(s), "effective_n": int(k)}
             for g, l, s, k in zip(grid, level, slope_c, n_eff_c)]
    if cfg.curve:
        with open(cfg.curve, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "level", "slope", "effective_n"])
            for c in curve:
                w.writerow([repr(c["x"]), "" if math.isnan(c["level"]) else repr(c["level"]),
                            "" if math.isnan(c["slope"]) else repr(c["slope"]), c["effective_n"]])
    payload = {
        "input": cfg.input,
        "assumptions": a.as_dict(),
        "mode": "pooled by prevalence" if pooled else "per neighborhood (equal-prevalence neighborhoods share group means)",
        "bandwidth": bandwidth,
        "cv": None if cv is None else {"candidates": list(cv.candidates), "scores": list(cv.scores),
                                       "folds": cv.folds, "seed": cv.seed},
        "neighborhoods": [{**rep.as_dict(), "id": rec.id, "slope_estimate": s, "effective_n": k}
                          for rec, s, k, rep in rows_out],
        "skipped": [{"id": i, "reason": r} for i, r in undefined],
        "curve": curve,
    }
    table = [f"bandwidth {bandwidth:.4f}   mode {payload['mode']}   {a.label}",
             f"{'id':<12} {'x':>7} {'y':>7} {'slope':>8}  {'D_n':<24} {'Y1_n':<24} {'Y0_n':<24}"]
    for rec, s, k, rep in rows_out:
        table.append(
            f"{rec.id:<12} {rec.x:7.4f} {rec.y:7.4f} {_fmt(s):>8}  "
            f"{_interval_text(rep.d.as_dict() if rep.d else None):<24} "
            f"{_interval_text(rep.y1.as_dict() if rep.y1 else None):<24} "
            f"{_interval_text(rep.y0.as_dict() if rep.y0 else None):<24}"
        )
    for i, r in undefined:
        table.append(f"{i:<12} skipped: {r}")
    rows = [["id", "x", "y", "slope", "d_lo", "d_hi", "y1_lo", "y1_hi", "y0_lo", "y0_hi", "status"]]
    for rec, s, k, rep in rows_out:
        def ends(i):
            return (i.lo, i.hi) if i else (None, None)
        rows.append([rec.id, rec.x, rec.y, s, *ends(rep.d), *ends(rep.y1), *ends(rep.y0), rep.status.value])
    _emit(cfg, payload, table, rows)
    if any(rep.rejected for *_, rep in rows_out):
        print("rejected: " + ", ".join(rec.id for rec, *_, rep in rows_out if rep.rejected), file=sys.stderr)
        return 2
    return 0


def cmd_micro_signs(cfg: RunConfig) -> int:
    path = _require_input(cfg)
    try:
        micro = read_micro_csv(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", 1) from None
    est = estimate_delta_signs(micro, cfg.bin_width)
    verdicts = {"delta_w": sign_verdict(est.delta_w, cfg.level), "delta_b": sign_verdict(est.delta_b, cfg.level)}
    payload = {"input": path, "rows": len(micro), "bin_width": cfg.bin_width, "level": cfg.level,
               **est.as_dict(), "verdicts": verdicts}
    table = [f"rows {len(micro)}   bin width {cfg.bin_width}   level {cfg.level}"]
    rows = [["association", "theta", "se", "z", "strata_used", "strata_dropped", "verdict"]]
    for name, e, reason in (("delta_w", est.delta_w, est.delta_w_reason), ("delta_b", est.delta_b, est.delta_b_reason)):
        if e is None:
            table.append(f"{name}: undefined ({reason})   verdict indeterminate")
            rows.append([name, None, None, None, None, None, "indeterminate"])
        else:
            table.append(f"{name}: {e.theta:.6f} ({e.se:.6f})  z {e.z:.2f}  strata {e.strata_used} used, "
                         f"{e.strata_dropped} dropped   verdict {verdicts[name]}")
            rows.append([name, e.theta, e.se, e.z, e.strata_used, e.strata_dropped, verdicts[name]])
    _emit(cfg, payload, table, rows)
    return 0


def _statistic(cfg: RunConfig):
    target = GROUP_TARGET[cfg.group]
    key = {"D": "d", "Y1": "y1", "Y0": "y0"}[target]
    if cfg.statistic == "bounds":
        return lambda d: bounds_for(d, target, cfg.assumptions)
    if cfg.statistic == "nm":
        return lambda d: getattr(neighborhood_model(d), key)
    if cfg.statistic == "er":
        return lambda d: getattr(ecological_regression(d), key)
    raise CliError(f"--statistic must be bounds, nm or er, got {cfg.statistic!r}", 1)


def cmd_ci(cfg: RunConfig) -> int:
    data = _load(cfg)
    if cfg.replicates < 2:
        raise CliError("--replicates must be at least 2", 1)
    stat = _statistic(cfg)
    value = stat(data)
    interval = getattr(value, "interval", None)
    if interval is None:
        interval = Interval.point(float(value))
    if interval.rejected:
        raise CliError(f"assumption rejected on the full sample: {value.rejection_reason}", 2)
    boot = bootstrap(data, stat, cfg.replicates, cfg.seed, workers=cfg.threads)
    if boot.se is None:
        raise CliError("fewer than two successful bootstrap replicates", 2)
    se_lo, se_hi = (boot.se[0], boot.se[-1])
    ci = imbens_manski_ci(interval, se_lo, se_hi, cfg.level)
    payload = {
        "input": cfg.input,
        "target": GROUP_TARGET[cfg.group],
        "statistic": cfg.statistic,
        "assumptions": cfg.assumptions.as_dict(),
        "interval": interval.as_dict(),
        "se": {"lo": se_lo, "hi": se_hi},
        "ci": ci.as_dict(),
        "bootstrap": boot.as_dict(),
    }
    if getattr(value, "cr_sign", None) is not None:
        payload["sign"] = SIGN_TEXT[value.cr_sign]
    table = [
        f"target {payload['target']}   statistic {cfg.statistic}   {cfg.assumptions.label}",
        f"interval {_interval_text(interval.as_dict())}",
        f"se       lo {se_lo:.4f}  hi {se_hi:.4f}   ({len(boot.replicates)} replicates, {boot.failures} failed, seed {boot.seed})",
        f"{cfg.level:.0%} CI   [{ci.lo:.4f}, {ci.hi:.4f}]   c = {ci.critical_value:.4f}",
    ]
    rows = [["target", "lo", "hi", "se_lo", "se_hi", "ci_lo", "ci_hi", "critical_value", "level",
             "replicates", "failures", "seed"],
            [payload["target"], interval.lo, interval.hi, se_lo, se_hi, ci.lo, ci.hi, ci.critical_value,
             cfg.level, len(boot.replicates), boot.failures, boot.seed]]
    _emit(cfg, payload, table, rows)
    return 0


def cmd_audit(cfg: RunConfig) -> int:
    reports = []
    if cfg.input:
        data = _load(cfg)
        reports.append(("input", sharpness_check(data, grid_points=cfg.grid_points, workers=cfg.threads)))
    else:
        rng = np.random.default_rng(cfg.seed)
        for i in range(cfg.instances):
            n = (2, 3, 4)[i % 3]
            data = random_instance(rng, n, cfg.bounds, flat=(i % 10 == 9))
            reports.append((f"instance {i} (n={n})", sharpness_check(data, grid_points=cfg.grid_points,
                                                                     workers=cfg.threads)))
            rec = data.records[0]
            slope = float(rng.normal(0, 0.5))
            reports.append((f"instance {i} local", local_sharpness_check(rec, data.bounds, slope, cfg.grid_points)))
            dup = random_instance(rng, 3, cfg.bounds, duplicate=2)
            reports.append((f"instance {i} pooled", tilde_sharpness_check(dup, dup.x[0], slope, cfg.grid_points)))
    n_checks = sum(len(r.checks) for _, r in reports)
    failures = [(name, c) for name, r in reports for c in r.failures]
    payload = {
        "grid_points": cfg.grid_points,
        "seed": None if cfg.input else cfg.seed,
        "checks": n_checks,
        "failures": len(failures),
        "passed": not failures,
        "failed": [{"instance": name, "target": c.target, "cell": c.cell, "analytic": c.analytic.as_dict(),
                    "enumerated": c.enumerated, "tolerance": c.tolerance, "note": c.note}
                   for name, c in failures],
    }
    table = []
    for name, r in reports:
        table.append(f"== {name}")
        table.extend(r.lines())
    table.append(f"{n_checks} checks, {len(failures)} failures")
    rows = [["instance", "target", "cell", "passed", "analytic_lo", "analytic_hi", "status",
             "grid_lo", "grid_hi", "tolerance"]]
    for name, r in reports:
        for c in r.checks:
            e = c.enumerated or (None, None)
            rows.append([name, c.target, c.cell, c.passed, c.analytic.lo, c.analytic.hi,
                         c.analytic.status.value, e[0], e[1], c.tolerance])
    _emit(cfg, payload, table, rows)
    return 2 if failures else 0


COMMANDS = {
    "bounds": cmd_bounds,
    "local": cmd_local,
    "micro-signs": cmd_micro_signs,
    "ci": cmd_ci,
    "audit": cmd_audit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="monotone-ei", description="Bounds and estimates for group means from aggregate data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="input CSV (aggregate: id,population,x_share,y_mean; "
                                        "micro-signs: x,y,x_n,weight,stratum)")
    common.add_argument("--bounds", help="outcome range LO:HI (default 0:1)")
    common.add_argument("--within", help="sign of the within-group association: unknown|nonneg|nonpos|zero")
    common.add_argument("--between", help="sign of the between-group association: unknown|nonneg|nonpos|zero")
    common.add_argument("--cr", action="store_const", const=True, default=None,
                        help="assume contextual reinforcement (the two associations share a sign)")
    common.add_argument("--group", help="target: 1, 0 or d (difference; default)")
    common.add_argument("--seed", type=int, help=f"random seed (fallback: ${SEED_ENV}, then 0)")
    common.add_argument("--level", type=float, help="confidence level (default 0.95)")
    common.add_argument("--format", help="json (default), table or csv")
    common.add_argument("--threads", type=int, help="worker threads (default: available CPUs)")
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--output", help="write the report here instead of stdout")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("bounds", parents=[common], help="MOB, ER, NM and sign-restricted bounds")
    p = sub.add_parser("local", parents=[common], help="per-neighborhood bounds and the fitted slope curve")
    p.add_argument("--bandwidth", type=float, help="kernel bandwidth (default: cross-validated)")
    p.add_argument("--cv-folds", type=int, help="folds for bandwidth cross-validation (default 10)")
    p.add_argument("--skip-undefined", action="store_const", const=True, default=None,
                   help="skip neighborhoods where the slope is undefined instead of failing")
    p.add_argument("--assume-same-outcome", action="store_const", const=True, default=None,
                   help="treat bounds as neighborhood-specific (equal-prevalence neighborhoods share group "
                        "means); otherwise bounds refer to all neighborhoods at that prevalence")
    p.add_argument("--curve", help="write the fitted level/slope curve as CSV here")
    p = sub.add_parser("micro-signs", parents=[common], help="estimate association signs from microdata")
    p.add_argument("--bin-width", type=float, help="prevalence bin width for the between-group strata (default 0.05)")
    p = sub.add_parser("ci", parents=[common], help="bootstrap Imbens-Manski confidence interval")
    p.add_argument("--replicates", type=int, help="bootstrap replicates (default 1000)")
    p.add_argument("--statistic", help="bounds (default), nm or er")
    p = sub.add_parser("audit", parents=[common], help="check analytic bounds against grid enumeration")
    p.add_argument("--grid-points", type=int, help="grid points per neighborhood (default 201)")
    p.add_argument("--instances", type=int, help="random instances when no --input is given (default 20)")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = build_config(args)
        return COMMANDS[cfg.command](cfg)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
