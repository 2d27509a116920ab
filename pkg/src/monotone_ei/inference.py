"""Neighborhood bootstrap and Imbens-Manski intervals for partially identified parameters."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist
from typing import Any, Callable, Optional

import numpy as np

from .core import AggregateData, Interval
from .errors import BootstrapFailure, EIError, ValidationError


@dataclass(frozen=True)
class BootstrapResult:
    replicates: tuple  # one tuple of endpoint values per successful replicate
    se: Optional[tuple]  # per-endpoint sample sd; None with fewer than 2 successes
    failures: int
    seed: Optional[int]
    requested: int
    first_failure: Optional[str] = None

    @property
    def values(self) -> np.ndarray:
        return np.array(self.replicates, dtype=float)

    def as_dict(self) -> dict:
        return {
            "requested": self.requested,
            "succeeded": len(self.replicates),
            "failures": self.failures,
            "se": list(self.se) if self.se is not None else None,
            "seed": self.seed,
            "first_failure": self.first_failure,
        }


def _endpoints(value: Any) -> tuple:
    """Normalise a statistic's value to a tuple of floats; raise on rejection."""
    interval = getattr(value, "interval", value)
    if isinstance(interval, Interval):
        if interval.rejected:
            reason = getattr(value, "rejection_reason", None) or "interval rejected"
            raise _Rejected(reason)
        return (interval.lo, interval.hi)
    if isinstance(value, (tuple, list, np.ndarray)):
        return tuple(float(v) for v in value)
    return (float(value),)


class _Rejected(Exception):
    pass


def bootstrap(
    data: AggregateData,
    statistic: Callable[[AggregateData], Any],
    replicates: int = 1000,
    seed: Optional[int] = 0,
    workers: int = 1,
) -> BootstrapResult:
    """Resample neighborhoods with replacement and recompute ``statistic``.

    Each draw picks neighborhoods uniformly and keeps their population
    shares, renormalised within the resample, so a neighborhood enters in
    proportion to its population.  Replicate ``r`` draws from the ``r``-th
    child of ``SeedSequence(seed)``, which makes the sequence independent of
    ``workers``.  Replicates on which the statistic raises a package error or
    returns a rejected interval are dropped and counted as failures.
    """
    if replicates < 1:
        raise ValidationError(f"replicates must be >= 1, got {replicates}")
    n = len(data)
    children = np.random.SeedSequence(seed).spawn(replicates)

    def one(ss):
        rng = np.random.default_rng(ss)
        idx = rng.integers(0, n, size=n)
        try:
            return _endpoints(statistic(data.resample(idx))), None
        except (EIError, _Rejected) as exc:
            return None, str(exc) or type(exc).__name__

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, children))
    else:
        results = [one(ss) for ss in children]

    values = [v for v, _ in results if v is not None]
    reasons = [r for v, r in results if v is None]
    if not values:
        raise BootstrapFailure(f"all {replicates} bootstrap replicates failed; first: {reasons[0]}")
    se = None
    if len(values) >= 2:
        v = np.array(values)
        # shifting by the first replicate keeps identical columns at exactly zero
        se = tuple(float(s) for s in np.std(v - v[0], axis=0, ddof=1))
    return BootstrapResult(
        replicates=tuple(values),
        se=se,
        failures=len(reasons),
        seed=seed,
        requested=replicates,
        first_failure=reasons[0] if reasons else None,
    )


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@dataclass(frozen=True)
class ConfidenceInterval:
    lo: float
    hi: float
    level: float
    critical_value: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def im_critical_value(width: float, se_max: float, level: float, tol: float = 1e-10) -> float:
    """Solve ``Phi(c + width / se_max) - Phi(-c) = level`` for ``c`` on ``[0, 10]``."""
    if se_max <= 0:
        return NormalDist().inv_cdf(level)
    ratio = width / se_max

    def f(c):
        return normal_cdf(c + ratio) - normal_cdf(-c) - level

    lo, hi = 0.0, 10.0
    if f(lo) >= 0:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def imbens_manski_ci(interval: Interval, se_lo: float, se_hi: float, level: float = 0.95) -> ConfidenceInterval:
    """Confidence interval covering the true parameter in an identified interval.

    ``[lo - c se_lo, hi + c se_hi]`` with ``c`` between the one- and two-sided
    normal quantiles, shrinking toward the one-sided value as the interval
    widens relative to its sampling noise.
    """
    vals = (interval.lo, interval.hi, se_lo, se_hi, level)
    if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in vals):
        raise ValidationError(f"non-finite input to the confidence interval: {vals}")
    if interval.rejected:
        raise ValidationError("cannot build a confidence interval around a rejected interval")
    if se_lo < 0 or se_hi < 0:
        raise ValidationError("standard errors must be nonnegative")
    if not 0 < level < 1:
        raise ValidationError(f"level must be in (0, 1), got {level}")
    se_max = max(se_lo, se_hi)
    c = im_critical_value(interval.hi - interval.lo, se_max, level)
    if se_max == 0:
        return ConfidenceInterval(interval.lo, interval.hi, level, c)
    return ConfidenceInterval(interval.lo - c * se_lo, interval.hi + c * se_hi, level, c)
