"""Neighborhood-specific bounds.

Per-neighborhood method of bounds, a kernel local-linear estimate of the
slope ``mu'(x)`` of ``E[Y_N | X_N = x]``, and the sign-restricted intervals
for ``D_n``, ``Y_n^1`` and ``Y_n^0``.  Locally the between-group
restriction is anchored at ``D_n = 0`` and the within-group one at
``D_n = mu'(X_n)``, since ``mu'(x_n) = D_n + delta_{W,n}``; the interval
arithmetic is shared with the global bounds.

The tilde variants pool every neighborhood sharing a prevalence value
with population weights and apply the same formulas to pooled quantities.
They do not need the equal-outcomes-at-equal-prevalence assumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bounds import Anchor, constrained_interval, resolve_cr
from .core import (
    FEAS_TOL,
    AggregateData,
    AssumptionSet,
    Interval,
    NeighborhoodRecord,
    OutcomeBounds,
    SignAssumption,
    Status,
)
from .errors import (
    ConfigurationError,
    InsufficientDataError,
    NotFoundError,
    UndefinedDerivativeError,
    ValidationError,
)

DEFAULT_BANDWIDTHS = tuple(np.geomspace(0.02, 0.5, 15))
TILDE_DECIMALS = 9
# weighted x-variance below this is treated as no spread
_MIN_SPREAD = 1e-20


@dataclass(frozen=True)
class LocalMob:
    """Per-neighborhood bounds; a group absent from the neighborhood has ``None``."""

    id: str
    x: float
    y: float
    y1: Optional[Interval]
    y0: Optional[Interval]
    d: Optional[Interval]

    def as_dict(self) -> dict:
        return {
            "id": self.id, "x": self.x, "y": self.y,
            "y1": self.y1.as_dict() if self.y1 else None,
            "y0": self.y0.as_dict() if self.y0 else None,
            "d": self.d.as_dict() if self.d else None,
        }


def _mob_endpoints(x, y, lo, hi):
    """Vectorised ``(y1_lo, y1_hi, y0_lo, y0_hi)`` for interior prevalences."""
    y1_hi = np.minimum((y - lo * (1 - x)) / x, hi)
    y1_lo = np.maximum((y - hi * (1 - x)) / x, lo)
    y0_lo = np.maximum((y - hi * x) / (1 - x), lo)
    y0_hi = np.minimum((y - lo * x) / (1 - x), hi)
    return y1_lo, y1_hi, y0_lo, y0_hi


def neighborhood_mob(record: NeighborhoodRecord, bounds: OutcomeBounds | None = None) -> LocalMob:
    bounds = bounds or OutcomeBounds()
    x, y = float(record.x), float(record.y)
    if not 0 <= x <= 1:
        raise ValidationError(f"{record.id}: x_share {x} outside [0, 1]")
    if x == 1:
        return LocalMob(record.id, x, y, Interval.point(y), None, None)
    if x == 0:
        return LocalMob(record.id, x, y, None, Interval.point(y), None)
    y1_lo, y1_hi, y0_lo, y0_hi = (float(v) for v in _mob_endpoints(x, y, bounds.lo, bounds.hi))
    return LocalMob(
        record.id, x, y,
        y1=Interval.make(y1_lo, y1_hi),
        y0=Interval.make(y0_lo, y0_hi),
        d=Interval.make(y1_lo - y0_hi, y1_hi - y0_lo),
    )


# -- kernel local-linear slope ------------------------------------------------

def epanechnikov(u):
    u = np.asarray(u, dtype=float)
    return np.where(np.abs(u) <= 1, 0.75 * (1 - u * u), 0.0)


@dataclass(frozen=True)
class DerivativeEstimate:
    x0: float
    slope: float
    bandwidth: float
    effective_n: int
    level: float = math.nan

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _local_linear(xs, ys, ps, x0s, h):
    """Local-linear level, slope and support size at each ``x0``.

    Undefined fits (fewer than two supporting points or no spread) come back
    as NaN.  Returns arrays shaped like ``x0s``.
    """
    x0s = np.atleast_1d(np.asarray(x0s, dtype=float))
    w = ps[None, :] * epanechnikov((xs[None, :] - x0s[:, None]) / h)
    sw = w.sum(axis=1)
    n_eff = (w > 0).sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        xbar = (w @ xs) / sw
        ybar = (w @ ys) / sw
        dx = xs[None, :] - xbar[:, None]
        sxx = (w * dx * dx).sum(axis=1)
        sxy = (w * dx * (ys[None, :] - ybar[:, None])).sum(axis=1)
        ok = (n_eff >= 2) & (sw > 0) & (sxx > _MIN_SPREAD * sw)
        slope = np.where(ok, sxy / np.where(ok, sxx, 1.0), np.nan)
        level = np.where(ok, ybar + slope * (x0s - xbar), np.nan)
    return level, slope, n_eff


def local_derivative(data: AggregateData, x0: float, bandwidth: float) -> DerivativeEstimate:
    """Population-weighted local-linear slope of ``Y_n`` on ``X_n`` at ``x0``.

    Weights are ``p_n K((X_n - x0) / h)`` with the Epanechnikov kernel.  The
    kernel's normalising constant cancels, so only its shape matters.
    """
    if not bandwidth > 0 or not math.isfinite(bandwidth):
        raise ValidationError(f"bandwidth must be positive and finite, got {bandwidth}")
    level, slope, n_eff = _local_linear(data.x, data.y, data.p, [x0], bandwidth)
    if not math.isfinite(slope[0]):
        raise UndefinedDerivativeError(
            f"slope undefined at x = {x0:.6g} with bandwidth {bandwidth:.6g}: "
            f"{int(n_eff[0])} neighborhood(s) in the kernel window"
            + ("" if n_eff[0] < 2 else " and no spread in prevalence")
        )
    return DerivativeEstimate(float(x0), float(slope[0]), float(bandwidth), int(n_eff[0]), float(level[0]))


@dataclass(frozen=True)
class CVResult:
    candidates: tuple
    scores: tuple  # NaN for candidates with an undefined held-out fit
    bandwidth: float
    folds: int
    seed: Optional[int]


def cv_scores(data: AggregateData, folds: int = 10, candidates: Sequence[float] | None = None,
              seed: Optional[int] = 0) -> CVResult:
    """K-fold cross-validated, population-weighted level error per bandwidth.

    Ties within ``1e-12`` (relative to the best score, floored at 1) go to
    the largest candidate.
    """
    candidates = tuple(float(h) for h in (DEFAULT_BANDWIDTHS if candidates is None else candidates))
    if not candidates:
        raise ValidationError("empty bandwidth grid")
    if any(not (h > 0 and math.isfinite(h)) for h in candidates):
        raise ValidationError("bandwidths must be positive and finite")
    n = len(data)
    if folds < 2:
        raise ValidationError(f"need at least 2 folds, got {folds}")
    if n < folds:
        raise InsufficientDataError(f"{n} neighborhoods is fewer than {folds} folds")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(n, dtype=int)
    fold_of[rng.permutation(n)] = np.arange(n) % folds
    scores = []
    failures = []
    for h in candidates:
        sse, mass, failed = 0.0, 0.0, None
        for k in range(folds):
            held = fold_of == k
            train = ~held
            level, _, _ = _local_linear(data.x[train], data.y[train], data.p[train], data.x[held], h)
            if np.any(np.isnan(level)):
                failed = k
                break
            ph = data.p[held]
            sse += float(ph @ (data.y[held] - level) ** 2)
            mass += float(ph.sum())
        if failed is not None:
            scores.append(math.nan)
            failures.append(f"h={h:.4g} (fold {failed})")
        else:
            scores.append(sse / mass if mass > 0 else 0.0)
    arr = np.array(scores)
    if np.all(np.isnan(arr)):
        raise InsufficientDataError(
            "every bandwidth leaves some held-out neighborhood without kernel support; "
            "widen the grid. Failing: " + ", ".join(failures)
        )
    best = np.nanmin(arr)
    tied = [i for i, s in enumerate(arr) if not math.isnan(s) and s <= best + 1e-12 * max(1.0, best)]
    chosen = max((candidates[i] for i in tied))
    return CVResult(candidates, tuple(scores), chosen, folds, seed)


def cv_bandwidth(data: AggregateData, folds: int = 10, candidates: Sequence[float] | None = None,
                 seed: Optional[int] = 0) -> float:
    """Bandwidth minimising the cross-validated error of the local-linear fit."""
    if candidates is not None and len(candidates) == 1:
        h = float(candidates[0])
        if not (h > 0 and math.isfinite(h)):
            raise ValidationError(f"bandwidth must be positive and finite, got {h}")
        return h
    return cv_scores(data, folds, candidates, seed).bandwidth


def slope_curve(data: AggregateData, bandwidth: float, grid: Sequence[float] | None = None):
    """Fitted level and slope on a prevalence grid (NaN where undefined)."""
    grid = np.linspace(0, 1, 101) if grid is None else np.asarray(grid, dtype=float)
    level, slope, n_eff = _local_linear(data.x, data.y, data.p, grid, bandwidth)
    return grid, level, slope, n_eff


# -- sign-restricted local bounds --------------------------------------------

@dataclass(frozen=True)
class LocalBoundsReport:
    id: str
    x: float
    y: float
    d: Optional[Interval]
    y1: Optional[Interval]
    y0: Optional[Interval]
    cell: AssumptionSet
    slope: Optional[float]
    status: Status
    rejection_reason: Optional[str] = None
    cr_sign: Optional[int] = None

    @property
    def rejected(self) -> bool:
        return self.status is Status.REJECTED

    def as_dict(self) -> dict:
        return {
            "id": self.id, "x": self.x, "y": self.y,
            "d": self.d.as_dict() if self.d else None,
            "y1": self.y1.as_dict() if self.y1 else None,
            "y0": self.y0.as_dict() if self.y0 else None,
            "cell": self.cell.as_dict(),
            "slope": self.slope,
            "status": self.status.value,
            "rejection_reason": self.rejection_reason,
            "cr_sign": self.cr_sign,
        }


def _needs_slope(assumptions: AssumptionSet) -> bool:
    return assumptions.within is not SignAssumption.UNKNOWN or assumptions.contextual_reinforcement


def _bounds_from_mob(mob: LocalMob, assumptions: AssumptionSet, slope: Optional[float]) -> LocalBoundsReport:
    x, y = mob.x, mob.y
    if mob.d is None:
        # one group only: its mean is observed, the other group's is undefined
        return LocalBoundsReport(mob.id, x, y, None, mob.y1, mob.y0, assumptions, slope, Status.IDENTIFIED)
    cell, cr_sign = resolve_cr(assumptions, slope, 0.0)
    spec = {
        # target: (mob, within anchor, between anchor, orientation)
        "D": (mob.d, None if slope is None else slope, 0.0, 1),
        "Y1": (mob.y1, None if slope is None else y + (1 - x) * slope, y, 1),
        "Y0": (mob.y0, None if slope is None else y - x * slope, y, -1),
    }
    out, reasons = {}, []
    for target, (m, w, b, orient) in spec.items():
        interval, reason = constrained_interval(
            Anchor(f"{target}_MOB,n-", m.lo),
            Anchor(f"{target}_MOB,n+", m.hi),
            cell,
            None if w is None else Anchor(f"{target} at slope", w),
            Anchor(f"{target} at D_n = 0", b),
            joint_zero=Anchor(f"{target} at D_n = 0", b),
            orientation=orient,
        )
        out[target] = interval
        if reason:
            reasons.append(f"{target}: {reason}")
    if any(i.rejected for i in out.values()):
        status = Status.REJECTED
    elif all(i.status is Status.IDENTIFIED for i in out.values()):
        status = Status.IDENTIFIED
    else:
        status = Status.BOUNDED
    return LocalBoundsReport(
        mob.id, x, y, out["D"], out["Y1"], out["Y0"], cell, slope, status,
        rejection_reason="; ".join(reasons) or None, cr_sign=cr_sign,
    )


def local_monotone_bounds(
    record: NeighborhoodRecord,
    bounds: OutcomeBounds | None,
    assumptions: AssumptionSet,
    slope: Optional[float] = None,
    assume_same_outcome: bool = False,
) -> LocalBoundsReport:
    """Bounds on ``D_n``, ``Y_n^1``, ``Y_n^0`` under local sign assumptions.

    ``assumptions.between`` restricts ``Cov(Y, X | N = n)`` and
    ``assumptions.within`` the local within-group association.  Within and
    contextual-reinforcement restrictions go through the slope ``mu'(X_n)``
    and are only valid for neighborhood ``n`` itself when every neighborhood
    with the same prevalence has the same group means; pass
    ``assume_same_outcome=True`` to acknowledge that, or use
    :func:`tilde_monotone_bounds` for the pooled version.
    """
    if _needs_slope(assumptions):
        if slope is None:
            raise ConfigurationError(
                f"{record.id}: within-group or contextual-reinforcement restrictions need the slope mu'(x_n)"
            )
        if not math.isfinite(slope):
            raise ConfigurationError(f"{record.id}: slope is not finite ({slope})")
        if not assume_same_outcome:
            raise ConfigurationError(
                "slope-based local bounds hold for a single neighborhood only if neighborhoods with equal "
                "prevalence share group means; pass assume_same_outcome=True or use tilde_monotone_bounds"
            )
    else:
        slope = None
    return _bounds_from_mob(neighborhood_mob(record, bounds), assumptions, slope)


# -- pooling over equal prevalence ---------------------------------------------

@dataclass(frozen=True)
class TildeGroup:
    x: float
    members: tuple
    weights: tuple
    y: float
    mob: LocalMob

    def as_dict(self) -> dict:
        return {"x": self.x, "members": list(self.members), "weights": list(self.weights),
                "y": self.y, "mob": self.mob.as_dict()}


def _members(data: AggregateData, prevalence: float, tolerance: Optional[float]):
    if tolerance is None:
        return np.round(data.x, TILDE_DECIMALS) == round(float(prevalence), TILDE_DECIMALS)
    return np.abs(data.x - prevalence) <= tolerance


def tilde_aggregate(data: AggregateData, prevalence: float, tolerance: Optional[float] = None) -> TildeGroup:
    """Pool the neighborhoods whose prevalence matches ``prevalence``.

    By default prevalences match after rounding to 9 decimals; a numeric
    ``tolerance`` matches within that absolute distance instead.  Members with
    zero population carry zero weight and are left out.
    """
    mask = _members(data, prevalence, tolerance) & (data.p > 0)
    if not mask.any():
        raise NotFoundError(f"no populated neighborhood with prevalence {prevalence!r}")
    p = data.p[mask]
    w = p / p.sum()
    x = data.x[mask]
    y = data.y[mask]
    ids = tuple(np.asarray(data.ids, dtype=object)[mask])
    y_t = float(w @ y)
    x_t = float(w @ x)
    lo, hi = data.bounds.lo, data.bounds.hi
    label = f"tilde(x={x_t:.6g})"
    if np.all(x == 1):
        mob = LocalMob(label, 1.0, y_t, Interval.point(y_t), None, None)
    elif np.all(x == 0):
        mob = LocalMob(label, 0.0, y_t, None, Interval.point(y_t), None)
    elif np.any((x == 0) | (x == 1)):
        raise ValidationError("tilde group mixes boundary and interior prevalences; narrow the tolerance")
    else:
        e = [float(w @ v) for v in _mob_endpoints(x, y, lo, hi)]
        mob = LocalMob(label, x_t, y_t, Interval.make(e[0], e[1]), Interval.make(e[2], e[3]),
                       Interval.make(e[0] - e[3], e[1] - e[2]))
    return TildeGroup(x=x_t, members=ids, weights=tuple(float(v) for v in w), y=y_t, mob=mob)


def tilde_groups(data: AggregateData, tolerance: Optional[float] = None) -> list[TildeGroup]:
    """Every distinct prevalence group, in order of first appearance."""
    seen, groups = set(), []
    for xv in data.x:
        if round(float(xv), TILDE_DECIMALS) in seen:
            continue
        mask = _members(data, xv, tolerance)
        seen.update(round(float(v), TILDE_DECIMALS) for v in data.x[mask])
        if np.any(data.p[mask] > 0):
            groups.append(tilde_aggregate(data, float(xv), tolerance))
    return groups


def tilde_monotone_bounds(
    data: AggregateData,
    prevalence: float,
    assumptions: AssumptionSet,
    slope: Optional[float] = None,
    tolerance: Optional[float] = None,
) -> LocalBoundsReport:
    """Pooled bounds for all neighborhoods at one prevalence value.

    The sign restrictions refer to the pooled associations; the slope is
    ``mu'`` at the pooled prevalence.
    """
    group = tilde_aggregate(data, prevalence, tolerance)
    if _needs_slope(assumptions):
        if slope is None:
            raise ConfigurationError("within-group or contextual-reinforcement restrictions need the slope")
        if not math.isfinite(slope):
            raise ConfigurationError(f"slope is not finite ({slope})")
    else:
        slope = None
    return _bounds_from_mob(group.mob, assumptions, slope)
