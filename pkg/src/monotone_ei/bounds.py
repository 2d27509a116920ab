"""Method-of-bounds intervals and sharp bounds under sign assumptions.

Every sign restriction on the within- or between-group association cuts the
target (``D``, ``Y1`` or ``Y0``) by a half-line anchored at a point
estimate:

* within ``>= 0``  <=>  ``D <= D_ER``; within ``<= 0`` <=> ``D >= D_ER``
* between ``>= 0`` <=>  ``D >= D_NM``; between ``<= 0`` <=> ``D <= D_NM``

``Y1`` is increasing and ``Y0`` decreasing in ``D`` at fixed data, so the
group-mean tables follow with ``Y^1_ER``/``Y^1_NM`` as anchors (same
orientation) and ``Y^0_ER``/``Y^0_NM`` (flipped orientation).  Each cell is
the intersection of its half-lines with the method-of-bounds interval;
``zero`` restrictions become point constraints.  :func:`constrained_interval`
implements this once and the local bounds reuse it with different anchors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import (
    FEAS_TOL,
    NORM_TOL,
    AggregateData,
    AssumptionSet,
    Interval,
    OutcomeBounds,
    SignAssumption,
    Status,
)
from .errors import ConfigurationError, DegenerateError, ValidationError
from .estimators import PointEstimates, ecological_regression, neighborhood_model

TARGETS = ("D", "Y1", "Y0")
S = SignAssumption


@dataclass(frozen=True)
class MobEstimates:
    y1: Interval
    y0: Interval
    d: Interval

    def for_target(self, target: str) -> Interval:
        return {"D": self.d, "Y1": self.y1, "Y0": self.y0}[target]

    def as_dict(self) -> dict:
        return {"y1": self.y1.as_dict(), "y0": self.y0.as_dict(), "d": self.d.as_dict()}


@dataclass(frozen=True)
class BoundsReport:
    target: str
    interval: Interval
    cell: AssumptionSet
    inputs: dict = field(default_factory=dict)
    rejection_reason: Optional[str] = None
    cr_sign: Optional[int] = None
    declared: Optional[AssumptionSet] = None

    @property
    def rejected(self) -> bool:
        return self.interval.rejected

    def as_dict(self) -> dict:
        out = {
            "target": self.target,
            "interval": self.interval.as_dict(),
            "cell": self.cell.as_dict(),
            "inputs": dict(self.inputs),
            "rejection_reason": self.rejection_reason,
        }
        if self.cr_sign is not None:
            out["cr_sign"] = self.cr_sign
        if self.declared is not None and self.declared != self.cell:
            out["declared"] = self.declared.as_dict()
        return out


def method_of_bounds(data: AggregateData) -> MobEstimates:
    """Extreme group means and difference consistent with the aggregates."""
    m = data.moments
    lo, hi = data.bounds.lo, data.bounds.hi
    p, x, y = data.p, data.x, data.y
    y1_hi = float(p @ np.minimum(y - lo * (1 - x), hi * x)) / m.ex
    y1_lo = float(p @ np.maximum(y - hi * (1 - x), lo * x)) / m.ex
    y0_lo = float(p @ np.maximum(y - hi * x, lo * (1 - x))) / (1 - m.ex)
    y0_hi = float(p @ np.minimum(y - lo * x, hi * (1 - x))) / (1 - m.ex)
    y1_lo, y1_hi, y0_lo, y0_hi = (min(max(v, lo), hi) for v in (y1_lo, y1_hi, y0_lo, y0_hi))
    return MobEstimates(
        y1=Interval.make(y1_lo, y1_hi),
        y0=Interval.make(y0_lo, y0_hi),
        d=Interval.make(y1_lo - y0_hi, y1_hi - y0_lo),
    )


# -- the generic engine -----------------------------------------------------

@dataclass(frozen=True)
class Anchor:
    name: str
    value: float


def resolve_cr(assumptions: AssumptionSet, within_d: Optional[float], between_d: float,
               tol: float = FEAS_TOL) -> tuple[AssumptionSet, Optional[int]]:
    """Cell actually applied under contextual reinforcement, and the implied sign of ``D``.

    ``within_d`` / ``between_d`` are the ``D``-scale anchors of the within and
    between restrictions (``D_ER``/``D_NM`` globally, ``mu'``/0 locally).  With
    both signs undeclared the shaded cell is picked by the sign of their
    difference; a tie gives sign 0.
    """
    if not assumptions.contextual_reinforcement:
        return assumptions, None
    cell = assumptions.propagated()
    if within_d is None:
        raise ConfigurationError("contextual reinforcement needs the within-group anchor (regression slope)")
    gap = within_d - between_d
    sign = 0 if abs(gap) <= tol else (1 if gap > 0 else -1)
    if cell.within is S.UNKNOWN and cell.between is S.UNKNOWN:
        if sign > 0:
            cell = AssumptionSet(S.NONNEGATIVE, S.NONNEGATIVE, True)
        elif sign < 0:
            cell = AssumptionSet(S.NONPOSITIVE, S.NONPOSITIVE, True)
        else:
            # both branches meet at D = D_NM = D_ER
            cell = AssumptionSet(S.UNKNOWN, S.ZERO, True)
    return cell, sign


def constrained_interval(
    mob_lo: Anchor,
    mob_hi: Anchor,
    cell: AssumptionSet,
    within: Optional[Anchor],
    between: Anchor,
    joint_zero: Optional[Anchor] = None,
    orientation: int = 1,
    tol: float = FEAS_TOL,
) -> tuple[Interval, Optional[str]]:
    """Intersect the MOB interval with the half-lines implied by ``cell``.

    ``orientation`` is +1 when the target increases with ``D`` and -1 when
    it decreases (``Y0``).  Returns the interval and, if rejected, the
    contradiction in words.
    """
    lowers, uppers, points = [mob_lo], [mob_hi], []

    def half_line(sign_assumption: SignAssumption, anchor: Optional[Anchor], upper_when_nonneg: bool):
        if sign_assumption is S.UNKNOWN:
            return
        if anchor is None:
            raise ConfigurationError("sign restriction needs an anchor value that is not available")
        if sign_assumption is S.ZERO:
            points.append(anchor)
            return
        is_upper = (sign_assumption is S.NONNEGATIVE) == upper_when_nonneg
        if orientation < 0:
            is_upper = not is_upper
        (uppers if is_upper else lowers).append(anchor)

    # within >= 0 caps D from above; between >= 0 floors it
    half_line(cell.within, within, upper_when_nonneg=True)
    half_line(cell.between, between, upper_when_nonneg=False)

    lo = max(lowers, key=lambda a: a.value)
    hi = min(uppers, key=lambda a: a.value)
    for a in points[1:]:
        if abs(a.value - points[0].value) > tol:
            return (Interval(points[0].value, a.value, Status.REJECTED),
                    f"point restrictions disagree: {points[0].name} = {points[0].value:.6g} "
                    f"but {a.name} = {a.value:.6g}")
    if points:
        pt = points[0]
        # both anchors agree only where they coincide with the joint-zero point
        if len(points) == 2 and joint_zero is not None:
            pt = joint_zero
        if pt.value < lo.value - tol:
            return (Interval(lo.value, pt.value, Status.REJECTED),
                    f"{pt.name} = {pt.value:.6g} is below the lower bound {lo.name} = {lo.value:.6g}")
        if pt.value > hi.value + tol:
            return (Interval(pt.value, hi.value, Status.REJECTED),
                    f"{pt.name} = {pt.value:.6g} exceeds the upper bound {hi.name} = {hi.value:.6g}")
        return Interval.point(pt.value), None
    interval = Interval.make(lo.value, hi.value, tol)
    if interval.rejected:
        return interval, (f"lower bound {lo.name} = {lo.value:.6g} exceeds "
                          f"upper bound {hi.name} = {hi.value:.6g}")
    return interval, None


# -- global bounds ------------------------------------------------------------

def _estimates(data: AggregateData, need_er: bool):
    nm = neighborhood_model(data)
    er = None
    if need_er:
        try:
            er = ecological_regression(data)
        except DegenerateError as exc:
            raise DegenerateError(f"within-group restrictions need the regression slope: {exc}") from None
    return er, nm


def _bounds(data: AggregateData, target: str, assumptions: AssumptionSet) -> BoundsReport:
    if target not in TARGETS:
        raise ConfigurationError(f"target must be one of {TARGETS}, got {target!r}")
    need_er = assumptions.within is not S.UNKNOWN or assumptions.contextual_reinforcement
    er, nm = _estimates(data, need_er)
    mob = method_of_bounds(data)
    cell, cr_sign = resolve_cr(assumptions, er.d if er else None, nm.d)

    key = {"D": "d", "Y1": "y1", "Y0": "y0"}[target]
    label = {"D": "D", "Y1": "Y1", "Y0": "Y0"}[target]
    m_int = mob.for_target(target)
    zero_value = {"D": 0.0, "Y1": data.moments.ey, "Y0": data.moments.ey}[target]
    within = Anchor(f"{label}_ER", getattr(er, key)) if er else None
    between = Anchor(f"{label}_NM", getattr(nm, key))
    interval, reason = constrained_interval(
        Anchor(f"{label}_MOB-", m_int.lo),
        Anchor(f"{label}_MOB+", m_int.hi),
        cell,
        within,
        between,
        joint_zero=Anchor("zero-association point", zero_value),
        orientation=-1 if target == "Y0" else 1,
    )
    # shaded cells also state the sign of D_NM
    if target == "D" and not interval.rejected:
        if cell.within is S.NONNEGATIVE and cell.between is S.NONNEGATIVE and nm.d < -FEAS_TOL:
            interval = Interval(nm.d, interval.hi, Status.REJECTED)
            reason = f"both associations nonnegative requires D_NM >= 0, got {nm.d:.6g}"
        elif cell.within is S.NONPOSITIVE and cell.between is S.NONPOSITIVE and nm.d > FEAS_TOL:
            interval = Interval(interval.lo, nm.d, Status.REJECTED)
            reason = f"both associations nonpositive requires D_NM <= 0, got {nm.d:.6g}"
    if reason:
        reason = f"{assumptions.label}: {reason}"

    inputs = {
        "mob_lo": m_int.lo,
        "mob_hi": m_int.hi,
        "nm": getattr(nm, key),
    }
    if er is not None:
        inputs["er"] = getattr(er, key)
        inputs["er_feasible"] = er.feasible
    return BoundsReport(
        target=target,
        interval=interval,
        cell=cell,
        inputs=inputs,
        rejection_reason=reason,
        cr_sign=cr_sign,
        declared=assumptions,
    )


def bounds_for_d(data: AggregateData, assumptions: AssumptionSet | None = None) -> BoundsReport:
    """Sharp bounds on the difference in group means ``D = Y1 - Y0``."""
    return _bounds(data, "D", assumptions or AssumptionSet())


def bounds_for_mean(data: AggregateData, group: int, assumptions: AssumptionSet | None = None) -> BoundsReport:
    """Sharp bounds on ``Y1`` (``group=1``) or ``Y0`` (``group=0``)."""
    if group not in (0, 1):
        raise ConfigurationError(f"group must be 0 or 1, got {group!r}")
    return _bounds(data, f"Y{group}", assumptions or AssumptionSet())


def bounds_for(data: AggregateData, target: str, assumptions: AssumptionSet | None = None) -> BoundsReport:
    return _bounds(data, target, assumptions or AssumptionSet())


# -- more than two groups ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class MultiGroupData:
    """Aggregates with ``G + 1`` groups: ``shares[n, g]`` is the share of group g in n."""

    ids: tuple
    p: np.ndarray
    shares: np.ndarray
    y: np.ndarray
    bounds: OutcomeBounds = field(default_factory=OutcomeBounds)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        shares = np.atleast_2d(np.asarray(self.shares, dtype=float))
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "shares", shares)
        object.__setattr__(self, "y", y)
        n = len(self.ids)
        if p.shape != (n,) or y.shape != (n,) or shares.shape[0] != n or shares.shape[1] < 2:
            raise ValidationError("multi-group data need n ids, n populations, n outcomes and an n x (G+1) share matrix")
        if np.any(shares < 0) or np.any(shares > 1):
            raise ValidationError("group shares must lie in [0, 1]")
        bad = np.flatnonzero(np.abs(shares.sum(axis=1) - 1) > NORM_TOL)
        if bad.size:
            i = bad[0]
            raise ValidationError(f"row {i + 1} (id={self.ids[i]}): group shares sum to {shares[i].sum()!r}, expected 1")
        if np.any(p < 0) or p.sum() <= 0:
            raise ValidationError("populations must be nonnegative and not all zero")
        object.__setattr__(self, "p", p / p.sum())

    @property
    def n_groups(self) -> int:
        return self.shares.shape[1]

    def collapse(self, g: int) -> AggregateData:
        """Binary view with ``X = 1`` for group ``g``."""
        return AggregateData(ids=self.ids, p=self.p, x=self.shares[:, g], y=self.y, bounds=self.bounds)


def multi_group_bounds(data: MultiGroupData, g: int, assumptions: AssumptionSet | None = None) -> BoundsReport:
    """Bounds on the mean outcome of group ``g`` among ``G + 1`` groups.

    The assumptions refer to the associations of the indicator ``X = 1{G = g}``.
    """
    assumptions = assumptions or AssumptionSet()
    if not 0 <= g < data.n_groups:
        raise ConfigurationError(f"group index {g} out of range 0..{data.n_groups - 1}")
    x = data.shares[:, g]
    mass = float(data.p @ x)
    if mass <= 0:
        raise DegenerateError(f"group {g} has zero population mass")
    if np.all((x == 0) | (x == 1) | (data.p == 0)):
        # fully segregated: the group's mean is observed directly
        value = float(data.p @ (x * data.y)) / mass
        return BoundsReport(
            target="Y1",
            interval=Interval.point(value),
            cell=assumptions,
            inputs={"group": g, "segregated": True},
            declared=assumptions,
        )
    report = bounds_for_mean(data.collapse(g), 1, assumptions)
    return BoundsReport(
        target=report.target,
        interval=report.interval,
        cell=report.cell,
        inputs={**report.inputs, "group": g},
        rejection_reason=report.rejection_reason,
        cr_sign=report.cr_sign,
        declared=report.declared,
    )


def all_cells(contextual_reinforcement: bool = False) -> list[AssumptionSet]:
    """The 16 (within, between) combinations."""
    return [
        AssumptionSet(w, b, contextual_reinforcement)
        for w in S for b in S
        if not (contextual_reinforcement and w.strict_sign * b.strict_sign < 0)
    ]
