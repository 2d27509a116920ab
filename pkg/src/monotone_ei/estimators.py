"""Ecological regression and neighborhood-model point estimates."""

from __future__ import annotations

from dataclasses import dataclass

from .core import FEAS_TOL, AggregateData
from .errors import DegenerateError


@dataclass(frozen=True)
class PointEstimates:
    d: float
    y1: float
    y0: float
    method: str  # "ER" or "NM"
    feasible: bool = True

    def as_dict(self) -> dict:
        return {"d": self.d, "y1": self.y1, "y0": self.y0, "method": self.method, "feasible": self.feasible}


def ecological_regression(data: AggregateData) -> PointEstimates:
    """Population-weighted regression of ``y`` on ``x``.

    The slope estimates the group difference; the fitted values at
    ``x = 1`` and ``x = 0`` estimate the group means.  These can fall outside
    the outcome range; ``feasible`` reports that instead of clamping.
    """
    m = data.moments
    if m.var_xn <= 0:
        raise DegenerateError("no between-neighborhood variation in prevalence; regression slope undefined")
    d = m.cov_xn_yn / m.var_xn
    y0 = m.ey - d * m.ex
    y1 = m.ey + d * (1 - m.ex)
    b = data.bounds
    feasible = all(b.lo - FEAS_TOL <= v <= b.hi + FEAS_TOL for v in (y0, y1))
    return PointEstimates(d=d, y1=y1, y0=y0, method="ER", feasible=feasible)


def neighborhood_model(data: AggregateData) -> PointEstimates:
    """Prevalence-weighted averages of neighborhood outcomes."""
    m = data.moments  # raises when a group has no mass
    p, x, y = data.p, data.x, data.y
    y1 = float(p @ (x * y)) / m.ex
    y0 = float(p @ ((1 - x) * y)) / (1 - m.ex)
    return PointEstimates(d=y1 - y0, y1=y1, y0=y0, method="NM")
