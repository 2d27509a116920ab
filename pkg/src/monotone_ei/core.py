"""Data model, validation and population moments for aggregate data.

A dataset is a list of neighborhoods, each with a population share ``p``,
a group prevalence ``x`` (share of the neighborhood in group 1) and a mean
outcome ``y``, plus the global outcome range ``[lo, hi]``.  Arrays are kept
internally so the estimators can be vectorised; ``records`` gives the
row view.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    DegenerateError,
    FeasibilityError,
    ValidationError,
)

#: absolute tolerance (outcome units) for adding-up and range checks
FEAS_TOL = 1e-10
#: tolerance on the normalisation of population shares
NORM_TOL = 1e-9

AGGREGATE_HEADER = ("id", "population", "x_share", "y_mean")


@dataclass(frozen=True)
class OutcomeBounds:
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValidationError(f"outcome bounds must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise ValidationError(f"outcome bounds need lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @classmethod
    def parse(cls, text: str) -> "OutcomeBounds":
        """Parse ``"LO:HI"``."""
        try:
            lo, hi = (float(v) for v in text.split(":"))
        except ValueError as exc:
            raise ValidationError(f"bounds must look like LO:HI, got {text!r}") from exc
        return cls(lo, hi)


@dataclass(frozen=True)
class NeighborhoodRecord:
    id: str
    p: float
    x: float
    y: float


class Status(str, enum.Enum):
    IDENTIFIED = "identified"
    BOUNDED = "bounded"
    REJECTED = "rejected"


@dataclass(frozen=True)
class Interval:
    """Closed interval with an identification status.

    A rejected interval keeps its (crossed) endpoints so the size of the
    contradiction stays visible: ``lo > hi``.
    """

    lo: float
    hi: float
    status: Status = Status.BOUNDED

    @classmethod
    def make(cls, lo: float, hi: float, tol: float = FEAS_TOL) -> "Interval":
        lo, hi = float(lo), float(hi)
        if lo > hi + tol:
            return cls(lo, hi, Status.REJECTED)
        if hi - lo <= tol:
            if lo == hi:
                return cls(lo, hi, Status.IDENTIFIED)
            mid = 0.5 * (lo + hi)
            return cls(mid, mid, Status.IDENTIFIED)
        return cls(lo, hi, Status.BOUNDED)

    @classmethod
    def point(cls, value: float) -> "Interval":
        value = float(value)
        return cls(value, value, Status.IDENTIFIED)

    @property
    def rejected(self) -> bool:
        return self.status is Status.REJECTED

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value: float, tol: float = FEAS_TOL) -> bool:
        return not self.rejected and self.lo - tol <= value <= self.hi + tol

    def is_subset(self, other: "Interval", tol: float = FEAS_TOL) -> bool:
        if self.rejected:
            return True
        if other.rejected:
            return False
        return other.lo - tol <= self.lo and self.hi <= other.hi + tol

    def as_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "status": self.status.value}


class SignAssumption(str, enum.Enum):
    UNKNOWN = "unknown"
    NONNEGATIVE = "nonneg"
    NONPOSITIVE = "nonpos"
    ZERO = "zero"

    @classmethod
    def parse(cls, text: "str | SignAssumption") -> "SignAssumption":
        if isinstance(text, SignAssumption):
            return text
        key = str(text).strip().lower()
        aliases = {
            "?": "unknown", "": "unknown", "none": "unknown",
            ">=0": "nonneg", "nonnegative": "nonneg", "+": "nonneg", "pos": "nonneg",
            "<=0": "nonpos", "nonpositive": "nonpos", "-": "nonpos", "neg": "nonpos",
            "=0": "zero", "0": "zero",
        }
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ConfigurationError(
                f"unknown sign assumption {text!r}; use unknown|nonneg|nonpos|zero"
            ) from None

    @property
    def strict_sign(self) -> int:
        """+1 / -1 for the one-sided assumptions, 0 otherwise."""
        return {SignAssumption.NONNEGATIVE: 1, SignAssumption.NONPOSITIVE: -1}.get(self, 0)


@dataclass(frozen=True)
class AssumptionSet:
    """Sign declarations on the within- and between-group associations."""

    within: SignAssumption = SignAssumption.UNKNOWN
    between: SignAssumption = SignAssumption.UNKNOWN
    contextual_reinforcement: bool = False

    def __post_init__(self):
        object.__setattr__(self, "within", SignAssumption.parse(self.within))
        object.__setattr__(self, "between", SignAssumption.parse(self.between))
        if self.contextual_reinforcement and self.within.strict_sign * self.between.strict_sign < 0:
            raise ConfigurationError(
                "contextual reinforcement requires the within- and between-group "
                f"associations to share a sign; got within={self.within.value}, "
                f"between={self.between.value}"
            )

    def propagated(self) -> "AssumptionSet":
        """Copy a one-sided declared sign onto the undeclared association under CR."""
        if not self.contextual_reinforcement:
            return self
        within, between = self.within, self.between
        if within.strict_sign and between is SignAssumption.UNKNOWN:
            between = within
        elif between.strict_sign and within is SignAssumption.UNKNOWN:
            within = between
        return AssumptionSet(within, between, True)

    @property
    def label(self) -> str:
        cr = ", CR" if self.contextual_reinforcement else ""
        return f"(within={self.within.value}, between={self.between.value}{cr})"

    def as_dict(self) -> dict:
        return {
            "within": self.within.value,
            "between": self.between.value,
            "contextual_reinforcement": self.contextual_reinforcement,
        }


def _readonly(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AggregateData:
    """Per-neighborhood shares, prevalences and mean outcomes.

    ``p`` must already sum to one; use :func:`load_aggregate` to build a
    dataset from raw population counts.
    """

    ids: tuple
    p: np.ndarray
    x: np.ndarray
    y: np.ndarray
    bounds: OutcomeBounds = field(default_factory=OutcomeBounds)
    normalization: float = 1.0

    def __post_init__(self):
        p, x, y = (_readonly(v) for v in (self.p, self.x, self.y))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        n = len(self.ids)
        if not (p.shape == x.shape == y.shape == (n,)) or n == 0:
            raise ValidationError("ids, p, x and y must be non-empty and of equal length")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValidationError("non-finite value in p, x or y")
        for i in range(n):
            _check_row(self.ids[i], p[i], x[i], y[i], self.bounds, row=i + 1)
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise ValidationError(f"population shares sum to {p.sum()!r}, expected 1")
        interior = (p > 0) & (x > 0) & (x < 1)
        if not interior.any():
            raise DegenerateError(
                "no neighborhood with positive population and prevalence strictly "
                "inside (0, 1); group means are not bounded away from trivial cases"
            )

    @classmethod
    def from_records(cls, records: Iterable[NeighborhoodRecord], bounds: OutcomeBounds | None = None):
        records = list(records)
        return cls(
            ids=[r.id for r in records],
            p=[r.p for r in records],
            x=[r.x for r in records],
            y=[r.y for r in records],
            bounds=bounds or OutcomeBounds(),
        )

    @property
    def records(self) -> list[NeighborhoodRecord]:
        return [
            NeighborhoodRecord(i, float(p), float(x), float(y))
            for i, p, x, y in zip(self.ids, self.p, self.x, self.y)
        ]

    def __len__(self) -> int:
        return len(self.ids)

    def resample(self, indices: Sequence[int]) -> "AggregateData":
        """Dataset made of the given rows (repeats allowed), shares renormalised."""
        idx = np.asarray(indices, dtype=int)
        p = self.p[idx]
        total = p.sum()
        if total <= 0:
            raise DegenerateError("resample has zero total population")
        return AggregateData(
            ids=[self.ids[i] for i in idx],
            p=p / total,
            x=self.x[idx],
            y=self.y[idx],
            bounds=self.bounds,
        )

    @cached_property
    def moments(self) -> "Moments":
        return moments(self)


def _check_row(ident, p, x, y, bounds: OutcomeBounds, row: int) -> None:
    where = f"row {row} (id={ident})"
    if p < 0:
        raise ValidationError(f"{where}: population must be nonnegative, got {p}")
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"{where}: x_share {x} outside [0, 1]")
    if not bounds.lo - FEAS_TOL <= y <= bounds.hi + FEAS_TOL:
        raise ValidationError(f"{where}: y_mean {y} outside outcome bounds [{bounds.lo}, {bounds.hi}]")


def load_aggregate(rows: Iterable[Sequence], bounds: OutcomeBounds | None = None) -> AggregateData:
    """Build a dataset from ``(id, population, x_share, y_mean)`` rows.

    Populations are raw counts (or any nonnegative weights) and get
    normalised to shares; the total is kept in ``normalization``.
    """
    bounds = bounds or OutcomeBounds()
    ids, pops, xs, ys = [], [], [], []
    for k, row in enumerate(rows, start=1):
        if len(row) != 4:
            raise ValidationError(f"row {k}: expected 4 fields (id, population, x_share, y_mean), got {len(row)}")
        ident = str(row[0])
        try:
            pop, x, y = (float(v) for v in row[1:])
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"row {k} (id={ident}): non-numeric field ({exc})") from None
        if not all(math.isfinite(v) for v in (pop, x, y)):
            raise ValidationError(f"row {k} (id={ident}): non-finite field")
        _check_row(ident, pop, x, y, bounds, row=k)
        ids.append(ident)
        pops.append(pop)
        xs.append(x)
        ys.append(y)
    if not ids:
        raise ValidationError("no rows")
    total = math.fsum(pops)
    if total <= 0:
        raise DegenerateError("all populations are zero")
    p = np.array(pops) / total
    return AggregateData(ids=ids, p=p, x=xs, y=ys, bounds=bounds, normalization=total)


def read_aggregate_csv(path: str | Path, bounds: OutcomeBounds | None = None) -> AggregateData:
    """Read a ``id,population,x_share,y_mean`` file."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if tuple(header) != AGGREGATE_HEADER:
            raise ValidationError(f"{path}: header must be {','.join(AGGREGATE_HEADER)}, got {','.join(header)}")
        rows = [row for row in reader if row and any(c.strip() for c in row)]
    return load_aggregate(rows, bounds)


def write_aggregate_csv(data: AggregateData, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(AGGREGATE_HEADER)
        for r in data.records:
            w.writerow([r.id, repr(r.p * data.normalization), repr(r.x), repr(r.y)])


@dataclass(frozen=True)
class Moments:
    ex: float
    ey: float
    var_x: float
    var_xn: float
    gamma: float
    cov_xn_yn: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def moments(data: AggregateData) -> Moments:
    p, x, y = data.p, data.x, data.y
    ex = float(p @ x)
    ey = float(p @ y)
    var_x = ex * (1.0 - ex)
    if var_x <= 0:
        raise DegenerateError(f"E[X] = {ex}: one group has zero population mass")
    # centred sums; cheaper cancellation than E[X^2] - E[X]^2
    dx = x - ex
    var_xn = float(p @ (dx * dx))
    cov = float(p @ (dx * (y - ey)))
    return Moments(ex=ex, ey=ey, var_x=var_x, var_xn=var_xn, gamma=var_xn / var_x, cov_xn_yn=cov)


@dataclass(frozen=True, eq=False)
class GroupMeansProfile:
    """Candidate per-neighborhood group means ``Y_n^1`` and ``Y_n^0``."""

    y1: np.ndarray
    y0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "y1", _readonly(self.y1))
        object.__setattr__(self, "y0", _readonly(self.y0))
        if self.y1.shape != self.y0.shape or self.y1.ndim != 1:
            raise ValidationError("y1 and y0 must be 1-d arrays of equal length")

    def mix(self, other: "GroupMeansProfile", alpha: float) -> "GroupMeansProfile":
        return GroupMeansProfile(
            alpha * self.y1 + (1 - alpha) * other.y1,
            alpha * self.y0 + (1 - alpha) * other.y0,
        )


def check_feasible(data: AggregateData, profile: GroupMeansProfile, tol: float = FEAS_TOL) -> None:
    """Raise :class:`FeasibilityError` unless the profile reproduces the data."""
    if profile.y1.shape != data.x.shape:
        raise FeasibilityError(f"profile has {profile.y1.size} neighborhoods, data has {len(data)}")
    lo, hi = data.bounds.lo - tol, data.bounds.hi + tol
    for name, v in (("y1", profile.y1), ("y0", profile.y0)):
        bad = np.flatnonzero((v < lo) | (v > hi))
        if bad.size:
            i = bad[0]
            raise FeasibilityError(f"{name}[{data.ids[i]}] = {v[i]} outside outcome bounds")
    resid = data.x * profile.y1 + (1 - data.x) * profile.y0 - data.y
    bad = np.flatnonzero(np.abs(resid) > tol)
    if bad.size:
        i = bad[0]
        raise FeasibilityError(
            f"adding-up fails at {data.ids[i]}: x*y1 + (1-x)*y0 - y = {resid[i]:.3g}"
        )


def profile_means(data: AggregateData, profile: GroupMeansProfile) -> tuple[float, float, float]:
    """Overall group means ``(Y1, Y0, D)`` implied by a profile."""
    m = data.moments
    w1 = data.p * data.x / m.ex
    w0 = data.p * (1 - data.x) / (1 - m.ex)
    y1 = float(w1 @ profile.y1)
    y0 = float(w0 @ profile.y0)
    return y1, y0, y1 - y0


def deltas_from_profile(data: AggregateData, profile: GroupMeansProfile) -> tuple[float, float]:
    """Between- and within-group associations ``(delta_b, delta_w)`` of a profile.

    ``delta_b`` is the average within-neighborhood covariance of outcome and
    group, ``sum p x (1-x) (y1 - y0)``.  ``delta_w`` averages, over the two
    groups, the covariance of the group's neighborhood mean outcome with
    neighborhood prevalence, where neighborhoods are weighted by the share of
    the group living there (``p x / E[X]`` and ``p (1-x) / (1-E[X])``).
    """
    check_feasible(data, profile)
    m = data.moments
    p, x = data.p, data.x
    delta_b = float(p @ (x * (1 - x) * (profile.y1 - profile.y0)))
    w1 = p * x / m.ex
    w0 = p * (1 - x) / (1 - m.ex)
    delta_w = m.ex * _wcov(w1, profile.y1, x) + (1 - m.ex) * _wcov(w0, profile.y0, x)
    return delta_b, delta_w


def _wcov(w: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = w @ b
    return float(w @ (a * (b - ab)))
