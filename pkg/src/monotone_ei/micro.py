"""Conditional covariances from individual-level data.

Used to back up sign assumptions with auxiliary microdata.  The estimator of
``E[Cov(A, B | C)]`` is

    theta = sum_c P(C=c) Var(A | C=c) beta_c

with ``beta_c`` the weighted least-squares slope of ``B`` on ``A`` inside
stratum ``c``, and its variance is approximated by
``sum_c P(C=c)^2 Var(A | C=c)^2 SE(beta_c)^2`` treating the stratum shares as
known.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from statistics import NormalDist
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InsufficientDataError, ValidationError

MICRO_HEADER = ("x", "y", "x_n", "weight", "stratum")
DEFAULT_BIN_WIDTH = 0.05


@dataclass(frozen=True)
class MicroRecord:
    x: int
    y: float
    xn: float
    weight: float = 1.0
    stratum: str = ""


@dataclass(frozen=True, eq=False)
class MicroData:
    """Column view of individual rows."""

    x: np.ndarray
    y: np.ndarray
    xn: np.ndarray
    weight: np.ndarray
    stratum: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        xn = np.asarray(self.xn, dtype=float)
        w = np.asarray(self.weight, dtype=float)
        s = np.asarray(self.stratum).astype(str)
        n = x.size
        if not (y.size == xn.size == w.size == s.size == n):
            raise ValidationError("micro columns have different lengths")
        if n == 0:
            raise ValidationError("no micro rows")
        if not np.all(np.isin(x, (0.0, 1.0))):
            raise ValidationError("group indicator x must be 0 or 1")
        if np.any((xn < 0) | (xn > 1)) or not np.all(np.isfinite(xn)):
            raise ValidationError("x_n must lie in [0, 1]")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValidationError("weights must be nonnegative and finite")
        if not np.all(np.isfinite(y)):
            raise ValidationError("non-finite outcome")
        for name, v in (("x", x), ("y", y), ("xn", xn), ("weight", w), ("stratum", s)):
            object.__setattr__(self, name, v)

    @classmethod
    def from_records(cls, records: Iterable[MicroRecord]) -> "MicroData":
        rs = list(records)
        return cls(
            x=[r.x for r in rs], y=[r.y for r in rs], xn=[r.xn for r in rs],
            weight=[r.weight for r in rs], stratum=[r.stratum for r in rs],
        )

    def __len__(self) -> int:
        return self.x.size


def read_micro_csv(path: str | Path) -> MicroData:
    """Read a ``x,y,x_n,weight,stratum`` file; a blank or missing weight means 1."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = [f.strip() for f in (reader.fieldnames or [])]
        missing = [c for c in MICRO_HEADER if c != "weight" and c not in fields]
        if missing:
            raise ValidationError(f"{path}: missing column(s) {', '.join(missing)}; expected {','.join(MICRO_HEADER)}")
        cols = {c: [] for c in MICRO_HEADER}
        for k, raw in enumerate(reader, start=2):
            row = {(key or "").strip(): (val or "").strip() for key, val in raw.items()}
            if not any(row.values()):
                continue
            try:
                cols["x"].append(float(row["x"]))
                cols["y"].append(float(row["y"]))
                cols["x_n"].append(float(row["x_n"]))
                cols["weight"].append(float(row["weight"]) if row.get("weight") else 1.0)
            except ValueError as exc:
                raise ValidationError(f"{path}: line {k}: {exc}") from None
            cols["stratum"].append(row["stratum"])
    return MicroData(cols["x"], cols["y"], cols["x_n"], cols["weight"], cols["stratum"])


@dataclass(frozen=True)
class CovarianceEstimate:
    theta: float
    se: float
    strata_used: int
    strata_dropped: int

    @property
    def z(self) -> float:
        if self.se > 0:
            return self.theta / self.se
        return math.copysign(math.inf, self.theta) if self.theta != 0 else 0.0

    def as_dict(self) -> dict:
        return {"theta": self.theta, "se": self.se, "z": self.z,
                "strata_used": self.strata_used, "strata_dropped": self.strata_dropped}


def _stratum_terms(a, b, w):
    """``(Var_w(A), beta, SE(beta))`` or ``None`` when the stratum is unusable."""
    keep = w > 0
    a, b, w = a[keep], b[keep], w[keep]
    n = a.size
    if n < 2:
        return None
    v1 = w.sum()
    v2 = (w * w).sum()
    abar = (w @ a) / v1
    bbar = (w @ b) / v1
    da = a - abar
    sxx = float(w @ (da * da))
    # relative cut: differences in A at the rounding level are not variation
    if sxx <= 1e-24 * v1 * max(1.0, float(np.max(np.abs(a))) ** 2):
        return None
    # reliability-weights denominator; n - 1 for unit weights
    var_a = sxx / (v1 - v2 / v1)
    beta = float(w @ (da * (b - bbar))) / sxx
    if n > 2:
        resid = b - bbar - beta * da
        sigma2 = float(w @ (resid * resid)) / (n - 2)
        se = math.sqrt(sigma2 / sxx)
    else:
        se = 0.0
    return var_a, beta, se


def conditional_covariance(a, b=None, weight=None, stratum=None) -> CovarianceEstimate:
    """Estimate ``E[Cov(A, B | C)]`` and its standard error.

    Accepts either four aligned columns or a single sequence of
    ``(a, b, weight, stratum)`` rows.  Strata with fewer than two
    positive-weight rows or no variation in ``A`` are dropped and counted.
    """
    if b is None:
        rows = list(a)
        if not rows:
            raise InsufficientDataError("no rows")
        a, b, weight, stratum = zip(*rows)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    w = np.ones_like(a) if weight is None else np.asarray(weight, dtype=float)
    s = np.zeros(a.size, dtype=int) if stratum is None else np.asarray(stratum)
    if not (a.size == b.size == w.size == s.size):
        raise ValidationError("columns have different lengths")
    if np.any(w < 0):
        raise ValidationError("weights must be nonnegative")
    total = w.sum()
    if a.size == 0 or total <= 0:
        raise InsufficientDataError("no rows with positive weight")
    keys, inverse = np.unique(s, return_inverse=True)
    order = np.argsort(inverse, kind="stable")
    bounds = np.searchsorted(inverse[order], np.arange(keys.size + 1))
    theta, var, used, dropped = 0.0, 0.0, 0, 0
    for k in range(keys.size):
        idx = order[bounds[k]:bounds[k + 1]]
        terms = _stratum_terms(a[idx], b[idx], w[idx])
        if terms is None:
            dropped += 1
            continue
        var_a, beta, se = terms
        share = w[idx].sum() / total
        theta += share * var_a * beta
        var += (share * var_a * se) ** 2
        used += 1
    if used == 0:
        raise InsufficientDataError(
            f"no stratum has two or more weighted rows with variation in A ({dropped} dropped)"
        )
    return CovarianceEstimate(theta=float(theta), se=math.sqrt(var), strata_used=used, strata_dropped=dropped)


def xn_bins(xn, width: float = DEFAULT_BIN_WIDTH) -> np.ndarray:
    """Bin index of each prevalence; edges at multiples of ``width``.

    The top edge folds into the last bin, and values sitting on an edge up to
    rounding noise go to the bin above it.
    """
    if not width > 0:
        raise ValidationError(f"bin width must be positive, got {width}")
    n_bins = max(1, int(math.ceil(1 / width - 1e-9)))
    idx = np.floor(np.asarray(xn, dtype=float) / width + 1e-9).astype(int)
    return np.clip(idx, 0, n_bins - 1)


@dataclass(frozen=True)
class DeltaSignEstimates:
    delta_w: Optional[CovarianceEstimate]
    delta_b: Optional[CovarianceEstimate]
    delta_w_reason: Optional[str] = None
    delta_b_reason: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "delta_w": self.delta_w.as_dict() if self.delta_w else None,
            "delta_b": self.delta_b.as_dict() if self.delta_b else None,
            "delta_w_reason": self.delta_w_reason,
            "delta_b_reason": self.delta_b_reason,
        }


def estimate_delta_signs(micro: MicroData | Sequence[MicroRecord], xn_bin_width: float = DEFAULT_BIN_WIDTH,
                         strata: str = "bins") -> DeltaSignEstimates:
    """Estimate the within- and between-group associations.

    ``delta_w`` conditions on the group (``A = X_N``, ``C = X``).  ``delta_b``
    conditions on binned prevalence (``A = X``, ``C = bin(X_N)``), or on the
    ``stratum`` column when ``strata="label"`` and on exact ``X_N`` when
    ``strata="exact"``.  An estimate that cannot be formed is ``None`` with a
    reason; if neither can, :class:`InsufficientDataError` is raised.
    """
    if not isinstance(micro, MicroData):
        micro = MicroData.from_records(micro)
    out, reasons = {}, {}
    try:
        out["w"] = conditional_covariance(micro.xn, micro.y, micro.weight, micro.x.astype(int))
    except InsufficientDataError as exc:
        out["w"], reasons["w"] = None, f"within-group association: {exc}"
    if strata == "bins":
        c = xn_bins(micro.xn, xn_bin_width)
    elif strata == "label":
        c = micro.stratum
    elif strata == "exact":
        c = micro.xn
    else:
        raise ValidationError(f"strata must be bins, label or exact, got {strata!r}")
    try:
        out["b"] = conditional_covariance(micro.x, micro.y, micro.weight, c)
    except InsufficientDataError as exc:
        out["b"], reasons["b"] = None, f"between-group association: {exc}"
    if out["w"] is None and out["b"] is None:
        raise InsufficientDataError("; ".join(reasons.values()))
    return DeltaSignEstimates(out["w"], out["b"], reasons.get("w"), reasons.get("b"))


def sign_verdict(estimate: Optional[CovarianceEstimate], level: float = 0.95) -> str:
    """``positive``, ``negative`` or ``indeterminate`` at a two-sided level."""
    if estimate is None:
        return "indeterminate"
    if not 0 < level < 1:
        raise ValidationError(f"level must be in (0, 1), got {level}")
    crit = NormalDist().inv_cdf(1 - (1 - level) / 2)
    z = estimate.z
    if z > crit:
        return "positive"
    if z < -crit:
        return "negative"
    return "indeterminate"
