"""Ground truth at desk scale.

Two tools:

* :func:`synthesize_population` builds a finite individual-level
  population with known group means and associations, computed directly
  from the individuals.
* :func:`enumerate_feasible` grids every neighborhood's ``Y_n^1`` over its
  feasible range (``Y_n^0`` follows from adding-up) and records, for every
  sign cell, the extremes of ``D``, ``Y1`` and ``Y0`` over the grid
  profiles in that cell.  :func:`sharpness_check` compares the analytic
  bounds against those extremes.

Enumeration trick: every tracked quantity (``D``, ``Y1``, ``Y0``, both
associations) is an affine function of each ``Y_n^1``.  All neighborhoods but
one are enumerated explicitly; along the last one each sign condition holds
on a contiguous run of grid indices, so its count and extremes follow from
the run's endpoints without visiting the points in between.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numba import njit

from .bounds import bounds_for, method_of_bounds
from .core import (
    AggregateData,
    AssumptionSet,
    GroupMeansProfile,
    Interval,
    NeighborhoodRecord,
    OutcomeBounds,
    SignAssumption,
    load_aggregate,
)
from .errors import ConfigurationError, DegenerateError, InstanceTooLargeError, ValidationError
from .local import local_monotone_bounds, neighborhood_mob, tilde_aggregate, tilde_monotone_bounds
from .micro import MicroData

S = SignAssumption
SIGNS = (S.UNKNOWN, S.NONNEGATIVE, S.NONPOSITIVE, S.ZERO)  # kernel index order
TARGETS = ("D", "Y1", "Y0")
DEFAULT_CAP = 10_000_000
SIGN_EPS = 1e-12


# -- synthetic populations ------------------------------------------------------

@dataclass(frozen=True)
class PopulationConfig:
    """Recipe for a finite population.

    Individual outcomes are ``mu_X(x_n) + u_{n,X} + e_i`` (clipped to the
    bounds), or Bernoulli draws with that mean when ``outcome="binary"``.
    ``mu1``/``mu0`` are polynomial coefficients in prevalence, lowest order
    first.
    """

    n_neighborhoods: int = 20
    size_range: tuple = (50, 200)
    size_multiple: int = 1
    prevalence: str = "uniform"  # uniform | beta | grid
    prevalence_range: tuple = (0.05, 0.95)
    beta: tuple = (2.0, 2.0)
    grid_step: float = 0.05
    mu1: tuple = (0.6, 0.0)
    mu0: tuple = (0.4, 0.0)
    neighborhood_sd: float = 0.05
    individual_sd: float = 0.1
    outcome: str = "continuous"  # continuous | binary
    bounds: tuple = (0.0, 1.0)
    both_groups: bool = True
    seed: int = 0


def _poly(coefs, x):
    return np.polynomial.polynomial.polyval(x, np.asarray(coefs, dtype=float))


@dataclass(frozen=True, eq=False)
class SyntheticTruth:
    config: PopulationConfig
    ids: tuple
    sizes: np.ndarray
    n1: np.ndarray
    member: np.ndarray  # neighborhood index of each individual
    x: np.ndarray  # individual group indicator
    y: np.ndarray  # individual outcome
    y1_n: np.ndarray
    y0_n: np.ndarray
    y1: float
    y0: float
    d: float
    delta_b: float
    delta_w: float
    data: AggregateData

    @property
    def profile(self) -> GroupMeansProfile:
        return GroupMeansProfile(self.y1_n, self.y0_n)

    def mu(self, xv, group: int):
        return _poly(self.config.mu1 if group == 1 else self.config.mu0, xv)

    def mu_prime(self, xv, group: int):
        c = np.polynomial.polynomial.polyder(np.asarray(self.config.mu1 if group == 1 else self.config.mu0, float))
        return _poly(c, xv) if c.size else np.zeros_like(np.asarray(xv, dtype=float))

    def overall_mu_prime(self, xv):
        """Slope of ``x mu1(x) + (1 - x) mu0(x)``."""
        xv = np.asarray(xv, dtype=float)
        return (self.mu(xv, 1) - self.mu(xv, 0)
                + xv * self.mu_prime(xv, 1) + (1 - xv) * self.mu_prime(xv, 0))

    def to_micro(self, n: Optional[int] = None, seed: Optional[int] = None) -> MicroData:
        """Individual rows, all of them or ``n`` drawn with replacement."""
        if n is None:
            idx = np.arange(self.x.size)
        else:
            idx = np.random.default_rng(seed).integers(0, self.x.size, size=n)
        xn = self.data.x[self.member[idx]]
        return MicroData(
            x=self.x[idx], y=self.y[idx], xn=xn, weight=np.ones(idx.size),
            stratum=np.asarray(self.ids, dtype=object)[self.member[idx]],
        )


def _population_truth(member, x, y, n_nb):
    """Group means and associations from the individuals themselves."""
    x = x.astype(float)
    total = x.size
    size = np.bincount(member, minlength=n_nb).astype(float)
    p = size / total
    mx = np.bincount(member, weights=x, minlength=n_nb) / size
    my = np.bincount(member, weights=y, minlength=n_nb) / size
    mxy = np.bincount(member, weights=x * y, minlength=n_nb) / size
    delta_b = float(p @ (mxy - mx * my))
    xn = mx[member]
    delta_w = 0.0
    for g in (0, 1):
        sel = x == g
        if sel.any():
            cov = np.mean(y[sel] * xn[sel]) - np.mean(y[sel]) * np.mean(xn[sel])
            delta_w += sel.mean() * cov
    y1 = float(np.mean(y[x == 1]))
    y0 = float(np.mean(y[x == 0]))
    return y1, y0, delta_b, float(delta_w)


def synthesize_population(config: PopulationConfig | None = None, **overrides) -> SyntheticTruth:
    cfg = config or PopulationConfig()
    if overrides:
        cfg = PopulationConfig(**{**cfg.__dict__, **overrides})
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_neighborhoods
    lo_b, hi_b = cfg.bounds
    if n < 1:
        raise ValidationError("need at least one neighborhood")
    k = cfg.size_multiple
    smin, smax = cfg.size_range
    sizes = k * rng.integers(max(1, -(-smin // k)), smax // k + 1, size=n)
    if np.any(sizes < 2) and cfg.both_groups:
        raise ValidationError("neighborhoods need at least two people to hold both groups")
    if cfg.prevalence == "uniform":
        share = rng.uniform(*cfg.prevalence_range, size=n)
    elif cfg.prevalence == "beta":
        share = rng.beta(*cfg.beta, size=n)
    elif cfg.prevalence == "grid":
        steps = np.arange(1, int(round(1 / cfg.grid_step)))
        lo_p, hi_p = cfg.prevalence_range
        values = steps * cfg.grid_step
        values = values[(values >= lo_p - 1e-12) & (values <= hi_p + 1e-12)]
        share = rng.choice(values, size=n)
    else:
        raise ValidationError(f"unknown prevalence law {cfg.prevalence!r}")
    n1 = np.rint(share * sizes).astype(int)
    if cfg.both_groups:
        n1 = np.clip(n1, 1, sizes - 1)
    xn = n1 / sizes
    shocks = rng.normal(0.0, cfg.neighborhood_sd, size=(n, 2)) if cfg.neighborhood_sd > 0 else np.zeros((n, 2))

    member = np.repeat(np.arange(n), sizes)
    offsets = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    pos = np.arange(member.size) - offsets[member]
    x = (pos < n1[member]).astype(np.int8)
    mean = np.where(x == 1, _poly(cfg.mu1, xn[member]) + shocks[member, 1],
                    _poly(cfg.mu0, xn[member]) + shocks[member, 0])
    if cfg.outcome == "continuous":
        noise = rng.normal(0.0, cfg.individual_sd, size=member.size) if cfg.individual_sd > 0 else 0.0
        y = np.clip(mean + noise, lo_b, hi_b)
    elif cfg.outcome == "binary":
        prob = np.clip((mean - lo_b) / (hi_b - lo_b), 0, 1)
        y = np.where(rng.random(member.size) < prob, hi_b, lo_b)
    else:
        raise ValidationError(f"unknown outcome law {cfg.outcome!r}")
    y = y.astype(float)

    ids = tuple(f"n{i}" for i in range(n))
    ysum = np.bincount(member, weights=y, minlength=n)
    y1sum = np.bincount(member, weights=y * x, minlength=n)
    ybar = ysum / sizes
    with np.errstate(invalid="ignore", divide="ignore"):
        y1_n = np.where(n1 > 0, y1sum / n1, ybar)
        y0_n = np.where(sizes - n1 > 0, (ysum - y1sum) / (sizes - n1), ybar)
    data = load_aggregate(
        [(i, s, xv, yv) for i, s, xv, yv in zip(ids, sizes, xn, ybar)],
        OutcomeBounds(lo_b, hi_b),
    )
    y1, y0, delta_b, delta_w = _population_truth(member, x, y, n)
    return SyntheticTruth(
        config=cfg, ids=ids, sizes=sizes, n1=n1, member=member, x=x, y=y,
        y1_n=y1_n, y0_n=y0_n, y1=y1, y0=y0, d=y1 - y0,
        delta_b=delta_b, delta_w=delta_w, data=data,
    )


# -- the scan kernel --------------------------------------------------------------

@njit(cache=True, nogil=True)
def _krange(v, c, lo, hi, g):
    """Index run ``[a, b]`` of ``k`` in ``0..g-1`` with ``lo <= v + c k <= hi``."""
    if c > 0:
        a = np.ceil((lo - v) / c - 1e-9)
        b = np.floor((hi - v) / c + 1e-9)
    elif c < 0:
        a = np.ceil((hi - v) / c - 1e-9)
        b = np.floor((lo - v) / c + 1e-9)
    else:
        if lo <= v <= hi:
            return 0.0, g - 1.0
        return 1.0, 0.0
    return max(a, 0.0), min(b, g - 1.0)


@njit(cache=True, nogil=True)
def _scan_kernel(const, contrib, sizes, last_c, g_last, low, up, i_lo, i_hi, count, vmin, vmax):
    n_o = sizes.shape[0]
    idx = np.zeros(n_o, np.int64)
    if n_o > 0:
        idx[0] = i_lo
    base = np.empty(5)
    ka = np.empty((2, 4))
    kb = np.empty((2, 4))
    while True:
        for q in range(5):
            s = const[q]
            for j in range(n_o):
                s += contrib[j, idx[j], q]
            base[q] = s
        for r in range(2):
            for a in range(4):
                lo_k, hi_k = _krange(base[3 + r], last_c[3 + r], low[r, a], up[r, a], g_last)
                ka[r, a] = lo_k
                kb[r, a] = hi_k
        for a in range(4):
            for b in range(4):
                k0 = max(ka[0, a], ka[1, b])
                k1 = min(kb[0, a], kb[1, b])
                if k0 <= k1:
                    count[a, b] += np.int64(k1 - k0 + 1.0)
                    for t in range(3):
                        v0 = base[t] + last_c[t] * k0
                        v1 = base[t] + last_c[t] * k1
                        if v1 < v0:
                            v0, v1 = v1, v0
                        if v0 < vmin[a, b, t]:
                            vmin[a, b, t] = v0
                        if v1 > vmax[a, b, t]:
                            vmax[a, b, t] = v1
        if n_o == 0:
            break
        j = n_o - 1
        while True:
            idx[j] += 1
            if j == 0 or idx[j] < sizes[j]:
                break
            idx[j] = 0
            j -= 1
        if idx[0] >= i_hi:
            break


@dataclass(frozen=True)
class AffineModel:
    """``Q = const[q] + sum_n coef[n, q] * t_n`` over grids ``t_n`` in ``[lo_n, hi_n]``.

    Columns: D, Y1, Y0, within association, between association.
    """

    lo: np.ndarray
    hi: np.ndarray
    grid: np.ndarray  # grid points per coordinate (1 for fixed coordinates)
    const: np.ndarray
    coef: np.ndarray

    def values(self, t: np.ndarray) -> np.ndarray:
        return self.const + t @ self.coef

    def grid_values(self, n: int) -> np.ndarray:
        if self.grid[n] == 1:
            return np.array([self.lo[n]])
        return np.linspace(self.lo[n], self.hi[n], int(self.grid[n]))

    def d_scale(self) -> np.ndarray:
        """``|dQ/dD|`` for each column, read off the coefficients.

        All columns move proportionally along the grid directions here, so
        the ratio is the same for every coordinate; the max is taken for
        safety.
        """
        cd = self.coef[:, 0]
        use = np.abs(cd) > 1e-15
        if not use.any():
            return np.ones(5)
        return np.max(np.abs(self.coef[use] / cd[use, None]), axis=0)


def _grid_sizes(lo, hi, grid_points):
    return np.where(hi - lo > 0, grid_points, 1).astype(np.int64)


def global_model(data: AggregateData, grid_points: int) -> AffineModel:
    """Affine description of the aggregate problem in the ``Y_n^1`` coordinates.

    ``Y0 = sum p (y - x t) / (1 - E[X])`` and the within association is
    ``E[X] Cov_1(t, x) + (1 - E[X]) Cov_0(Y^0, x)`` under the group-specific
    neighborhood weights, which works out to a per-neighborhood coefficient
    ``p x (xbar_0 - xbar_1)``.
    """
    m = data.moments
    b = data.bounds
    p, x, y = data.p, data.x, data.y
    interior = (x > 0) & (x < 1) & (p > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_hi = np.where(interior, np.minimum((y - b.lo * (1 - x)) / x, b.hi), y)
        t_lo = np.where(interior, np.maximum((y - b.hi * (1 - x)) / x, b.lo), y)
    xbar1 = float(p @ (x * x)) / m.ex
    xbar0 = float(p @ ((1 - x) * x)) / (1 - m.ex)
    c_y1 = p * x / m.ex
    c_y0 = -p * x / (1 - m.ex)
    const_y0 = float(p @ y) / (1 - m.ex)
    coef = np.column_stack([c_y1 - c_y0, c_y1, c_y0, p * x * (xbar0 - xbar1), p * x])
    const = np.array([-const_y0, 0.0, const_y0, float(p @ (y * (x - xbar0))), -float(p @ (x * y))])
    return AffineModel(t_lo, t_hi, _grid_sizes(t_lo, t_hi, grid_points), const, coef)


def local_model(record: NeighborhoodRecord, bounds: OutcomeBounds, slope: float, grid_points: int) -> AffineModel:
    """One neighborhood: ``delta_B,n = x(1-x) D_n`` and ``delta_W,n = mu' - D_n``."""
    x, y = record.x, record.y
    if not 0 < x < 1:
        raise ValidationError("local enumeration needs an interior prevalence")
    lo = np.array([max((y - bounds.hi * (1 - x)) / x, bounds.lo)])
    hi = np.array([min((y - bounds.lo * (1 - x)) / x, bounds.hi)])
    coef = np.array([[1 / (1 - x), 1.0, -x / (1 - x), -1 / (1 - x), x]])
    const = np.array([-y / (1 - x), 0.0, y / (1 - x), slope + y / (1 - x), -x * y])
    return AffineModel(lo, hi, _grid_sizes(lo, hi, grid_points), const, coef)


def tilde_model(data: AggregateData, prevalence: float, slope: float, grid_points: int,
                tolerance: Optional[float] = None) -> AffineModel:
    """Pooled neighborhoods at one prevalence: ``D~ = sum w D_n`` and so on."""
    group = tilde_aggregate(data, prevalence, tolerance)
    pos = {i: k for k, i in enumerate(data.ids)}
    members = [pos[i] for i in group.members]
    x = data.x[members]
    y = data.y[members]
    w = np.asarray(group.weights)
    if np.any((x <= 0) | (x >= 1)):
        raise ValidationError("tilde enumeration needs interior prevalences")
    b = data.bounds
    lo = np.maximum((y - b.hi * (1 - x)) / x, b.lo)
    hi = np.minimum((y - b.lo * (1 - x)) / x, b.hi)
    xt = group.x
    c_y1 = w
    c_y0 = -w * x / (1 - x)
    k_y0 = float(w @ (y / (1 - x)))
    c_d = c_y1 - c_y0
    coef = np.column_stack([c_d, c_y1, c_y0, -c_d, xt * (1 - xt) * c_d])
    const = np.array([-k_y0, 0.0, k_y0, slope + k_y0, -xt * (1 - xt) * k_y0])
    return AffineModel(lo, hi, _grid_sizes(lo, hi, grid_points), const, coef)


# -- enumeration ------------------------------------------------------------------

@dataclass(frozen=True)
class CellExtremes:
    count: int
    lo: dict
    hi: dict

    @property
    def empty(self) -> bool:
        return self.count == 0


@dataclass(frozen=True)
class EnumerationResult:
    grid_points: int
    n_profiles: int
    cells: dict  # (within, between) -> CellExtremes, plus "CR"
    zero_band: tuple  # (within, between) half-widths of the "= 0" bands
    d_scale: tuple  # |dQ/dD| for D, Y1, Y0, within, between
    overall: CellExtremes

    def cell(self, assumptions: AssumptionSet) -> CellExtremes:
        if assumptions.contextual_reinforcement:
            if assumptions.within is S.UNKNOWN and assumptions.between is S.UNKNOWN:
                return self.cells["CR"]
            # a declared sign is propagated, as in the analytic bounds
            a = assumptions.propagated()
            return self.cells[(a.within, a.between)]
        return self.cells[(assumptions.within, assumptions.between)]


def enumerate_model(model: AffineModel, cap: int = DEFAULT_CAP, workers: int = 1) -> EnumerationResult:
    n = model.grid.size
    last = int(np.argmax(model.grid))
    others = [j for j in range(n) if j != last]
    sizes = model.grid[others].astype(np.int64)
    materialised = int(np.prod(sizes)) if others else 1
    if materialised > cap:
        raise InstanceTooLargeError(
            f"enumeration would visit {materialised:,} partial profiles, above the cap of {cap:,}; "
            "use fewer grid points or fewer neighborhoods"
        )
    g_last = int(model.grid[last])
    t_last = model.grid_values(last)
    step = (t_last[-1] - t_last[0]) / (g_last - 1) if g_last > 1 else 0.0
    const = model.const + model.coef[last] * t_last[0]
    last_c = model.coef[last] * step
    gmax = int(sizes.max()) if others else 1
    contrib = np.zeros((max(len(others), 1), gmax, 5))
    for j, o in enumerate(others):
        contrib[j, : sizes[j]] = np.outer(model.grid_values(o), model.coef[o])
    if not others:
        contrib = contrib[:0]

    steps = np.where(model.grid > 1, (model.hi - model.lo) / np.maximum(model.grid - 1, 1), 0.0)
    band = np.abs(model.coef[:, 3:]).T @ steps  # within, between
    low = np.empty((2, 4))
    up = np.empty((2, 4))
    for r in range(2):
        low[r] = (-np.inf, -SIGN_EPS, -np.inf, -band[r] - SIGN_EPS)
        up[r] = (np.inf, np.inf, SIGN_EPS, band[r] + SIGN_EPS)

    def run(i_lo, i_hi):
        count = np.zeros((4, 4), np.int64)
        vmin = np.full((4, 4, 3), np.inf)
        vmax = np.full((4, 4, 3), -np.inf)
        _scan_kernel(const, contrib, sizes, last_c, float(g_last), low, up, i_lo, i_hi, count, vmin, vmax)
        return count, vmin, vmax

    if others and workers > 1 and sizes[0] > 1:
        edges = np.linspace(0, sizes[0], min(workers, sizes[0]) + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: run(*ab), zip(edges[:-1], edges[1:])))
        count = sum(p[0] for p in parts)
        vmin = np.minimum.reduce([p[1] for p in parts])
        vmax = np.maximum.reduce([p[2] for p in parts])
    else:
        count, vmin, vmax = run(0, int(sizes[0]) if others else 1)

    def extremes(a, b):
        return CellExtremes(
            int(count[a, b]),
            {t: float(vmin[a, b, k]) for k, t in enumerate(TARGETS)},
            {t: float(vmax[a, b, k]) for k, t in enumerate(TARGETS)},
        )

    cells = {(SIGNS[a], SIGNS[b]): extremes(a, b) for a in range(4) for b in range(4)}
    pp, mm = cells[(S.NONNEGATIVE, S.NONNEGATIVE)], cells[(S.NONPOSITIVE, S.NONPOSITIVE)]
    cells["CR"] = CellExtremes(
        pp.count + mm.count,
        {t: min(pp.lo[t], mm.lo[t]) for t in TARGETS},
        {t: max(pp.hi[t], mm.hi[t]) for t in TARGETS},
    )
    return EnumerationResult(
        grid_points=int(model.grid.max()),
        n_profiles=int(np.prod(model.grid.astype(float))),
        cells=cells,
        zero_band=(float(band[0]), float(band[1])),
        d_scale=tuple(float(v) for v in model.d_scale()),
        overall=cells[(S.UNKNOWN, S.UNKNOWN)],
    )


def enumerate_feasible(data: AggregateData, grid_points: int = 201, cap: int = DEFAULT_CAP,
                       workers: int = 1) -> EnumerationResult:
    """Grid search over feasible profiles, with per-cell extremes."""
    if grid_points < 2:
        raise ValidationError("grid_points must be at least 2")
    return enumerate_model(global_model(data, grid_points), cap, workers)


def grid_profile(data: AggregateData, indices: Sequence[int], grid_points: int) -> GroupMeansProfile:
    """The profile at given grid indices (one per neighborhood)."""
    model = global_model(data, grid_points)
    t = np.array([model.grid_values(n)[min(k, model.grid[n] - 1)] for n, k in enumerate(indices)])
    with np.errstate(divide="ignore", invalid="ignore"):
        y0 = np.where(data.x < 1, (data.y - data.x * t) / (1 - data.x), data.y)
    return GroupMeansProfile(t, y0)


# -- comparisons ------------------------------------------------------------------

@dataclass(frozen=True)
class CellCheck:
    target: str
    cell: str
    analytic: Interval
    enumerated: Optional[tuple]  # (lo, hi) or None when the cell is empty
    count: int
    tolerance: float
    passed: bool
    note: str = ""

    def line(self) -> str:
        enum = "empty" if self.enumerated is None else f"[{self.enumerated[0]:.6f}, {self.enumerated[1]:.6f}]"
        a = self.analytic
        ana = f"rejected ({a.lo:.6f} > {a.hi:.6f})" if a.rejected else f"[{a.lo:.6f}, {a.hi:.6f}]"
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.target:<3} {self.cell:<42} analytic {ana:<32} grid {enum:<26} tol {self.tolerance:.2e} {self.note}"


@dataclass(frozen=True)
class SharpnessReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


def compare(target: str, label: str, analytic: Interval, cell: CellExtremes, tol: float) -> CellCheck:
    """Pass rule shared by the global, local and tilde audits.

    A rejected analytic cell must enumerate empty unless the contradiction is
    within tolerance.  A non-rejected one must match the enumerated extremes
    at both ends, or, if the grid missed the cell entirely, be narrower than
    the tolerance.
    """
    enum = None if cell.empty else (cell.lo[target], cell.hi[target])
    if analytic.rejected:
        margin = abs(analytic.lo - analytic.hi)
        if margin <= tol:
            return CellCheck(target, label, analytic, enum, cell.count, tol, True, "rejection within tolerance")
        ok = cell.empty
        return CellCheck(target, label, analytic, enum, cell.count, tol, ok, "" if ok else "grid profiles survive a rejected cell")
    if cell.empty:
        ok = analytic.width <= tol
        return CellCheck(target, label, analytic, enum, cell.count, tol, ok,
                         "narrow cell missed by grid" if ok else "analytic interval not attained on grid")
    ok = abs(analytic.lo - enum[0]) <= tol and abs(analytic.hi - enum[1]) <= tol
    return CellCheck(target, label, analytic, enum, cell.count, tol, ok)


def _tolerance(result: EnumerationResult, target: str, width: float, assumptions: AssumptionSet) -> float:
    g = result.grid_points
    tol = 2 * width / (g - 1) if width > 0 else 1e-9
    scale = dict(zip(("D",) + TARGETS[1:] + ("W", "B"), result.d_scale))
    extra = 0.0
    cell = assumptions.propagated() if assumptions.contextual_reinforcement else assumptions
    # an "= 0" band of half-width b in an association is b / |d assoc / dD| in D
    if cell.within is S.ZERO and scale["W"] > 0:
        extra += result.zero_band[0] / scale["W"]
    if cell.between is S.ZERO and scale["B"] > 0:
        extra += result.zero_band[1] / scale["B"]
    return tol + scale[target] * extra + 1e-12


def cells_to_audit() -> list[AssumptionSet]:
    out = [AssumptionSet(w, b) for w in SIGNS for b in SIGNS]
    out.append(AssumptionSet(contextual_reinforcement=True))
    return out


def sharpness_check(data: AggregateData, assumptions: AssumptionSet | Sequence[AssumptionSet] | None = None,
                    grid_points: int = 201, cap: int = DEFAULT_CAP, workers: int = 1,
                    enumeration: Optional[EnumerationResult] = None) -> SharpnessReport:
    """Compare analytic global bounds with grid extremes, for one cell or all of them."""
    if assumptions is None:
        cells = cells_to_audit()
    elif isinstance(assumptions, AssumptionSet):
        cells = [assumptions]
    else:
        cells = list(assumptions)
    result = enumeration or enumerate_feasible(data, grid_points, cap, workers)
    mob = method_of_bounds(data)
    checks = []
    for a in cells:
        for target in TARGETS:
            report = bounds_for(data, target, a)
            tol = _tolerance(result, target, mob.for_target(target).width, a)
            checks.append(compare(target, a.label, report.interval, result.cell(a), tol))
    return SharpnessReport(tuple(checks))


def local_sharpness_check(record: NeighborhoodRecord, bounds: OutcomeBounds, slope: float,
                          grid_points: int = 201, cells: Sequence[AssumptionSet] | None = None) -> SharpnessReport:
    """Local bounds for one neighborhood against a 1-d grid over ``Y_n^1``."""
    result = enumerate_model(local_model(record, bounds, slope, grid_points))
    mob = neighborhood_mob(record, bounds)
    checks = []
    for a in cells or cells_to_audit():
        rep = local_monotone_bounds(record, bounds, a, slope=slope, assume_same_outcome=True)
        for target, interval, m in (("D", rep.d, mob.d), ("Y1", rep.y1, mob.y1), ("Y0", rep.y0, mob.y0)):
            tol = _tolerance(result, target, m.width, a)
            checks.append(compare(target, f"local {a.label}", interval, result.cell(a), tol))
    return SharpnessReport(tuple(checks))


def tilde_sharpness_check(data: AggregateData, prevalence: float, slope: float, grid_points: int = 201,
                          cells: Sequence[AssumptionSet] | None = None, tolerance: Optional[float] = None,
                          cap: int = DEFAULT_CAP) -> SharpnessReport:
    """Pooled bounds at one prevalence against a grid over the members' ``Y_n^1``."""
    result = enumerate_model(tilde_model(data, prevalence, slope, grid_points, tolerance), cap)
    mob = tilde_aggregate(data, prevalence, tolerance).mob
    checks = []
    for a in cells or cells_to_audit():
        rep = tilde_monotone_bounds(data, prevalence, a, slope=slope, tolerance=tolerance)
        for target, interval, m in (("D", rep.d, mob.d), ("Y1", rep.y1, mob.y1), ("Y0", rep.y0, mob.y0)):
            tol = _tolerance(result, target, m.width, a)
            checks.append(compare(target, f"tilde {a.label}", interval, result.cell(a), tol))
    return SharpnessReport(tuple(checks))


# -- random instances --------------------------------------------------------------

def random_instance(rng: np.random.Generator, n: int, bounds: OutcomeBounds | None = None,
                    flat: bool = False, duplicate: int = 0) -> AggregateData:
    """Random aggregate data generated from a random feasible profile.

    ``flat`` gives every neighborhood the same outcome, so both associations
    can vanish.  ``duplicate`` makes that many neighborhoods share one
    prevalence value (for the pooled bounds).
    """
    bounds = bounds or OutcomeBounds()
    for _ in range(100):
        pops = rng.uniform(0.5, 2.0, size=n)
        x = rng.uniform(0.05, 0.95, size=n)
        if duplicate:
            x[:duplicate] = x[0]
        if flat:
            y = np.full(n, rng.uniform(bounds.lo, bounds.hi))
        else:
            y1 = rng.uniform(bounds.lo, bounds.hi, size=n)
            y0 = rng.uniform(bounds.lo, bounds.hi, size=n)
            y = x * y1 + (1 - x) * y0
        try:
            data = load_aggregate([(f"n{i}", pops[i], x[i], y[i]) for i in range(n)], bounds)
        except DegenerateError:
            continue
        if duplicate and duplicate == n:
            return data
        if data.moments.var_xn > 1e-6:
            return data
    raise DegenerateError("could not draw a non-degenerate instance")
