import numpy as np
import pytest
from hypothesis import strategies as st

from monotone_ei import OutcomeBounds, load_aggregate

DATA_DIR = __import__("pathlib").Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def dataset_a():
    return load_aggregate([("a", 100, 0.2, 0.3), ("b", 100, 0.8, 0.9)])


@pytest.fixture
def dataset_a_path():
    return DATA_DIR / "dataset_a.csv"


def make_data(rows, bounds=None):
    return load_aggregate(rows, bounds or OutcomeBounds())


@st.composite
def aggregate_data(draw, min_size=2, max_size=8, bounds=(0.0, 1.0)):
    """Aggregate data generated from a random feasible profile."""
    lo, hi = bounds
    n = draw(st.integers(min_size, max_size))
    unit = st.floats(0.0, 1.0, allow_nan=False)
    pops = [draw(st.floats(0.1, 10.0)) for _ in range(n)]
    xs = [draw(st.floats(0.02, 0.98)) for _ in range(n)]
    y1 = [lo + (hi - lo) * draw(unit) for _ in range(n)]
    y0 = [lo + (hi - lo) * draw(unit) for _ in range(n)]
    ys = [min(hi, max(lo, x * a + (1 - x) * b)) for x, a, b in zip(xs, y1, y0)]
    # keep some spread in prevalence so the regression slope is defined
    if max(xs) - min(xs) < 0.05:
        xs[0] = 0.1 if xs[0] > 0.5 else 0.9
        ys[0] = min(hi, max(lo, xs[0] * y1[0] + (1 - xs[0]) * y0[0]))
    return make_data([(f"n{i}", pops[i], xs[i], ys[i]) for i in range(n)], OutcomeBounds(lo, hi))


def random_profile(data, rng):
    """A feasible profile drawn uniformly inside each neighborhood's range."""
    from monotone_ei import GroupMeansProfile, neighborhood_mob

    y1, y0 = [], []
    for rec in data.records:
        mob = neighborhood_mob(rec, data.bounds)
        a = rng.uniform(mob.y1.lo, mob.y1.hi)
        y1.append(a)
        y0.append((rec.y - rec.x * a) / (1 - rec.x))
    return GroupMeansProfile(np.array(y1), np.array(y0))


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def record_criterion(name, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'}  {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
