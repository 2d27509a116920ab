import numpy as np
import pytest
from hypothesis import given, settings

from monotone_ei import (
    DegenerateError,
    PopulationConfig,
    ecological_regression,
    load_aggregate,
    method_of_bounds,
    neighborhood_model,
    synthesize_population,
)

from conftest import aggregate_data


def wls_slope(x, y, w):
    """Independent oracle: weighted least squares via the normal equations."""
    X = np.column_stack([np.ones_like(x), x])
    W = np.diag(w)
    beta = np.linalg.solve(X.T @ W @ X, X.T @ W @ y)
    return beta[1], beta[0]


def test_dataset_a_er(dataset_a):
    er = ecological_regression(dataset_a)
    assert (er.d, er.y1, er.y0) == pytest.approx((1.0, 1.1, 0.1), abs=1e-12)
    assert not er.feasible
    assert er.method == "ER"


def test_dataset_a_nm(dataset_a):
    nm = neighborhood_model(dataset_a)
    assert (nm.d, nm.y1, nm.y0) == pytest.approx((0.36, 0.78, 0.42), abs=1e-12)
    assert nm.feasible


def test_dataset_a_nm_is_gamma_times_er(dataset_a):
    assert neighborhood_model(dataset_a).d == pytest.approx(0.36 * ecological_regression(dataset_a).d, abs=1e-12)


def test_flat_outcome():
    data = load_aggregate([(f"n{i}", 1, 0.1 + 0.2 * i, 0.42) for i in range(4)])
    er, nm = ecological_regression(data), neighborhood_model(data)
    assert er.d == pytest.approx(0, abs=1e-14)
    assert er.y1 == pytest.approx(0.42) and er.y0 == pytest.approx(0.42)
    assert nm.d == pytest.approx(0, abs=1e-14)


def test_single_neighborhood_has_no_regression():
    with pytest.raises(DegenerateError):
        ecological_regression(load_aggregate([("a", 1, 0.5, 0.5)]))


@settings(max_examples=80, deadline=None)
@given(aggregate_data(max_size=12))
def test_er_matches_normal_equations(data):
    slope, intercept = wls_slope(data.x, data.y, data.p)
    er = ecological_regression(data)
    assert er.d == pytest.approx(slope, rel=1e-8, abs=1e-10)
    # y0 is the fit at x = 0, y1 at x = 1
    assert er.y0 == pytest.approx(intercept, rel=1e-8, abs=1e-10)
    assert er.y1 == pytest.approx(intercept + slope, rel=1e-8, abs=1e-10)


@settings(max_examples=80, deadline=None)
@given(aggregate_data(max_size=12))
def test_nm_relations(data):
    er, nm = ecological_regression(data), neighborhood_model(data)
    g = data.moments.gamma
    assert nm.d == pytest.approx(g * er.d, rel=1e-12, abs=1e-15)
    assert abs(er.d) >= abs(nm.d) - 1e-15
    if abs(nm.d) > 1e-12:
        assert np.sign(er.d) == np.sign(nm.d)
    assert data.bounds.lo <= nm.y1 <= data.bounds.hi
    assert data.bounds.lo <= nm.y0 <= data.bounds.hi
    assert method_of_bounds(data).d.contains(nm.d)


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize(
    "mu1, mu0",
    [((0.6, 0.0), (0.4, 0.0)), ((0.3, 0.4), (0.2, 0.3)), ((0.8, -0.5), (0.5, 0.2, -0.3))],
)
def test_bias_identities(seed, mu1, mu0):
    t = synthesize_population(PopulationConfig(n_neighborhoods=15, mu1=mu1, mu0=mu0, seed=seed))
    m = t.data.moments
    er, nm = ecological_regression(t.data), neighborhood_model(t.data)
    pairs = [
        (er.d - t.d, t.delta_w / m.var_xn),
        (nm.d - t.d, -t.delta_b / m.var_x),
        (er.y1 - t.y1, t.delta_w * (1 - m.ex) / m.var_xn),
        (er.y0 - t.y0, -t.delta_w * m.ex / m.var_xn),
        (nm.y1 - t.y1, -t.delta_b / m.ex),
        (nm.y0 - t.y0, t.delta_b / (1 - m.ex)),
    ]
    for lhs, rhs in pairs:
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)
