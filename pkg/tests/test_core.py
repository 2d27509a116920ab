import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monotone_ei import (
    AssumptionSet,
    ConfigurationError,
    DegenerateError,
    EIError,
    FeasibilityError,
    GroupMeansProfile,
    Interval,
    OutcomeBounds,
    SignAssumption,
    Status,
    ValidationError,
    check_feasible,
    deltas_from_profile,
    load_aggregate,
    moments,
    profile_means,
    read_aggregate_csv,
    write_aggregate_csv,
)

from conftest import aggregate_data, random_profile


def moments_by_loop(rows):
    """Independent moment oracle: plain Python sums over (pop, x, y)."""
    total = sum(r[0] for r in rows)
    p = [r[0] / total for r in rows]
    ex = sum(pi * r[1] for pi, r in zip(p, rows))
    ey = sum(pi * r[2] for pi, r in zip(p, rows))
    exx = sum(pi * r[1] ** 2 for pi, r in zip(p, rows))
    exy = sum(pi * r[1] * r[2] for pi, r in zip(p, rows))
    return ex, ey, ex * (1 - ex), exx - ex**2, exy - ex * ey


# -- loading ---------------------------------------------------------------------

def test_dataset_a_normalizes_to_halves(dataset_a):
    np.testing.assert_array_equal(dataset_a.p, [0.5, 0.5])
    assert dataset_a.ids == ("a", "b")
    assert dataset_a.normalization == 200


def test_outcome_outside_bounds_names_row():
    with pytest.raises(ValidationError, match="row 1"):
        load_aggregate([("a", 1, 0.5, 1.2)])


def test_no_interior_prevalence_is_degenerate():
    with pytest.raises(DegenerateError):
        load_aggregate([("a", 1, 0.0, 0.3), ("b", 1, 1.0, 0.9)])


def test_all_zero_population_rejected():
    with pytest.raises(EIError):
        load_aggregate([("a", 0, 0.5, 0.3), ("b", 0, 0.4, 0.9)])


@pytest.mark.parametrize(
    "row, match",
    [
        (("a", -1, 0.5, 0.5), "population"),
        (("a", 1, 1.5, 0.5), "x"),
        (("a", 1, -0.1, 0.5), "x"),
        (("a", 1, 0.5, math.nan), "non-finite"),
    ],
)
def test_bad_rows(row, match):
    with pytest.raises(ValidationError, match=match):
        load_aggregate([row, ("b", 1, 0.5, 0.5)])


def test_custom_bounds_accept_wider_outcomes():
    data = load_aggregate([("a", 1, 0.5, 12.0), ("b", 1, 0.2, -3.0)], OutcomeBounds(-5, 20))
    assert data.bounds.width == 25


def test_outcome_bounds_parse_and_validate():
    assert OutcomeBounds.parse("0:100") == OutcomeBounds(0, 100)
    assert OutcomeBounds.parse("-1:1").lo == -1
    with pytest.raises(ValidationError):
        OutcomeBounds(1, 1)
    with pytest.raises(ValidationError):
        OutcomeBounds.parse("abc")


def test_csv_round_trip(tmp_path, dataset_a):
    path = tmp_path / "a.csv"
    write_aggregate_csv(dataset_a, path)
    back = read_aggregate_csv(path)
    np.testing.assert_array_equal(back.p, dataset_a.p)
    np.testing.assert_array_equal(back.x, dataset_a.x)
    np.testing.assert_array_equal(back.y, dataset_a.y)


def test_csv_header_checked(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("name,pop,x,y\na,1,0.5,0.5\n")
    with pytest.raises(ValidationError, match="header"):
        read_aggregate_csv(path)


def test_arrays_are_read_only(dataset_a):
    with pytest.raises(ValueError):
        dataset_a.y[0] = 0.0


# -- moments -------------------------------------------------------------------------

def test_dataset_a_moments(dataset_a):
    m = moments(dataset_a)
    expected = dict(ex=0.5, ey=0.6, var_x=0.25, var_xn=0.09, gamma=0.36, cov_xn_yn=0.09)
    for k, v in expected.items():
        assert getattr(m, k) == pytest.approx(v, abs=1e-12), k


def test_single_neighborhood_moments():
    m = moments(load_aggregate([("a", 1, 0.5, 0.5)]))
    assert m.var_xn == 0 and m.gamma == 0


def test_constant_outcome_has_zero_covariance():
    data = load_aggregate([(f"n{i}", 1 + i, 0.1 * (i + 1), 0.4) for i in range(6)])
    assert abs(moments(data).cov_xn_yn) < 1e-15


@settings(max_examples=60, deadline=None)
@given(aggregate_data())
def test_moments_match_loop_oracle(data):
    rows = [(p, x, y) for p, x, y in zip(data.p, data.x, data.y)]
    ex, ey, var_x, var_xn, cov = moments_by_loop(rows)
    m = data.moments
    assert m.ex == pytest.approx(ex, abs=1e-12)
    assert m.ey == pytest.approx(ey, abs=1e-12)
    assert m.var_x == m.ex * (1 - m.ex)
    assert m.var_xn == pytest.approx(var_xn, abs=1e-12)
    assert m.cov_xn_yn == pytest.approx(cov, abs=1e-12)
    assert 0 <= m.var_xn <= m.var_x
    assert 0 <= m.gamma < 1
    assert abs(data.p.sum() - 1) <= 1e-9


# -- intervals and assumptions ----------------------------------------------------

def test_interval_make_statuses():
    assert Interval.make(0.1, 0.3).status is Status.BOUNDED
    assert Interval.make(0.3, 0.3).status is Status.IDENTIFIED
    r = Interval.make(0.4, 0.3)
    assert r.rejected and (r.lo, r.hi) == (0.4, 0.3)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("nonneg", SignAssumption.NONNEGATIVE),
        (">=0", SignAssumption.NONNEGATIVE),
        ("nonpos", SignAssumption.NONPOSITIVE),
        ("zero", SignAssumption.ZERO),
        ("unknown", SignAssumption.UNKNOWN),
    ],
)
def test_sign_parse(text, expected):
    assert SignAssumption.parse(text) is expected


def test_cr_with_opposite_signs_is_configuration_error():
    with pytest.raises(ConfigurationError):
        AssumptionSet("nonneg", "nonpos", True)


def test_cr_propagates_single_declared_sign():
    a = AssumptionSet("unknown", "nonpos", True).propagated()
    assert a.within is SignAssumption.NONPOSITIVE and a.between is SignAssumption.NONPOSITIVE


# -- profiles --------------------------------------------------------------------

def test_deltas_dataset_a_equal_profile(dataset_a):
    prof = GroupMeansProfile(np.array([0.3, 0.9]), np.array([0.3, 0.9]))
    db, dw = deltas_from_profile(dataset_a, prof)
    assert db == pytest.approx(0.0, abs=1e-15)
    assert dw == pytest.approx(0.0576, abs=1e-12)
    _, _, d = profile_means(dataset_a, prof)
    assert d == pytest.approx(0.0576 / (0.64 * 0.25), abs=1e-12)
    assert d == pytest.approx(0.36, abs=1e-12)


def test_deltas_dataset_a_extreme_profile(dataset_a):
    prof = GroupMeansProfile(np.array([1.0, 1.0]), np.array([0.125, 0.5]))
    db, _ = deltas_from_profile(dataset_a, prof)
    assert db == pytest.approx(0.5 * 0.16 * 0.875 + 0.5 * 0.16 * 0.5, abs=1e-12)
    assert db == pytest.approx(0.11, abs=1e-12)


def test_infeasible_profile_raises(dataset_a):
    with pytest.raises(FeasibilityError):
        deltas_from_profile(dataset_a, GroupMeansProfile(np.array([1.0, 1.0]), np.array([1.0, 1.0])))


@settings(max_examples=60, deadline=None)
@given(aggregate_data(), st.integers(0, 2**32 - 1))
def test_decomposition_holds_for_random_profiles(data, seed):
    prof = random_profile(data, np.random.default_rng(seed))
    db, dw = deltas_from_profile(data, prof)
    _, _, d = profile_means(data, prof)
    m = data.moments
    rhs = (db + dw) / ((1 - m.gamma) * m.var_x)
    assert d == pytest.approx(rhs, rel=1e-10, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(aggregate_data(), st.integers(0, 2**32 - 1), st.floats(0, 1))
def test_mixtures_of_feasible_profiles_are_feasible(data, seed, alpha):
    rng = np.random.default_rng(seed)
    a, b = random_profile(data, rng), random_profile(data, rng)
    mix = a.mix(b, alpha)
    check_feasible(data, mix)
    da = profile_means(data, a)[2]
    db = profile_means(data, b)[2]
    assert profile_means(data, mix)[2] == pytest.approx(alpha * da + (1 - alpha) * db, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(aggregate_data())
def test_equal_group_means_give_zero_between_association(data):
    prof = GroupMeansProfile(data.y.copy(), data.y.copy())
    db, _ = deltas_from_profile(data, prof)
    assert db == pytest.approx(0.0, abs=1e-15)
