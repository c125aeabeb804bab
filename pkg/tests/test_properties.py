import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from metfatigue.analysis import EvaluationGrid, icc, pearson_r, prediction_band, regress_m, GroupStatistics
from metfatigue.catalog import EmpiricalMetModel, Family, Group
from metfatigue.core import FatigueParams, LoadProfile, endurance_time, fcem_static, met_extended

fractions = st.floats(min_value=1e-3, max_value=1.0, allow_nan=False)
ks = st.floats(min_value=1e-2, max_value=1e2)
mvcs = st.floats(min_value=1.0, max_value=5e3)
times = st.floats(min_value=0.0, max_value=50.0)
GRID = EvaluationGrid()


@given(mvcs, ks, times, times, st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_fcem_monotone_in_time_and_load(mvc, k, t1, t2, f1, f2):
    p = FatigueParams(mvc, k)
    lo_t, hi_t = sorted((t1, t2))
    lo_f, hi_f = sorted((f1 * mvc, f2 * mvc))
    assert fcem_static(hi_t, lo_f, p) <= fcem_static(lo_t, lo_f, p)
    assert fcem_static(lo_t, hi_f, p) <= fcem_static(lo_t, lo_f, p)
    assert 0 < fcem_static(hi_t, hi_f, p) <= mvc or fcem_static(hi_t, hi_f, p) == 0.0


@given(mvcs, ks, st.floats(0.0, 1.0), times, st.floats(min_value=1e-3, max_value=1e3))
def test_joint_scaling_leaves_relative_capacity(mvc, k, f, t, scale):
    a = fcem_static(t, f * mvc, FatigueParams(mvc, k)) / mvc
    b = fcem_static(t, f * mvc * scale, FatigueParams(mvc * scale, k)) / (mvc * scale)
    assert math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-300)


@given(fractions, ks, ks)
def test_met_times_k_is_invariant(f, k1, k2):
    assert math.isclose(met_extended(f, k1) * k1, met_extended(f, k2) * k2, rel_tol=1e-12, abs_tol=1e-15)


@given(fractions, fractions, ks)
def test_met_decreasing(f1, f2, k):
    if f1 == f2:
        return
    lo, hi = sorted((f1, f2))
    assert met_extended(lo, k) > met_extended(hi, k)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.16, 0.99), mvcs, st.floats(0.1, 10.0))
def test_endurance_equals_met_for_constant_load(f, mvc, k):
    params = FatigueParams(mvc, k)
    met = met_extended(f, k)
    t = endurance_time(LoadProfile.constant(f * mvc, 2 * met + 1.0), params)
    assert abs(t - met) < 1e-6


power_models = st.builds(
    lambda c, e: EmpiricalMetModel("p", Group.HAND, Family.POWER, (c, e)),
    st.floats(0.01, 50.0), st.floats(-4.0, -0.1))
exp_models = st.builds(
    lambda c, e: EmpiricalMetModel("e", Group.HAND, Family.EXPONENTIAL, (c, e)),
    st.floats(0.01, 100.0), st.floats(-12.0, -0.5))


@settings(max_examples=200)
@given(st.one_of(power_models, exp_models), st.floats(0.01, 100.0))
def test_regression_positive_and_linear(model, c):
    m = regress_m(model, GRID)
    assert m > 0
    scaled = EmpiricalMetModel("s", model.group, model.family,
                               (c * model.coefficients[0], model.coefficients[1]))
    assert math.isclose(regress_m(scaled, GRID), c * m, rel_tol=1e-12)


@settings(max_examples=200)
@given(st.one_of(power_models, exp_models), st.floats(1e-3, 1e3), st.floats(-1e2, 1e2))
def test_pearson_invariant_under_affine_map(model, slope, shift):
    x = GRID.points
    p = met_extended(x)
    f = model.evaluate(x)
    assert math.isclose(pearson_r(p, f), pearson_r(p, slope * f + shift), rel_tol=1e-9, abs_tol=1e-9)


@given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=30).filter(lambda v: max(v) - min(v) > 1e-6))
def test_icc_self_agreement(values):
    a = np.array(values)
    assert math.isclose(icc(a, a), 1.0, rel_tol=1e-12)


@given(st.floats(0.05, 5.0), st.one_of(st.just(0.0), st.floats(1e-9, 1.0)))
def test_band_ordering(mean, frac):
    std = frac * mean * 0.99
    band = prediction_band(GroupStatistics(Group.ELBOW, (), mean, std), GRID)
    inner = band.f_mvc < 1
    if std > 0:
        assert np.all(band.lower[inner] < band.center[inner])
        assert np.all(band.center[inner] < band.upper[inner])
    else:
        assert np.array_equal(band.lower, band.upper)
