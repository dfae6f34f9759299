from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from frrplan.dynamics import FrequencyTrace, nadir, rocof_initial, simulate
from frrplan.errors import DomainError
from frrplan.fleet import Fleet, scale_headroom
from frrplan.metrics import abc_points, estimate_inertia, rocof_eq1, trace_metrics

from conftest import unit


def test_eq1_values():
    assert rocof_eq1(60.0, 0.0, 1.2e6) == 0.0
    assert rocof_eq1(60.0, 1000.0, 1.2e6) == pytest.approx(0.025, rel=1e-15)
    assert rocof_eq1(60.0, 1000.0, 2.4e6) == pytest.approx(0.0125, rel=1e-15)


@pytest.mark.parametrize("k", [0.0, -1.0])
def test_eq1_domain(k):
    with pytest.raises(DomainError):
        rocof_eq1(60.0, 1000.0, k)


def test_estimate_inertia():
    assert estimate_inertia(0.025, 1000.0, 60.0) == pytest.approx(1.2e6, rel=1e-12)
    with pytest.raises(DomainError):
        estimate_inertia(0.0, 1000.0, 60.0)


@given(st.floats(45, 65), st.floats(1, 1e5), st.floats(1e3, 1e7))
def test_round_trip(f, p, k):
    assert estimate_inertia(rocof_eq1(f, p, k), p, f) == pytest.approx(k, rel=1e-9)


@given(st.floats(1, 1e4), st.floats(1e4, 1e7), st.floats(1.1, 10))
def test_linear_and_inverse(p, k, c):
    assert rocof_eq1(60.0, c * p, k) == pytest.approx(c * rocof_eq1(60.0, p, k), rel=1e-12)
    assert rocof_eq1(60.0, p, c * k) == pytest.approx(rocof_eq1(60.0, p, k) / c, rel=1e-12)


def test_estimate_from_simulated_trace(ei_fleet, ei_cond):
    for k in (0.8e6, 1.93e6):
        tr = simulate(ei_fleet, replace(ei_cond, contingency_mw=1000.0, inertia_override_mvas=k))
        measured = -rocof_initial(tr, 0.5)
        assert estimate_inertia(measured, 1000.0, 60.0) == pytest.approx(k, rel=0.05)


def test_zero_deadband_short_window(ei_fleet, ei_cond):
    fleet = Fleet(tuple(replace(u, deadband_hz=0.0) for u in ei_fleet))
    for k in (0.39e6, 1.2e6, 2.4e6):
        cond = replace(ei_cond, damping_pu=0.0, inertia_override_mvas=k)
        measured = -rocof_initial(simulate(fleet, cond), 0.1)
        assert measured == pytest.approx(rocof_eq1(60.0, cond.contingency_mw, k), rel=0.01)


def test_flat_trace_abc():
    pts = abc_points(FrequencyTrace(0.1, np.full(601, 60.0)))
    assert pts.value_a_hz == pts.value_b_hz == pts.point_c_hz == 60.0


def test_abc_window_too_long():
    with pytest.raises(DomainError):
        abc_points(FrequencyTrace(0.1, np.full(301, 60.0)))


def test_abc_ordering(ei_fleet, ei_cond):
    tr = simulate(ei_fleet, ei_cond)
    pts = abc_points(tr)
    assert pts.point_c_hz == nadir(tr)
    assert pts.point_c_hz <= pts.value_b_hz <= pts.value_a_hz


def test_low_inertia_deeper_c_relative_to_b(ei_fleet, ei_cond):
    fleet = scale_headroom(ei_fleet, 0.5)
    low = abc_points(simulate(fleet, replace(ei_cond, inertia_override_mvas=0.39e6)))
    high = abc_points(simulate(fleet, replace(ei_cond, inertia_override_mvas=1.93e6)))
    assert low.c_to_b_ratio > high.c_to_b_ratio


def test_metrics_payload_keys(ei_fleet, ei_cond):
    data = trace_metrics(simulate(ei_fleet, ei_cond), ei_cond.contingency_mw)
    assert set(data) == {"value_a_hz", "value_b_hz", "point_c_hz", "c_to_b_ratio",
                         "rocof_hzps", "inertia_estimate_mvas"}
    assert data["rocof_hzps"] > 0
