import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frrplan.errors import DomainError, InputError
from frrplan.fleet import (
    Fleet,
    displace_for_renewables,
    format_fleet_csv,
    parse_fleet_csv,
    scale_headroom,
    total_frr,
    total_inertia,
)
from frrplan.synthetic import LOAD_MW, TABLE2_INERTIA_MVAS, TABLE2_PENETRATION, synthetic_fleet

from conftest import unit


def type_shares(fleet):
    by_type = fleet.headroom_by_type()
    total = sum(by_type.values())
    return {k: v / total for k, v in by_type.items()}


def test_total_inertia_empty_and_single():
    assert total_inertia(Fleet(())) == 0
    assert total_inertia(Fleet((unit("a", rated=500.0, pmax=400.0, pset=100.0, h=4.0),))) == 2000.0


def test_total_inertia_ignores_decommitted():
    f = Fleet((unit("a", h=4.0), unit("b", h=5.0, committed=False)))
    assert total_inertia(f) == 4000.0


def test_synthetic_fleet_base_inertia(ei_fleet):
    assert len(ei_fleet) == 50
    assert total_inertia(ei_fleet) == pytest.approx(1.93e6, rel=1e-12)
    assert ei_fleet.committed_pset() == pytest.approx(LOAD_MW, rel=1e-12)


def test_total_frr():
    assert total_frr(Fleet((unit("a", responsive=False), unit("b", responsive=False)))) == 0
    two = Fleet((unit("a", pmax=700.0, pset=600.0), unit("b", pmax=850.0, pset=600.0)))
    assert total_frr(two) == pytest.approx(350.0)
    mixed = Fleet((unit("a", pmax=700.0, pset=600.0, committed=False), unit("b", pmax=850.0, pset=600.0)))
    assert total_frr(mixed) == pytest.approx(250.0)


def test_scale_headroom_identity_and_zero(small_fleet):
    assert scale_headroom(small_fleet, 1.0) == small_fleet
    zero = scale_headroom(small_fleet, 0.0)
    assert total_frr(zero) == 0
    assert all(u.pset_mw == u.pmax_mw for u in zero if u.responsive)


def test_scale_headroom_half():
    f = Fleet((unit("a", "hydro", pmax=700.0, pset=600.0), unit("b", "gas", pmax=900.0, pset=600.0)))
    half = scale_headroom(f, 0.5)
    assert [u.headroom_mw for u in half] == [50.0, 150.0]
    before, after = type_shares(f), type_shares(half)
    assert after == pytest.approx(before)
    assert before["hydro"] == pytest.approx(0.25)


def test_scale_headroom_leaves_non_responsive(small_fleet):
    scaled = scale_headroom(small_fleet, 0.3)
    assert scaled.units[3] == small_fleet.units[3]
    assert total_inertia(scaled) == total_inertia(small_fleet)


@pytest.mark.parametrize("s", [-0.1, 1.0001, math.nan])
def test_scale_headroom_domain(small_fleet, s):
    with pytest.raises(DomainError):
        scale_headroom(small_fleet, s)


@pytest.mark.parametrize("s", np.linspace(0, 1, 21))
def test_scale_headroom_is_proportional(ei_fleet, s):
    scaled = scale_headroom(ei_fleet, s)
    assert total_frr(scaled) == pytest.approx(s * total_frr(ei_fleet), rel=1e-6, abs=1e-6)
    assert total_inertia(scaled) == total_inertia(ei_fleet)
    if s > 0:
        assert type_shares(scaled) == pytest.approx(type_shares(ei_fleet), rel=1e-9)


@given(st.floats(0, 1), st.floats(0, 1))
def test_scale_headroom_pointwise_monotone(a, b):
    s1, s2 = sorted((a, b))
    f = synthetic_fleet()
    h1 = [u.headroom_mw for u in scale_headroom(f, s1)]
    h2 = [u.headroom_mw for u in scale_headroom(f, s2)]
    assert all(x <= y + 1e-9 for x, y in zip(h1, h2))


def test_displacement_none_and_full(ei_fleet):
    assert displace_for_renewables(ei_fleet, LOAD_MW, 0.0) == ei_fleet
    gone = displace_for_renewables(ei_fleet, LOAD_MW, LOAD_MW)
    assert total_inertia(gone) == 0
    assert not any(u.committed for u in gone)


@pytest.mark.parametrize("penetration,inertia", list(zip(TABLE2_PENETRATION, TABLE2_INERTIA_MVAS)))
def test_displacement_hits_studied_levels(ei_fleet, penetration, inertia):
    displaced = displace_for_renewables(ei_fleet, LOAD_MW, penetration * LOAD_MW)
    assert total_inertia(displaced) == pytest.approx(inertia, rel=1e-9)


def test_displacement_partial_redispatch():
    f = Fleet((unit("a", pset=600.0, rank=1), unit("b", pset=600.0, rank=2)))
    out = displace_for_renewables(f, 1200.0, 200.0)
    assert out.units[0].committed and out.units[0].pset_mw == 400.0
    assert out.units[1] == f.units[1]
    out = displace_for_renewables(f, 1200.0, 700.0)
    assert not out.units[0].committed
    assert out.units[1].pset_mw == pytest.approx(500.0)


@pytest.mark.parametrize("load,ren", [(0.0, 0.0), (-1.0, 0.0), (100.0, 101.0), (100.0, -1.0)])
def test_displacement_domain(small_fleet, load, ren):
    with pytest.raises(DomainError):
        displace_for_renewables(small_fleet, load, ren)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, LOAD_MW), st.floats(0, LOAD_MW))
def test_displacement_monotone(a, b):
    f = synthetic_fleet()
    lo, hi = sorted((a, b))
    f_lo = displace_for_renewables(f, LOAD_MW, lo)
    f_hi = displace_for_renewables(f, LOAD_MW, hi)
    assert total_inertia(f_hi) <= total_inertia(f_lo)
    assert f_hi.committed_pset() <= f_lo.committed_pset() + 1e-6
    assert f_hi.committed_pset() <= LOAD_MW - hi + 1e-6


def test_unit_invariants():
    with pytest.raises(DomainError):
        unit("a", pset=950.0, pmax=900.0)
    with pytest.raises(DomainError):
        unit("a", pmax=1100.0, rated=1000.0)
    with pytest.raises(DomainError):
        unit("a", droop=0.0)
    with pytest.raises(DomainError):
        unit("a", fuel="coal")
    with pytest.raises(DomainError):
        Fleet((unit("a"), unit("a")))


def test_fleet_csv_round_trip(ei_fleet):
    text = format_fleet_csv(ei_fleet)
    assert parse_fleet_csv(text) == ei_fleet
    assert format_fleet_csv(parse_fleet_csv(text)) == text


def test_fleet_csv_reports_bad_row(ei_fleet):
    lines = format_fleet_csv(ei_fleet).splitlines()
    lines[4] = lines[4].replace("true", "maybe", 1)
    with pytest.raises(InputError) as err:
        parse_fleet_csv("\n".join(lines), source="f.csv")
    assert err.value.line == 5
    assert "row 5" in str(err.value)


def test_fleet_csv_bad_header():
    with pytest.raises(InputError):
        parse_fleet_csv("id,fuel\nx,gas\n")
