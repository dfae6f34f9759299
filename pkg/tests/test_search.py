import json
from dataclasses import replace

import numpy as np
import pytest

from frrplan.errors import DomainError, Infeasible, NonMonotone
from frrplan.fleet import Fleet, scale_headroom, total_frr, total_inertia
from frrplan.search import (
    ReserveCurve,
    build_curve,
    check_monotone,
    compare_thresholds,
    fleet_for_inertia,
    grid_scan_min_frr,
    min_frr,
    read_curve,
    search_min_frr,
    threshold_gaps,
    write_curve,
)
from frrplan.dynamics import nadir, simulate
from frrplan.synthetic import LOAD_MW, TABLE2_INERTIA_MVAS

from oracles import feasible, fine_scan_mw, random_scenarios

GRID = list(TABLE2_INERTIA_MVAS)


def test_vacuous_threshold_gives_zero(ei_fleet, ei_cond):
    assert min_frr(ei_fleet, replace(ei_cond, ufls_threshold_hz=0.0)) == 0.0


def test_infeasible_when_full_headroom_fails(ei_fleet, ei_cond):
    with pytest.raises(Infeasible):
        min_frr(ei_fleet, replace(ei_cond, contingency_mw=40_000.0))


def test_no_reserve_units_infeasible(ei_fleet, ei_cond):
    fleet = Fleet(tuple(replace(u, responsive=False, droop_pu=0.0) for u in ei_fleet))
    with pytest.raises(Infeasible):
        min_frr(fleet, ei_cond)


def test_base_case_against_oracles(ei_fleet, ei_cond):
    res = search_min_frr(ei_fleet, ei_cond)
    oracle = fine_scan_mw(ei_fleet, ei_cond)
    assert abs(res.frr_mw - oracle) <= 1.0
    coarse = grid_scan_min_frr(ei_fleet, ei_cond)
    assert coarse - 0.01 * res.total_frr_mw - 1.0 <= res.frr_mw <= coarse + 1.0
    # the returned end is feasible and 1 MW less is not
    assert res.nadir_hz >= ei_cond.ufls_threshold_hz
    assert not feasible(ei_fleet, ei_cond, (res.frr_mw - 1.0) / res.total_frr_mw)


@pytest.mark.parametrize("cond_index", range(4))
def test_random_scenarios_against_oracle(ei_fleet, cond_index):
    cond = random_scenarios(ei_fleet, 4, seed=11)[cond_index]
    assert abs(min_frr(ei_fleet, cond) - fine_scan_mw(ei_fleet, cond)) <= 1.0


def test_tolerance_controls_bracket(ei_fleet, ei_cond):
    coarse = search_min_frr(ei_fleet, ei_cond, tolerance_mw=100.0)
    fine = search_min_frr(ei_fleet, ei_cond, tolerance_mw=1.0)
    assert fine.frr_mw <= coarse.frr_mw <= fine.frr_mw + 100.0
    assert fine.iterations > coarse.iterations


def test_min_frr_monotone_in_inertia_and_contingency(ei_fleet, ei_cond):
    by_k = [min_frr(ei_fleet, replace(ei_cond, inertia_override_mvas=k), verify=False)
            for k in np.linspace(0.4e6, 2.4e6, 6)]
    assert all(b <= a for a, b in zip(by_k, by_k[1:]))
    by_p = [min_frr(ei_fleet, replace(ei_cond, contingency_mw=p), verify=False)
            for p in (3000.0, 4000.0, 5000.0, 6000.0)]
    assert all(b >= a for a, b in zip(by_p, by_p[1:]))


def test_non_monotone_detected(ei_fleet, ei_cond, monkeypatch):
    import frrplan.search as search

    real = search.nadir_at_scale
    monkeypatch.setattr(search, "nadir_at_scale", lambda f, c, s: real(f, c, s) - (0.05 if s == 0.7 else 0.0))
    with pytest.raises(NonMonotone):
        check_monotone(ei_fleet, ei_cond)


def test_curve_single_point(ei_fleet, ei_cond):
    curve = build_curve(ei_fleet, ei_cond, [1.0e6])
    assert len(curve.points) == 1


def test_curve_studied_levels(ei_fleet, ei_cond):
    curve = build_curve(ei_fleet, ei_cond, GRID)
    assert curve.inertia_mvas == GRID
    assert all(b <= a for a, b in zip(curve.min_frr_mw, curve.min_frr_mw[1:]))
    assert len(curve.slopes_per_1e5()) == 4
    assert all(s >= 0 for s in curve.slopes_per_1e5())


def test_curve_reproducible(ei_fleet, ei_cond):
    assert build_curve(ei_fleet, ei_cond, GRID[:2]) == build_curve(ei_fleet, ei_cond, GRID[:2])


def test_curve_parallel_matches_serial(ei_fleet, ei_cond):
    assert build_curve(ei_fleet, ei_cond, GRID, jobs=3) == build_curve(ei_fleet, ei_cond, GRID, jobs=1)


def test_displacement_curve_records_gaps(ei_fleet, ei_cond):
    curve = build_curve(ei_fleet, ei_cond, GRID, mode="displacement")
    assert set(curve.infeasible) | set(curve.inertia_mvas) == set(GRID)
    assert curve.infeasible  # the all-baseload block cannot hold the threshold
    assert curve.inertia_mvas[-1] == GRID[-1]


def test_fleet_for_inertia(ei_fleet):
    for k in GRID:
        assert total_inertia(fleet_for_inertia(ei_fleet, LOAD_MW, k)) == pytest.approx(k, rel=0.01)
    with pytest.raises(DomainError):
        fleet_for_inertia(ei_fleet, LOAD_MW, 3.0e6)


@pytest.mark.parametrize("grid", [[], [2.0, 1.0], [1.0, 1.0]])
def test_bad_grid(ei_fleet, ei_cond, grid):
    with pytest.raises(DomainError):
        build_curve(ei_fleet, ei_cond, grid)


def test_all_infeasible_grid(ei_fleet, ei_cond):
    with pytest.raises(Infeasible):
        build_curve(ei_fleet, replace(ei_cond, contingency_mw=40_000.0), [1e6])


def test_curve_invariants():
    with pytest.raises(NonMonotone):
        ReserveCurve(((1.0, 10.0), (2.0, 11.0)))
    with pytest.raises(DomainError):
        ReserveCurve(((2.0, 10.0), (1.0, 9.0)))


def test_compare_duplicate_thresholds(ei_fleet, ei_cond):
    a, b = compare_thresholds(ei_fleet, ei_cond, [59.5, 59.5], GRID[:2])
    assert a.points == b.points


def test_lower_threshold_relaxes(ei_fleet, ei_cond):
    low, high = compare_thresholds(ei_fleet, ei_cond, [59.3, 59.5], GRID)
    for k, fl, fh, gap in threshold_gaps(low, high):
        assert gap >= 0


def test_curve_file_round_trip(tmp_path, ei_fleet, ei_cond):
    curve = build_curve(ei_fleet, ei_cond, GRID, mode="displacement")
    write_curve(curve, tmp_path / "c.csv")
    assert read_curve(tmp_path / "c.csv") == curve
    side = json.loads((tmp_path / "c.json").read_text())
    assert side["infeasible"] == list(curve.infeasible)
    assert side["mode"] == "displacement"
    assert side["tolerance_mw"] == 1.0
    assert len(side["scenario_hash"]) == 64
