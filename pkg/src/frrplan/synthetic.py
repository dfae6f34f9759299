"""Bundled synthetic EI-scale fleet, base scenario, daily profile and prices.

The fleet has 50 aggregate units in five merit blocks of 100 GW dispatch
each. Block kinetic energies are chosen so that displacing whole blocks
reproduces the studied EI inertia levels at 0/20/40/60/80 % renewable
penetration of a 500 GW load: 1.93, 1.61, 1.22, 0.77 and 0.39 x 10^6 MVA*s.
"""

from __future__ import annotations

import json
from dataclasses import replace
from importlib import resources
from pathlib import Path

from .dynamics import Scenario, SystemCondition, scenario_to_dict
from .fleet import Fleet, GeneratorUnit, format_fleet_csv
from .schedule import InertiaProfile, PriceTable, ScheduleContext, format_profile_csv, profile_inertia

LOAD_MW = 500_000.0
CONTINGENCY_MW = 4_500.0
# inertia levels reached at 0/20/40/60/80 % penetration
TABLE2_INERTIA_MVAS = (390_000.0, 770_000.0, 1_220_000.0, 1_610_000.0, 1_930_000.0)
TABLE2_PENETRATION = (0.8, 0.6, 0.4, 0.2, 0.0)
EI_INERTIA_RANGE_MVAS = (1_200_000.0, 2_400_000.0)

_DISPATCH_PATTERN_MW = (8_000, 9_000, 10_000, 11_000, 12_000, 12_000, 11_000, 10_000, 9_000, 8_000)
_LOADING = 0.8  # pset / rated for responsive units
_PMAX_FRACTION = 0.95  # pmax / rated for responsive units

# (fuel, responsive) per unit slot, block kinetic energy in MVA*s; first block decommits first
_BLOCKS = (
    ("gas-ct", 320_000.0, [("gas", False)] * 4 + [("gas", True)] * 2 + [("gas", False)] * 4),
    ("gas-cc", 390_000.0, [("gas", False), ("gas", True), ("gas", False)] * 3 + [("gas", False)]),
    ("coal", 450_000.0, [("steam", False)] * 3 + [("steam", True)] * 2 + [("steam", False)] * 5),
    ("mixed", 380_000.0, [("hydro", True), ("steam", False)] * 3 + [("steam", False)] * 4),
    ("base", 390_000.0, [("steam", False)] * 6 + [("hydro", True), ("hydro", False)] * 2),
)


def synthetic_fleet(droop_pu: float = 0.05, deadband_hz: float = 0.036) -> Fleet:
    units = []
    rank = 0
    for name, block_ke, slots in _BLOCKS:
        ke_per_mw = block_ke / sum(_DISPATCH_PATTERN_MW)
        for j, ((fuel, responsive), pset) in enumerate(zip(slots, _DISPATCH_PATTERN_MW)):
            rank += 1
            pset = float(pset)
            rated = pset / _LOADING
            pmax = rated * _PMAX_FRACTION if responsive else pset
            units.append(
                GeneratorUnit(
                    id=f"{name}-{j + 1:02d}",
                    fuel_type=fuel,
                    rated_mva=rated,
                    pmax_mw=pmax,
                    pset_mw=pset,
                    inertia_h_s=ke_per_mw * pset / rated,
                    droop_pu=droop_pu if responsive else 0.0,
                    deadband_hz=deadband_hz if responsive else 0.0,
                    responsive=responsive,
                    committed=True,
                    merit_rank=rank,
                )
            )
    return Fleet(tuple(units))


DAMPING_PU = 0.25
DEADBAND_HZ = 0.036

# Table of ISO real-time regulation reserve clearing prices, $/MW
ISO_PRICES = (("NYISO", 12.00), ("PJM", 15.92), ("MISO", 12.76))

# Cloudy day with an 80 % instantaneous PV peak at noon, hourly
DAY_PV_CAPACITY_FACTOR = (
    0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
    0.02, 0.10, 0.24, 0.33, 0.55, 0.70,
    0.80, 0.78, 0.62, 0.58, 0.42, 0.24,
    0.08, 0.01, 0.0, 0.0, 0.0, 0.0,
)
PV_CAPACITY_MW = LOAD_MW


def base_scenario() -> Scenario:
    cond = SystemCondition(
        load_mw=LOAD_MW,
        contingency_mw=CONTINGENCY_MW,
        ufls_threshold_hz=59.5,
        damping_pu=DAMPING_PU,
    )
    return Scenario(cond, {})


def base_condition(**overrides) -> SystemCondition:
    return replace(base_scenario().condition, **overrides)


def day_pv_profile() -> InertiaProfile:
    times = [f"{h:02d}:00" for h in range(24)]
    return InertiaProfile.from_labels(times, DAY_PV_CAPACITY_FACTOR, kind="pv_capacity_factor")


def day_context(fleet: Fleet | None = None) -> ScheduleContext:
    return ScheduleContext(fleet or synthetic_fleet(), LOAD_MW, PV_CAPACITY_MW)


def day_inertia_profile() -> InertiaProfile:
    pv = day_pv_profile()
    inertia = profile_inertia(pv, day_context())
    return InertiaProfile(pv.times, pv.hours, tuple(inertia), kind="inertia_mvas")


def price_table() -> PriceTable:
    return PriceTable(ISO_PRICES)


# -- bundled files --------------------------------------------------------

DATA_FILES = {
    "fleet": "synthetic_fleet.csv",
    "scenario": "base_scenario.json",
    "pv_profile": "day_pv.csv",
    "inertia_profile": "day_inertia.csv",
    "prices": "iso_prices.csv",
}


def data_path(name: str) -> Path:
    return Path(str(resources.files("frrplan") / "data" / DATA_FILES[name]))


def bundled_texts() -> dict[str, str]:
    """Exact text of every bundled data file, regenerated from the definitions above."""
    prices = "source,price_per_mw\n" + "".join(f"{s},{p:.2f}\n" for s, p in ISO_PRICES)
    return {
        "fleet": format_fleet_csv(synthetic_fleet(deadband_hz=DEADBAND_HZ)),
        "scenario": json.dumps(scenario_to_dict(base_scenario()), indent=2) + "\n",
        "pv_profile": format_profile_csv(day_pv_profile()),
        "inertia_profile": format_profile_csv(day_inertia_profile()),
        "prices": prices,
    }


def write_bundled_data(directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, text in bundled_texts().items():
        (directory / DATA_FILES[name]).write_text(text, encoding="utf-8")
