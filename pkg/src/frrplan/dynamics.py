"""Post-contingency system frequency response.

One aggregated swing equation drives per-fuel-type governor blocks::

    d(df)/dt = f_N / (2 K) * (Pm - P_loss - D * P_load * df / f_N)

Each fuel type passes its deadband-offset frequency error through a droop
gain and two cascaded lags, and delivers ``F*x1 + (1-F)*x2`` clipped to
``[0, headroom]``. Load shedding is not modelled: a nadir below the UFLS
threshold is reported, never masked.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from . import _kernel
from .errors import DomainError, InputError, NumericalError
from .fleet import Fleet, total_inertia
from .governor import FUEL_TYPES, GovernorParams

TRACE_COLUMNS = ("t_s", "freq_hz") + tuple(f"mech_{fuel}_mw" for fuel in FUEL_TYPES)


@dataclass(frozen=True)
class SystemCondition:
    load_mw: float
    contingency_mw: float
    ufls_threshold_hz: float = 59.5
    nominal_freq_hz: float = 60.0
    damping_pu: float = 1.0
    horizon_s: float = 60.0
    dt_s: float = 0.01
    inertia_override_mvas: float | None = None

    def __post_init__(self):
        if not self.load_mw > 0:
            raise DomainError("load_mw must be > 0")
        if not self.contingency_mw >= 0:
            raise DomainError("contingency_mw must be >= 0")
        if not self.damping_pu >= 0:
            raise DomainError("damping_pu must be >= 0")
        if not (self.dt_s > 0 and self.horizon_s > 0 and self.dt_s <= self.horizon_s):
            raise DomainError("need 0 < dt_s <= horizon_s")
        if not self.ufls_threshold_hz < self.nominal_freq_hz:
            raise DomainError("ufls_threshold_hz must be below nominal_freq_hz")
        if self.inertia_override_mvas is not None and not math.isfinite(self.inertia_override_mvas):
            raise DomainError("inertia_override_mvas must be finite")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.horizon_s / self.dt_s)))


@dataclass(frozen=True, eq=False)
class FrequencyTrace:
    dt_s: float
    freq_hz: np.ndarray
    mech_mw_by_type: Mapping[str, np.ndarray] = field(default_factory=dict)

    @property
    def t_s(self) -> np.ndarray:
        return np.arange(len(self.freq_hz)) * self.dt_s

    @property
    def nominal_freq_hz(self) -> float:
        return float(self.freq_hz[0])

    @property
    def mech_total_mw(self) -> np.ndarray:
        total = np.zeros(len(self.freq_hz))
        for fuel in FUEL_TYPES:
            if fuel in self.mech_mw_by_type:
                total = total + self.mech_mw_by_type[fuel]
        return total

    def __eq__(self, other):
        if not isinstance(other, FrequencyTrace):
            return NotImplemented
        return (
            self.dt_s == other.dt_s
            and np.array_equal(self.freq_hz, other.freq_hz)
            and set(self.mech_mw_by_type) == set(other.mech_mw_by_type)
            and all(np.array_equal(v, other.mech_mw_by_type[k]) for k, v in self.mech_mw_by_type.items())
        )


@dataclass(frozen=True)
class TypeAggregate:
    """Governor inputs for one fuel type, aggregated over its responsive units."""

    capacity_mw: float  # responsive committed pmax, the droop base
    headroom_mw: float
    droop_pu: float
    deadband_hz: float


def aggregate_by_type(fleet: Fleet) -> dict[str, TypeAggregate]:
    """Capacity-weighted droop and deadband per fuel type; headroom summed."""
    acc = {fuel: [0.0, 0.0, 0.0, 0.0] for fuel in FUEL_TYPES}
    for u in fleet.units:
        if not u.provides_frr:
            continue
        a = acc[u.fuel_type]
        a[0] += u.pmax_mw
        a[1] += u.headroom_mw
        a[2] += u.pmax_mw * u.droop_pu
        a[3] += u.pmax_mw * u.deadband_hz
    out = {}
    for fuel, (cap, head, wdroop, wdb) in acc.items():
        if cap > 0:
            out[fuel] = TypeAggregate(cap, head, wdroop / cap, wdb / cap)
        else:
            out[fuel] = TypeAggregate(0.0, 0.0, 0.0, 0.0)
    return out


def simulate(fleet: Fleet, cond: SystemCondition) -> FrequencyTrace:
    """Integrate the frequency response to a generation loss applied at t=0."""
    k_sys = cond.inertia_override_mvas
    if k_sys is None:
        k_sys = total_inertia(fleet)
    if not k_sys > 0:
        raise DomainError("system inertia is zero: infinite ROCOF")

    f_n = cond.nominal_freq_hz
    agg = aggregate_by_type(fleet)
    gain = np.zeros(_kernel.N_TYPES)
    deadband = np.zeros(_kernel.N_TYPES)
    t1 = np.ones(_kernel.N_TYPES)
    t2 = np.ones(_kernel.N_TYPES)
    frac = np.zeros(_kernel.N_TYPES)
    headroom = np.zeros(_kernel.N_TYPES)
    for k, fuel in enumerate(FUEL_TYPES):
        gov = fleet.governors[fuel]
        t1[k], t2[k], frac[k] = gov.t1_s, gov.t2_s, gov.hp_fraction
        a = agg[fuel]
        if a.capacity_mw > 0:
            gain[k] = a.capacity_mw / (a.droop_pu * f_n)
            deadband[k] = a.deadband_hz
            headroom[k] = a.headroom_mw

    dev, mech, bad = _kernel.integrate(
        cond.n_steps,
        float(cond.dt_s),
        f_n / (2.0 * k_sys),
        float(cond.contingency_mw),
        cond.damping_pu * cond.load_mw / f_n,
        gain,
        deadband,
        t1,
        t2,
        frac,
        headroom,
    )
    if bad >= 0:
        raise NumericalError(f"non-finite state at step {bad}")
    freq = f_n + dev
    freq[0] = f_n
    return FrequencyTrace(
        dt_s=float(cond.dt_s),
        freq_hz=freq,
        mech_mw_by_type={fuel: mech[k] for k, fuel in enumerate(FUEL_TYPES)},
    )


def nadir(trace: FrequencyTrace) -> float:
    """Lowest sampled frequency, Hz."""
    if len(trace.freq_hz) == 0:
        raise DomainError("empty trace")
    return float(np.min(trace.freq_hz))


def rocof_initial(trace: FrequencyTrace, window_s: float = 0.5) -> float:
    """Least-squares slope of frequency over ``[0, window_s]``, Hz/s (signed)."""
    n = len(trace.freq_hz)
    horizon = (n - 1) * trace.dt_s
    if window_s < trace.dt_s or window_s >= horizon:
        raise DomainError(f"window {window_s} s must lie in [dt, horizon) = [{trace.dt_s}, {horizon})")
    m = int(math.floor(window_s / trace.dt_s + 1e-9)) + 1
    t = np.arange(m) * trace.dt_s
    f = trace.freq_hz[:m]
    tc = t - t.mean()
    return float(np.dot(tc, f - f.mean()) / np.dot(tc, tc))


# -- scenario JSON --------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    condition: SystemCondition
    governors: Mapping[str, GovernorParams] = field(default_factory=dict)


_COND_KEYS = (
    "nominal_freq_hz",
    "load_mw",
    "damping_pu",
    "contingency_mw",
    "ufls_threshold_hz",
    "horizon_s",
    "dt_s",
)


def scenario_from_dict(data: dict, source: str = "<scenario>") -> Scenario:
    if not isinstance(data, dict):
        raise InputError("scenario must be a JSON object", source)
    missing = [k for k in ("load_mw", "contingency_mw") if k not in data]
    if missing:
        raise InputError(f"missing keys: {', '.join(missing)}", source)
    unknown = set(data) - set(_COND_KEYS) - {"inertia_override_mvas", "governor_params"}
    if unknown:
        raise InputError(f"unknown keys: {', '.join(sorted(unknown))}", source)
    try:
        kwargs = {k: float(data[k]) for k in _COND_KEYS if k in data}
        override = data.get("inertia_override_mvas")
        cond = SystemCondition(
            inertia_override_mvas=None if override is None else float(override), **kwargs
        )
        governors = {}
        for fuel, params in (data.get("governor_params") or {}).items():
            if fuel not in FUEL_TYPES:
                raise DomainError(f"unknown fuel type {fuel!r} in governor_params")
            governors[fuel] = GovernorParams(
                t1_s=float(params["t1_s"]), t2_s=float(params["t2_s"]), hp_fraction=float(params["hp_fraction"])
            )
    except (TypeError, ValueError, KeyError) as exc:
        raise InputError(f"bad scenario value: {exc}", source) from None
    return Scenario(cond, governors)


def scenario_to_dict(scenario: Scenario) -> dict:
    c = scenario.condition
    out = {k: getattr(c, k) for k in _COND_KEYS}
    if c.inertia_override_mvas is not None:
        out["inertia_override_mvas"] = c.inertia_override_mvas
    out["governor_params"] = {
        fuel: {"t1_s": g.t1_s, "t2_s": g.t2_s, "hp_fraction": g.hp_fraction}
        for fuel, g in sorted(scenario.governors.items())
    }
    return out


def read_scenario_json(path) -> Scenario:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg}", str(path), exc.lineno) from None
    return scenario_from_dict(data, source=str(path))


def write_scenario_json(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n", encoding="utf-8")


# -- trace CSV ------------------------------------------------------------


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def format_trace_csv(trace: FrequencyTrace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    zeros = np.zeros(len(trace.freq_hz))
    mechs = [trace.mech_mw_by_type.get(fuel, zeros) for fuel in FUEL_TYPES]
    for i, (t, f) in enumerate(zip(trace.t_s, trace.freq_hz)):
        writer.writerow([_g17(t), _g17(f)] + [_g17(m[i]) for m in mechs])
    return buf.getvalue()


def write_trace_csv(trace: FrequencyTrace, path) -> None:
    Path(path).write_text(format_trace_csv(trace), encoding="utf-8")


def parse_trace_csv(text: str, source: str = "<trace>") -> FrequencyTrace:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != TRACE_COLUMNS:
        raise InputError(f"bad header, expected {','.join(TRACE_COLUMNS)}", source, 1)
    rows = []
    for row in reader:
        if not row:
            continue
        try:
            rows.append([float(x) for x in row])
        except ValueError as exc:
            raise InputError(f"row {reader.line_num}: {exc}", source, reader.line_num) from None
        if len(row) != len(TRACE_COLUMNS):
            raise InputError(f"row {reader.line_num}: wrong field count", source, reader.line_num)
    if len(rows) < 2:
        raise InputError("trace needs at least two samples", source)
    data = np.array(rows)
    dt = float(data[1, 0] - data[0, 0])
    return FrequencyTrace(
        dt_s=dt,
        freq_hz=data[:, 1].copy(),
        mech_mw_by_type={fuel: data[:, 2 + k].copy() for k, fuel in enumerate(FUEL_TYPES)},
    )


def read_trace_csv(path) -> FrequencyTrace:
    path = Path(path)
    return parse_trace_csv(path.read_text(encoding="utf-8"), source=str(path))
