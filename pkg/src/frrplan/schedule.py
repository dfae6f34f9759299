"""Hourly adaptive reserve schedules and their cost against a static reserve.

The adaptive schedule looks up the minimum reserve for each interval's
inertia on a :class:`~frrplan.search.ReserveCurve`. The business-as-usual
(BAU) reserve is a constant held all day, by default the day's worst-case
requirement. Prices are $/MW per hour of reserve held.
"""

from __future__ import annotations

import bisect
import csv
import io
import json
import math
import re
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Sequence

from .errors import DomainError, InputError, RangeError
from .fleet import Fleet, displace_for_renewables, total_inertia
from .search import ReserveCurve, _map

PROFILE_KINDS = ("inertia_mvas", "pv_capacity_factor")
_HHMM = re.compile(r"^(\d{1,2}):(\d{2})$")


def evaluate_curve(curve: ReserveCurve, inertia_mvas: float) -> float:
    """Piecewise-linear reserve lookup, exact at grid points, no extrapolation."""
    ks = curve.inertia_mvas
    fs = curve.min_frr_mw
    if not (ks[0] <= inertia_mvas <= ks[-1]):
        raise RangeError(f"inertia {inertia_mvas:.6g} MVA*s outside curve range [{ks[0]:.6g}, {ks[-1]:.6g}]")
    i = bisect.bisect_left(ks, inertia_mvas)
    if ks[i] == inertia_mvas:
        return fs[i]
    k0, k1, f0, f1 = ks[i - 1], ks[i], fs[i - 1], fs[i]
    w = (inertia_mvas - k0) / (k1 - k0)
    # keep the result inside [f1, f0] despite rounding
    return min(f0, max(f1, f0 + w * (f1 - f0)))


def parse_time(label: str) -> float | datetime:
    m = _HHMM.match(label.strip())
    if m:
        h, mnt = int(m.group(1)), int(m.group(2))
        if h > 24 or mnt > 59:
            raise ValueError(f"bad clock time {label!r}")
        return h + mnt / 60.0
    return datetime.fromisoformat(label.strip())


def _to_hours(stamps):
    if all(isinstance(s, float) for s in stamps):
        return list(stamps)
    if all(isinstance(s, datetime) for s in stamps):
        return [(s - stamps[0]).total_seconds() / 3600.0 for s in stamps]
    raise ValueError("mixed HH:MM and ISO-8601 times")


@dataclass(frozen=True)
class InertiaProfile:
    times: tuple[str, ...]
    hours: tuple[float, ...]
    values: tuple[float, ...]
    kind: str = "inertia_mvas"

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise DomainError(f"unknown profile kind {self.kind!r}")
        if not (len(self.times) == len(self.hours) == len(self.values)) or not self.times:
            raise DomainError("profile needs equal-length, non-empty time and value columns")
        if any(not b > a for a, b in zip(self.hours, self.hours[1:])):
            raise DomainError("profile times must be strictly increasing")
        if any(not (math.isfinite(v) and v >= 0) for v in self.values):
            raise DomainError("profile values must be finite and >= 0")
        if self.kind == "pv_capacity_factor" and any(v > 1 for v in self.values):
            raise DomainError("PV capacity factors must lie in [0, 1]")

    @classmethod
    def from_labels(cls, times: Sequence[str], values: Sequence[float], kind: str = "inertia_mvas"):
        hours = _to_hours([parse_time(t) for t in times])
        return cls(tuple(times), tuple(hours), tuple(float(v) for v in values), kind)

    def durations_h(self) -> list[float]:
        """Interval length for each entry; the last repeats the one before."""
        if len(self.hours) == 1:
            return [1.0]
        d = [b - a for a, b in zip(self.hours, self.hours[1:])]
        return d + [d[-1]]


@dataclass(frozen=True)
class ScheduleContext:
    """Fleet and load used to turn PV capacity factors into inertia."""

    fleet: Fleet
    load_mw: float
    pv_capacity_mw: float

    def inertia_for(self, capacity_factor: float) -> float:
        renewable = capacity_factor * self.pv_capacity_mw
        return total_inertia(displace_for_renewables(self.fleet, self.load_mw, renewable))


@dataclass(frozen=True)
class ScheduleEntry:
    time: str
    hours: float
    duration_h: float
    inertia_mvas: float
    frr_mw: float


@dataclass(frozen=True)
class ReserveSchedule:
    entries: tuple[ScheduleEntry, ...]

    @property
    def frr_mw(self) -> list[float]:
        return [e.frr_mw for e in self.entries]

    @property
    def inertia_mvas(self) -> list[float]:
        return [e.inertia_mvas for e in self.entries]


def profile_inertia(profile: InertiaProfile, context: ScheduleContext | None = None, jobs: int = 1) -> list[float]:
    if profile.kind == "inertia_mvas":
        return list(profile.values)
    if context is None:
        raise DomainError("a PV capacity-factor profile needs a fleet/load context")
    return _map(context.inertia_for, list(profile.values), jobs)


def make_schedule(
    profile: InertiaProfile,
    curve: ReserveCurve,
    context: ScheduleContext | None = None,
    jobs: int = 1,
) -> ReserveSchedule:
    entries = []
    inertia = profile_inertia(profile, context, jobs)
    for t, h, d, k in zip(profile.times, profile.hours, profile.durations_h(), inertia):
        try:
            frr = evaluate_curve(curve, k)
        except RangeError as exc:
            raise RangeError(f"at {t}: {exc}") from None
        entries.append(ScheduleEntry(t, h, d, k, frr))
    return ReserveSchedule(tuple(entries))


@dataclass(frozen=True)
class PriceTable:
    rows: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if not self.rows:
            raise DomainError("price table is empty")
        if any(not (math.isfinite(p) and p >= 0) for _, p in self.rows):
            raise DomainError("prices must be finite and >= 0")

    @property
    def average(self) -> float:
        return math.fsum(p for _, p in self.rows) / len(self.rows)


@dataclass(frozen=True)
class CostReport:
    adaptive_cost: float
    bau_cost: float
    bau_frr_mw: float
    savings_fraction: float

    def to_dict(self) -> dict:
        return {
            "adaptive_cost": self.adaptive_cost,
            "bau_cost": self.bau_cost,
            "bau_frr_mw": self.bau_frr_mw,
            "savings_fraction": self.savings_fraction,
        }


def cost_report(
    schedule: ReserveSchedule,
    prices: PriceTable,
    bau_frr_mw: float | None = None,
    price_scale: float = 1.0,
) -> CostReport:
    """Price the adaptive schedule and the constant BAU reserve over the same hours."""
    peak = max(schedule.frr_mw)
    if bau_frr_mw is None:
        bau_frr_mw = peak
    if bau_frr_mw < peak:
        raise DomainError(f"BAU reserve {bau_frr_mw:.3f} MW is below the schedule peak {peak:.3f} MW")
    price = prices.average * price_scale
    adaptive = math.fsum(e.frr_mw * price * e.duration_h for e in schedule.entries)
    hours = math.fsum(e.duration_h for e in schedule.entries)
    bau = bau_frr_mw * price * hours
    savings = 1.0 - adaptive / bau if bau > 0 else 0.0
    return CostReport(adaptive, bau, float(bau_frr_mw), savings)


# -- files ----------------------------------------------------------------


def _g17(x):
    return format(float(x), ".17g")


def parse_profile_csv(text: str, source: str = "<profile>") -> InertiaProfile:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    header = [h.strip() for h in header] if header else []
    if len(header) != 2 or header[0] != "time" or header[1] not in PROFILE_KINDS:
        raise InputError("header must be time,inertia_mvas or time,pv_capacity_factor", source, 1)
    times, values = [], []
    for row in reader:
        if not row:
            continue
        line = reader.line_num
        if len(row) != 2:
            raise InputError(f"row {line}: expected 2 fields", source, line)
        try:
            parse_time(row[0])
            values.append(float(row[1]))
        except ValueError as exc:
            raise InputError(f"row {line}: {exc}", source, line) from None
        times.append(row[0].strip())
    try:
        return InertiaProfile.from_labels(times, values, header[1])
    except (DomainError, ValueError) as exc:
        raise InputError(str(exc), source) from None


def read_profile_csv(path) -> InertiaProfile:
    path = Path(path)
    return parse_profile_csv(path.read_text(encoding="utf-8"), str(path))


def format_profile_csv(profile: InertiaProfile) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("time", profile.kind))
    for t, v in zip(profile.times, profile.values):
        writer.writerow((t, _g17(v)))
    return buf.getvalue()


def parse_price_csv(text: str, source: str = "<prices>") -> PriceTable:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["source", "price_per_mw"]:
        raise InputError("header must be source,price_per_mw", source, 1)
    rows = []
    for row in reader:
        if not row:
            continue
        line = reader.line_num
        if len(row) != 2:
            raise InputError(f"row {line}: expected 2 fields", source, line)
        try:
            rows.append((row[0].strip(), float(row[1])))
        except ValueError as exc:
            raise InputError(f"row {line}: {exc}", source, line) from None
    try:
        return PriceTable(tuple(rows))
    except DomainError as exc:
        raise InputError(str(exc), source) from None


def read_price_csv(path) -> PriceTable:
    path = Path(path)
    return parse_price_csv(path.read_text(encoding="utf-8"), str(path))


def format_schedule_csv(schedule: ReserveSchedule) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("time", "inertia_mvas", "frr_mw"))
    for e in schedule.entries:
        writer.writerow((e.time, _g17(e.inertia_mvas), _g17(e.frr_mw)))
    return buf.getvalue()


def parse_schedule_csv(text: str, source: str = "<schedule>") -> ReserveSchedule:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["time", "inertia_mvas", "frr_mw"]:
        raise InputError("header must be time,inertia_mvas,frr_mw", source, 1)
    rows = [r for r in reader if r]
    try:
        profile = InertiaProfile.from_labels([r[0] for r in rows], [float(r[1]) for r in rows])
        frr = [float(r[2]) for r in rows]
    except (ValueError, IndexError, DomainError) as exc:
        raise InputError(str(exc), source) from None
    return ReserveSchedule(
        tuple(
            ScheduleEntry(t, h, d, k, f)
            for t, h, d, k, f in zip(profile.times, profile.hours, profile.durations_h(), profile.values, frr)
        )
    )


def format_report_json(report: CostReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"
