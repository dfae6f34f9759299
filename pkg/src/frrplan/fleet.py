"""Synchronous generation fleet: inertia, reserve headroom, displacement.

Fleets are immutable. Every operation returns a new :class:`Fleet`.

Reserve is shrunk by raising dispatch toward ``pmax_mw`` rather than by
lowering ``pmax_mw``. Both remove the same headroom; keeping ``pmax_mw``
fixed leaves nameplate data untouched and keeps the governor droop base
(responsive ``pmax_mw``) constant while only the saturation level moves.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from .errors import DomainError, InputError
from .governor import FUEL_TYPES, GovernorParams, merge_governors

FLEET_COLUMNS = (
    "id",
    "fuel_type",
    "rated_mva",
    "pmax_mw",
    "pset_mw",
    "inertia_h_s",
    "droop_pu",
    "deadband_hz",
    "responsive",
    "committed",
    "merit_rank",
)

# Relative slack for the pset <= pmax check after floating-point arithmetic.
_REL_EPS = 1e-12


@dataclass(frozen=True)
class GeneratorUnit:
    id: str
    fuel_type: str
    rated_mva: float
    pmax_mw: float
    pset_mw: float
    inertia_h_s: float
    droop_pu: float
    deadband_hz: float
    responsive: bool
    committed: bool
    merit_rank: int

    def __post_init__(self):
        if self.fuel_type not in FUEL_TYPES:
            raise DomainError(f"unit {self.id}: unknown fuel type {self.fuel_type!r}")
        for name in ("rated_mva", "pmax_mw", "pset_mw", "inertia_h_s", "droop_pu", "deadband_hz"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"unit {self.id}: {name} is not finite")
        if self.rated_mva <= 0:
            raise DomainError(f"unit {self.id}: rated_mva must be > 0")
        slack = _REL_EPS * max(1.0, self.rated_mva)
        if not (0 <= self.pset_mw <= self.pmax_mw + slack and self.pmax_mw <= self.rated_mva + slack):
            raise DomainError(f"unit {self.id}: need 0 <= pset_mw <= pmax_mw <= rated_mva")
        if self.inertia_h_s < 0 or self.droop_pu < 0 or self.deadband_hz < 0:
            raise DomainError(f"unit {self.id}: inertia, droop and deadband must be >= 0")
        if self.responsive and self.droop_pu <= 0:
            raise DomainError(f"unit {self.id}: responsive unit needs droop_pu > 0")

    @property
    def headroom_mw(self) -> float:
        return max(self.pmax_mw - self.pset_mw, 0.0)

    @property
    def kinetic_mvas(self) -> float:
        return self.inertia_h_s * self.rated_mva

    @property
    def provides_frr(self) -> bool:
        return self.committed and self.responsive


@dataclass(frozen=True)
class Fleet:
    units: tuple[GeneratorUnit, ...]
    governors: Mapping[str, GovernorParams] = field(default_factory=merge_governors)

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(self.units))
        object.__setattr__(self, "governors", merge_governors(self.governors))
        ids = [u.id for u in self.units]
        if len(set(ids)) != len(ids):
            raise DomainError("unit ids must be unique")

    def __len__(self):
        return len(self.units)

    def __iter__(self):
        return iter(self.units)

    def committed_pset(self) -> float:
        return math.fsum(u.pset_mw for u in self.units if u.committed)

    def headroom_by_type(self) -> dict[str, float]:
        out = {fuel: 0.0 for fuel in FUEL_TYPES}
        for u in self.units:
            if u.provides_frr:
                out[u.fuel_type] += u.headroom_mw
        return out

    def with_governors(self, governors: Mapping[str, GovernorParams]) -> Fleet:
        return replace(self, governors=merge_governors(governors))


def total_inertia(fleet: Fleet) -> float:
    """Aggregate stored kinetic energy H*S of committed units, MVA*s."""
    return math.fsum(u.kinetic_mvas for u in fleet.units if u.committed)


def total_frr(fleet: Fleet) -> float:
    """Sum of headroom over committed, responsive units, MW."""
    return math.fsum(u.headroom_mw for u in fleet.units if u.provides_frr)


def scale_headroom(fleet: Fleet, s: float) -> Fleet:
    """Shrink every reserve-providing unit's headroom to ``s`` times its value.

    The same fraction applies to every unit, so each fuel type keeps its
    share of the total.
    """
    if not (0.0 <= s <= 1.0):
        raise DomainError(f"scale factor must lie in [0, 1], got {s!r}")
    if s == 1.0:
        return fleet
    units = []
    for u in fleet.units:
        if u.provides_frr:
            pset = u.pmax_mw - s * (u.pmax_mw - u.pset_mw)
            u = replace(u, pset_mw=min(pset, u.pmax_mw))
        units.append(u)
    return replace(fleet, units=tuple(units))


def displace_for_renewables(fleet: Fleet, load_mw: float, renewable_mw: float) -> Fleet:
    """Decommit units in ascending merit rank until dispatch fits the net load.

    The marginal unit is redispatched down instead of decommitted when that
    is enough to meet ``load_mw - renewable_mw`` exactly.
    """
    if not load_mw > 0:
        raise DomainError(f"load_mw must be > 0, got {load_mw!r}")
    if not (0.0 <= renewable_mw <= load_mw):
        raise DomainError(f"renewable_mw must lie in [0, load_mw], got {renewable_mw!r}")
    target = load_mw - renewable_mw
    excess = fleet.committed_pset() - target
    if excess <= 0:
        return fleet

    order = sorted(
        (i for i, u in enumerate(fleet.units) if u.committed),
        key=lambda i: (fleet.units[i].merit_rank, i),
    )
    units = list(fleet.units)
    for i in order:
        if excess <= 0:
            break
        u = units[i]
        if u.pset_mw <= excess:
            excess -= u.pset_mw
            units[i] = replace(u, committed=False, pset_mw=0.0)
        else:
            units[i] = replace(u, pset_mw=u.pset_mw - excess)
            excess = 0.0
    return replace(fleet, units=tuple(units))


# -- CSV ------------------------------------------------------------------


def _parse_bool(text, source, line, column):
    value = text.strip().lower()
    if value == "true":
        return True
    if value == "false":
        return False
    raise InputError(f"row {line}: column {column!r}: expected true/false, got {text!r}", source, line)


def parse_fleet_csv(text: str, source: str = "<fleet>") -> Fleet:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise InputError("empty fleet file", source, 1) from None
    header = [h.strip() for h in header]
    if tuple(header) != FLEET_COLUMNS:
        raise InputError(f"bad header, expected {','.join(FLEET_COLUMNS)}", source, 1)
    units = []
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(FLEET_COLUMNS):
            raise InputError(f"row {line}: expected {len(FLEET_COLUMNS)} fields, got {len(row)}", source, line)
        rec = dict(zip(FLEET_COLUMNS, (c.strip() for c in row)))
        try:
            numbers = {
                k: float(rec[k])
                for k in ("rated_mva", "pmax_mw", "pset_mw", "inertia_h_s", "droop_pu", "deadband_hz")
            }
            rank = int(rec["merit_rank"])
        except ValueError as exc:
            raise InputError(f"row {line}: {exc}", source, line) from None
        try:
            units.append(
                GeneratorUnit(
                    id=rec["id"],
                    fuel_type=rec["fuel_type"],
                    responsive=_parse_bool(rec["responsive"], source, line, "responsive"),
                    committed=_parse_bool(rec["committed"], source, line, "committed"),
                    merit_rank=rank,
                    **numbers,
                )
            )
        except DomainError as exc:
            raise InputError(f"row {line}: {exc}", source, line) from None
    try:
        return Fleet(tuple(units))
    except DomainError as exc:
        raise InputError(str(exc), source) from None


def read_fleet_csv(path) -> Fleet:
    path = Path(path)
    return parse_fleet_csv(path.read_text(encoding="utf-8"), source=str(path))


def format_fleet_csv(fleet: Fleet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FLEET_COLUMNS)
    for u in fleet.units:
        writer.writerow(
            [
                u.id,
                u.fuel_type,
                repr(u.rated_mva),
                repr(u.pmax_mw),
                repr(u.pset_mw),
                repr(u.inertia_h_s),
                repr(u.droop_pu),
                repr(u.deadband_hz),
                "true" if u.responsive else "false",
                "true" if u.committed else "false",
                u.merit_rank,
            ]
        )
    return buf.getvalue()


def write_fleet_csv(fleet: Fleet, path) -> None:
    Path(path).write_text(format_fleet_csv(fleet), encoding="utf-8")
