"""Minimum frequency response reserve by bisection over simulations.

Reserve is shrunk uniformly (same fraction of headroom on every responsive
unit) until the nadir would drop below the UFLS threshold. Touching the
threshold counts as feasible.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .dynamics import Scenario, SystemCondition, nadir, scenario_to_dict, simulate
from .errors import DomainError, Infeasible, InputError, NonMonotone, NumericalError
from .fleet import Fleet, displace_for_renewables, format_fleet_csv, scale_headroom, total_frr, total_inertia

MODES = ("override_inertia", "displacement")
MAX_ITER = 60
VERIFY_SCAN = tuple(i / 10 for i in range(11))
# nadirs closer than this are treated as equal by the monotonicity scan
_NADIR_EPS_HZ = 1e-9


@dataclass(frozen=True)
class MinFrrResult:
    frr_mw: float
    scale: float
    total_frr_mw: float
    nadir_hz: float
    iterations: int


def nadir_at_scale(fleet: Fleet, cond: SystemCondition, s: float) -> float:
    return nadir(simulate(scale_headroom(fleet, s), cond))


def check_monotone(fleet: Fleet, cond: SystemCondition, scales: Sequence[float] = VERIFY_SCAN) -> None:
    """Raise NonMonotone if the nadir decreases anywhere along ``scales``."""
    prev = None
    for s in scales:
        n = nadir_at_scale(fleet, cond, s)
        if prev is not None and n < prev[1] - _NADIR_EPS_HZ:
            raise NonMonotone(f"nadir fell from {prev[1]:.6f} Hz at s={prev[0]} to {n:.6f} Hz at s={s}")
        prev = (s, n)


def search_min_frr(
    fleet: Fleet,
    cond: SystemCondition,
    tolerance_mw: float = 1.0,
    verify: bool = True,
    max_iter: int = MAX_ITER,
) -> MinFrrResult:
    """Bisect the headroom scale factor; return the feasible end of the bracket."""
    if not tolerance_mw > 0:
        raise DomainError("tolerance_mw must be > 0")
    threshold = cond.ufls_threshold_hz
    total = total_frr(fleet)

    n0 = nadir_at_scale(fleet, cond, 0.0)
    if n0 >= threshold:
        return MinFrrResult(0.0, 0.0, total, n0, 0)
    n1 = nadir_at_scale(fleet, cond, 1.0)
    if total <= 0 or n1 < threshold:
        raise Infeasible(
            f"nadir {n1:.4f} Hz with full headroom ({total:.1f} MW) is below {threshold} Hz"
        )

    lo, hi, n_hi = 0.0, 1.0, n1
    iterations = 0
    while (hi - lo) * total > tolerance_mw:
        iterations += 1
        if iterations > max_iter:
            raise NumericalError(f"bisection did not reach {tolerance_mw} MW in {max_iter} iterations")
        mid = 0.5 * (lo + hi)
        n_mid = nadir_at_scale(fleet, cond, mid)
        if n_mid >= threshold:
            hi, n_hi = mid, n_mid
        else:
            lo = mid
    if verify:
        check_monotone(fleet, cond)
    return MinFrrResult(hi * total, hi, total, n_hi, iterations)


def min_frr(fleet: Fleet, cond: SystemCondition, tolerance_mw: float = 1.0, verify: bool = True) -> float:
    """Smallest total reserve (MW) keeping the nadir at or above the UFLS threshold."""
    return search_min_frr(fleet, cond, tolerance_mw, verify).frr_mw


def grid_scan_min_frr(fleet: Fleet, cond: SystemCondition, n: int = 100) -> float | None:
    """Smallest feasible reserve on the scale grid 0, 1/n, ..., 1 (None if none)."""
    total = total_frr(fleet)
    for i in range(n + 1):
        s = i / n
        if nadir_at_scale(fleet, cond, s) >= cond.ufls_threshold_hz:
            return s * total
    return None


def fleet_for_inertia(fleet: Fleet, load_mw: float, target_mvas: float, rel_tol: float = 0.01) -> Fleet:
    """Displace synchronous units by renewables until inertia is within ``rel_tol`` of target.

    Inertia is a step function of renewable output, so this bisects on the
    renewable MW for the first point at or below ``target * (1 + rel_tol)``.
    """
    if not target_mvas > 0:
        raise DomainError("target inertia must be > 0")
    upper = target_mvas * (1.0 + rel_tol)

    def inertia_at(r):
        return total_inertia(displace_for_renewables(fleet, load_mw, r))

    if inertia_at(0.0) <= upper:
        hi = 0.0
    else:
        lo, hi = 0.0, float(load_mw)
        for _ in range(200):
            if hi - lo <= 1e-9 * load_mw:
                break
            mid = 0.5 * (lo + hi)
            if inertia_at(mid) <= upper:
                hi = mid
            else:
                lo = mid
    displaced = displace_for_renewables(fleet, load_mw, hi)
    got = total_inertia(displaced)
    if abs(got - target_mvas) > rel_tol * target_mvas:
        raise DomainError(
            f"displacement cannot reach {target_mvas:.6g} MVA*s within {rel_tol:.0%} (nearest {got:.6g})"
        )
    return displaced


# -- curves ---------------------------------------------------------------


@dataclass(frozen=True)
class ReserveCurve:
    points: tuple[tuple[float, float], ...]
    ufls_threshold_hz: float | None = None
    mode: str = "override_inertia"
    tolerance_mw: float = 1.0
    infeasible: tuple[float, ...] = ()
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = tuple((float(k), float(f)) for k, f in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "infeasible", tuple(float(k) for k in self.infeasible))
        if self.mode not in MODES:
            raise DomainError(f"unknown curve mode {self.mode!r}")
        for (k0, f0), (k1, f1) in zip(pts, pts[1:]):
            if not k1 > k0:
                raise DomainError("curve inertia values must be strictly increasing")
            if f1 > f0:
                raise NonMonotone(
                    f"minimum reserve rises from {f0:.3f} MW at {k0:.6g} to {f1:.3f} MW at {k1:.6g} MVA*s"
                )

    @property
    def inertia_mvas(self) -> list[float]:
        return [k for k, _ in self.points]

    @property
    def min_frr_mw(self) -> list[float]:
        return [f for _, f in self.points]

    def slopes_per_1e5(self) -> list[float]:
        """Reserve increase (MW) per 1e5 MVA*s of inertia reduction, per segment."""
        return [
            (f0 - f1) / (k1 - k0) * 1e5
            for (k0, f0), (k1, f1) in zip(self.points, self.points[1:])
        ]


def scenario_hash(fleet: Fleet, cond: SystemCondition) -> str:
    payload = format_fleet_csv(fleet) + json.dumps(
        scenario_to_dict(Scenario(replace(cond, inertia_override_mvas=None), dict(fleet.governors))),
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _curve_point(args):
    fleet, cond, k, mode, tolerance_mw = args
    if mode == "override_inertia":
        cond = replace(cond, inertia_override_mvas=k)
    else:
        fleet = fleet_for_inertia(fleet, cond.load_mw, k)
        cond = replace(cond, inertia_override_mvas=None)
    try:
        return min_frr(fleet, cond, tolerance_mw)
    except Infeasible:
        return None


def _map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


def _check_grid(inertia_grid):
    grid = [float(k) for k in inertia_grid]
    if not grid:
        raise DomainError("inertia grid is empty")
    if any(not b > a for a, b in zip(grid, grid[1:])):
        raise DomainError("inertia grid must be strictly increasing")
    if any(not k > 0 for k in grid):
        raise DomainError("inertia grid values must be > 0")
    return grid


def build_curve(
    fleet: Fleet,
    cond: SystemCondition,
    inertia_grid: Sequence[float],
    mode: str = "override_inertia",
    tolerance_mw: float = 1.0,
    jobs: int = 1,
) -> ReserveCurve:
    """Minimum reserve at each grid inertia. Infeasible points become gaps."""
    if mode not in MODES:
        raise DomainError(f"unknown curve mode {mode!r}")
    grid = _check_grid(inertia_grid)
    results = _map(_curve_point, [(fleet, cond, k, mode, tolerance_mw) for k in grid], jobs)
    points = [(k, f) for k, f in zip(grid, results) if f is not None]
    gaps = [k for k, f in zip(grid, results) if f is None]
    if not points:
        raise Infeasible("no grid point is feasible")
    return ReserveCurve(
        points=tuple(points),
        ufls_threshold_hz=cond.ufls_threshold_hz,
        mode=mode,
        tolerance_mw=tolerance_mw,
        infeasible=tuple(gaps),
        provenance={"scenario_hash": scenario_hash(fleet, cond), "units": len(fleet)},
    )


def compare_thresholds(
    fleet: Fleet,
    cond: SystemCondition,
    thresholds: Sequence[float],
    inertia_grid: Sequence[float],
    mode: str = "override_inertia",
    tolerance_mw: float = 1.0,
    jobs: int = 1,
) -> list[ReserveCurve]:
    """One curve per UFLS threshold over the same inertia grid."""
    if not thresholds:
        raise DomainError("no thresholds given")
    return [
        build_curve(fleet, replace(cond, ufls_threshold_hz=float(t)), inertia_grid, mode, tolerance_mw, jobs)
        for t in thresholds
    ]


def threshold_gaps(low: ReserveCurve, high: ReserveCurve) -> list[tuple[float, float | None, float | None, float | None]]:
    """Rows of (inertia, frr_low, frr_high, high - low) over the union of grid points."""
    a = dict(low.points)
    b = dict(high.points)
    rows = []
    for k in sorted(set(a) | set(b) | set(low.infeasible) | set(high.infeasible)):
        fa, fb = a.get(k), b.get(k)
        rows.append((k, fa, fb, None if fa is None or fb is None else fb - fa))
    return rows


# -- curve files ----------------------------------------------------------


def _g17(x):
    return format(float(x), ".17g")


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def format_curve_csv(curve: ReserveCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("inertia_mvas", "min_frr_mw"))
    for k, f in curve.points:
        writer.writerow((_g17(k), _g17(f)))
    return buf.getvalue()


def curve_sidecar(curve: ReserveCurve) -> dict:
    return {
        "ufls_threshold_hz": curve.ufls_threshold_hz,
        "mode": curve.mode,
        "tolerance_mw": curve.tolerance_mw,
        "scenario_hash": curve.provenance.get("scenario_hash"),
        "infeasible": list(curve.infeasible),
        "provenance": curve.provenance,
    }


def write_curve(curve: ReserveCurve, csv_path) -> None:
    csv_path = Path(csv_path)
    csv_path.write_text(format_curve_csv(curve), encoding="utf-8")
    sidecar_path(csv_path).write_text(json.dumps(curve_sidecar(curve), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_curve(csv_path) -> ReserveCurve:
    csv_path = Path(csv_path)
    source = str(csv_path)
    reader = csv.reader(io.StringIO(csv_path.read_text(encoding="utf-8")))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["inertia_mvas", "min_frr_mw"]:
        raise InputError("bad header, expected inertia_mvas,min_frr_mw", source, 1)
    points = []
    for row in reader:
        if not row:
            continue
        try:
            k, f = (float(x) for x in row)
        except ValueError:
            raise InputError(f"row {reader.line_num}: expected two numbers", source, reader.line_num) from None
        if not (math.isfinite(k) and math.isfinite(f)):
            raise InputError(f"row {reader.line_num}: non-finite value", source, reader.line_num)
        points.append((k, f))
    if not points:
        raise InputError("curve has no points", source)
    meta = {}
    side = sidecar_path(csv_path)
    if side.exists():
        try:
            meta = json.loads(side.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc.msg}", str(side), exc.lineno) from None
    try:
        return ReserveCurve(
            points=tuple(points),
            ufls_threshold_hz=meta.get("ufls_threshold_hz"),
            mode=meta.get("mode", "override_inertia"),
            tolerance_mw=meta.get("tolerance_mw", 1.0),
            infeasible=tuple(meta.get("infeasible", ())),
            provenance=meta.get("provenance", {}),
        )
    except DomainError as exc:
        raise InputError(str(exc), source) from None
