"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 domain or numerical error,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import synthetic
from .dynamics import read_scenario_json, simulate, write_trace_csv, read_trace_csv
from .errors import DomainError, FrrError, Infeasible, InputError, NonMonotone, NumericalError
from .fleet import read_fleet_csv, scale_headroom
from .metrics import B_WINDOW_S, trace_metrics
from .schedule import (
    ScheduleContext,
    cost_report,
    format_report_json,
    format_schedule_csv,
    make_schedule,
    read_price_csv,
    read_profile_csv,
)
from .search import (
    MODES,
    build_curve,
    compare_thresholds,
    read_curve,
    search_min_frr,
    threshold_gaps,
    write_curve,
)

log = logging.getLogger("frrplan")

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN, EXIT_INTERNAL = 0, 2, 3, 4


def _floats(text):
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _unit_interval(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return value


def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frrplan",
        description="Minimum frequency response reserve versus system inertia.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fleet", type=Path, help="fleet CSV (default: bundled synthetic EI fleet)")
    common.add_argument("--scenario", type=Path, help="scenario JSON (default: bundled base scenario)")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
    common.add_argument("--dt", type=_positive, help="override integration step, s")
    common.add_argument("--horizon", type=_positive, help="override simulation horizon, s")
    common.add_argument("--frr-scale", type=_unit_interval, help="shrink every responsive unit's headroom to this fraction first")
    common.add_argument("--jobs", type=_positive_int, default=1, help="worker processes for grid sweeps (default 1)")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--tolerance-mw", type=_positive, default=1.0, help="bisection bracket width, MW (default 1)")
    search.add_argument("--grid", type=_floats, help="inertia grid a,b,c in MVA*s (default: the five studied EI levels)")
    search.add_argument("--mode", choices=MODES, default="override_inertia", help="how grid inertia is imposed")

    p = sub.add_parser("simulate", parents=[common], help="simulate one contingency; write trace.csv and metrics.json")
    p.add_argument("--window", type=_positive, default=0.5, help="ROCOF fitting window, s (default 0.5)")

    p = sub.add_parser("min-frr", parents=[common, search], help="minimum reserve at one inertia; write min_frr.json")
    p.add_argument("--inertia", type=_positive, help="impose this system inertia, MVA*s")

    sub.add_parser("curve", parents=[common, search], help="inertia -> minimum reserve curve; write curve.csv + curve.json")

    for name, text in (
        ("schedule", "adaptive reserve schedule for a daily profile; write schedule.csv"),
        ("cost", "price adaptive vs static reserve; write schedule.csv and report.json"),
    ):
        p = sub.add_parser(name, parents=[common, search], help=text)
        p.add_argument("--profile", type=Path, help="profile CSV (default: bundled cloudy day, inertia form)")
        p.add_argument("--curve", type=Path, help="curve CSV with JSON sidecar (default: build from fleet/scenario)")
        p.add_argument("--pv-capacity-mw", type=_positive, help="PV capacity for capacity-factor profiles (default: load)")
        if name == "cost":
            p.add_argument("--prices", type=Path, help="price CSV (default: bundled ISO table)")
            p.add_argument("--bau-frr", type=_positive, help="static BAU reserve, MW (default: schedule peak)")

    p = sub.add_parser("compare-thresholds", parents=[common, search], help="one curve per UFLS threshold plus a gap table")
    p.add_argument("--thresholds", type=_floats, default=[59.3, 59.5], help="UFLS thresholds a,b in Hz (default 59.3,59.5)")

    p = sub.add_parser("metrics", parents=[common], help="point A/B/C, ROCOF and inertia estimate; write metrics.json")
    p.add_argument("--trace", type=Path, help="trace CSV (default: simulate fleet/scenario)")
    p.add_argument("--window", type=_positive, default=0.5, help="ROCOF fitting window, s (default 0.5)")
    p.add_argument("--b-window", type=_floats, default=list(B_WINDOW_S), help="Value B window start,end in s (default 20,52)")
    return parser


# -- input assembly -------------------------------------------------------


def _load_fleet_and_condition(args):
    fleet = read_fleet_csv(args.fleet) if args.fleet else read_fleet_csv(synthetic.data_path("fleet"))
    scenario = read_scenario_json(args.scenario) if args.scenario else read_scenario_json(synthetic.data_path("scenario"))
    fleet = fleet.with_governors(scenario.governors)
    cond = scenario.condition
    changes = {}
    if args.dt is not None:
        changes["dt_s"] = args.dt
    if args.horizon is not None:
        changes["horizon_s"] = args.horizon
    if changes:
        cond = replace(cond, **changes)
    if args.frr_scale is not None:
        fleet = scale_headroom(fleet, args.frr_scale)
    return fleet, cond


def _grid(args):
    return args.grid if args.grid else list(synthetic.TABLE2_INERTIA_MVAS)


def _dump_json(data, path: Path):
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _out_dir(args) -> Path:
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


# -- subcommands ----------------------------------------------------------


def cmd_simulate(args):
    fleet, cond = _load_fleet_and_condition(args)
    trace = simulate(fleet, cond)
    out = _out_dir(args)
    write_trace_csv(trace, out / "trace.csv")
    metrics = trace_metrics(trace, cond.contingency_mw, args.window) if cond.horizon_s >= B_WINDOW_S[1] else None
    if metrics is None:
        raise DomainError(f"horizon {cond.horizon_s} s is shorter than the Value B window")
    _dump_json(metrics, out / "metrics.json")
    print(f"nadir {metrics['point_c_hz']:.6f} Hz, ROCOF {metrics['rocof_hzps']:.6f} Hz/s")


def cmd_min_frr(args):
    fleet, cond = _load_fleet_and_condition(args)
    if args.inertia is not None:
        cond = replace(cond, inertia_override_mvas=args.inertia)
    res = search_min_frr(fleet, cond, args.tolerance_mw)
    data = {
        "min_frr_mw": res.frr_mw,
        "scale": res.scale,
        "total_frr_mw": res.total_frr_mw,
        "nadir_hz": res.nadir_hz,
        "iterations": res.iterations,
        "ufls_threshold_hz": cond.ufls_threshold_hz,
        "inertia_override_mvas": cond.inertia_override_mvas,
        "tolerance_mw": args.tolerance_mw,
    }
    _dump_json(data, _out_dir(args) / "min_frr.json")
    print(f"minimum FRR {res.frr_mw:.3f} MW (scale {res.scale:.6f})")


def cmd_curve(args):
    fleet, cond = _load_fleet_and_condition(args)
    curve = build_curve(fleet, cond, _grid(args), args.mode, args.tolerance_mw, args.jobs)
    write_curve(curve, _out_dir(args) / "curve.csv")
    for (k, f) in curve.points:
        print(f"{k:.6g} MVA*s -> {f:.3f} MW")
    for k in curve.infeasible:
        print(f"{k:.6g} MVA*s -> infeasible")


def _schedule(args, fleet, cond):
    if args.profile:
        profile = read_profile_csv(args.profile)
    else:
        profile = read_profile_csv(synthetic.data_path("inertia_profile"))
    if args.curve:
        curve = read_curve(args.curve)
    else:
        curve = build_curve(fleet, cond, _grid(args), args.mode, args.tolerance_mw, args.jobs)
    context = ScheduleContext(fleet, cond.load_mw, args.pv_capacity_mw or cond.load_mw)
    return make_schedule(profile, curve, context, args.jobs)


def cmd_schedule(args):
    fleet, cond = _load_fleet_and_condition(args)
    schedule = _schedule(args, fleet, cond)
    (_out_dir(args) / "schedule.csv").write_text(format_schedule_csv(schedule), encoding="utf-8")
    print(f"{len(schedule.entries)} entries, peak {max(schedule.frr_mw):.3f} MW")


def cmd_cost(args):
    fleet, cond = _load_fleet_and_condition(args)
    schedule = _schedule(args, fleet, cond)
    prices = read_price_csv(args.prices) if args.prices else read_price_csv(synthetic.data_path("prices"))
    report = cost_report(schedule, prices, args.bau_frr)
    out = _out_dir(args)
    (out / "schedule.csv").write_text(format_schedule_csv(schedule), encoding="utf-8")
    (out / "report.json").write_text(format_report_json(report), encoding="utf-8")
    print(f"average price {prices.average:.2f} $/MW, savings {report.savings_fraction:.1%}")


def _label(t):
    return format(t, "g").replace(".", "p")


def cmd_compare_thresholds(args):
    fleet, cond = _load_fleet_and_condition(args)
    thresholds = args.thresholds
    for t in thresholds:
        if not t < cond.nominal_freq_hz:
            raise DomainError(f"threshold {t} Hz is not below nominal")
    curves = compare_thresholds(fleet, cond, thresholds, _grid(args), args.mode, args.tolerance_mw, args.jobs)
    out = _out_dir(args)
    for t, curve in zip(thresholds, curves):
        write_curve(curve, out / f"curve_{_label(t)}.csv")
    order = sorted(range(len(thresholds)), key=lambda i: thresholds[i])
    low, high = curves[order[0]], curves[order[-1]]
    lines = [f"inertia_mvas,frr_{_label(thresholds[order[0]])}_mw,frr_{_label(thresholds[order[-1]])}_mw,gap_mw"]
    for k, a, b, gap in threshold_gaps(low, high):
        cells = ["" if v is None else format(v, ".17g") for v in (a, b, gap)]
        lines.append(",".join([format(k, ".17g")] + cells))
        if gap is not None:
            print(f"{k:.6g} MVA*s: gap {gap:.3f} MW")
    (out / "gaps.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_metrics(args):
    if args.trace:
        trace = read_trace_csv(args.trace)
        contingency = None
        if args.scenario:
            contingency = read_scenario_json(args.scenario).condition.contingency_mw
    else:
        fleet, cond = _load_fleet_and_condition(args)
        trace = simulate(fleet, cond)
        contingency = cond.contingency_mw
    if len(args.b_window) != 2:
        raise DomainError("--b-window takes start,end")
    data = trace_metrics(trace, contingency, args.window, tuple(args.b_window))
    _dump_json(data, _out_dir(args) / "metrics.json")
    print(f"A {data['value_a_hz']:.6f}  B {data['value_b_hz']:.6f}  C {data['point_c_hz']:.6f} Hz")


COMMANDS = {
    "simulate": cmd_simulate,
    "min-frr": cmd_min_frr,
    "curve": cmd_curve,
    "schedule": cmd_schedule,
    "cost": cmd_cost,
    "compare-thresholds": cmd_compare_thresholds,
    "metrics": cmd_metrics,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (InputError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, NumericalError, Infeasible, NonMonotone) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (FrrError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK
