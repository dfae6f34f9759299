"""Inertia-aware minimum frequency response reserve planning."""

from .dynamics import FrequencyTrace, Scenario, SystemCondition, nadir, rocof_initial, simulate
from .errors import (
    DomainError,
    FrrError,
    Infeasible,
    InputError,
    NonMonotone,
    NumericalError,
    RangeError,
)
from .fleet import (
    Fleet,
    GeneratorUnit,
    displace_for_renewables,
    scale_headroom,
    total_frr,
    total_inertia,
)
from .governor import DEFAULT_GOVERNORS, FUEL_TYPES, GovernorParams
from .metrics import AbcPoints, abc_points, estimate_inertia, rocof_eq1
from .schedule import (
    CostReport,
    InertiaProfile,
    PriceTable,
    ReserveSchedule,
    ScheduleContext,
    cost_report,
    evaluate_curve,
    make_schedule,
)
from .search import ReserveCurve, build_curve, compare_thresholds, min_frr, search_min_frr

__version__ = "0.1.0"
