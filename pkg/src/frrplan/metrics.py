"""Closed-form ROCOF, inertia back-estimation and Point A/B/C extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import FrequencyTrace, nadir, rocof_initial
from .errors import DomainError

# NERC BAL-003 Value B averaging window, seconds after the event
B_WINDOW_S = (20.0, 52.0)


def rocof_eq1(f_n_hz: float, p_imbalance_mw: float, k_sys_mvas: float) -> float:
    """Initial frequency decline rate f_N * P / (2 K), Hz/s.

    ``k_sys_mvas`` is the aggregate H*S of the system. A positive imbalance
    (generation loss) gives a positive decline rate.
    """
    if not k_sys_mvas > 0:
        raise DomainError(f"system inertia must be > 0, got {k_sys_mvas!r}")
    return f_n_hz * p_imbalance_mw / (2.0 * k_sys_mvas)


def estimate_inertia(rocof_hzps: float, p_imbalance_mw: float, f_n_hz: float = 60.0) -> float:
    """Invert :func:`rocof_eq1` for the aggregate inertia, MVA*s."""
    if rocof_hzps == 0 or not math.isfinite(rocof_hzps):
        raise DomainError("ROCOF must be finite and non-zero to estimate inertia")
    return f_n_hz * p_imbalance_mw / (2.0 * rocof_hzps)


@dataclass(frozen=True)
class AbcPoints:
    value_a_hz: float
    value_b_hz: float
    point_c_hz: float
    c_to_b_ratio: float | None  # (A - C) / (A - B); None when A == B


def abc_points(trace: FrequencyTrace, b_window_s: tuple[float, float] = B_WINDOW_S) -> AbcPoints:
    b0, b1 = b_window_s
    t = trace.t_s
    if not (0 <= b0 < b1):
        raise DomainError("B window must satisfy 0 <= start < end")
    if t[-1] < b1 - 1e-9:
        raise DomainError(f"trace horizon {t[-1]:.3f} s is shorter than the B window end {b1} s")
    mask = (t >= b0 - 1e-9) & (t <= b1 + 1e-9)
    a = float(trace.freq_hz[0])
    b = float(np.mean(trace.freq_hz[mask]))
    c = nadir(trace)
    dev_b = a - b
    ratio = (a - c) / dev_b if dev_b != 0 else (1.0 if a == c else None)
    return AbcPoints(a, b, c, ratio)


def trace_metrics(
    trace: FrequencyTrace,
    contingency_mw: float | None = None,
    window_s: float = 0.5,
    b_window_s: tuple[float, float] = B_WINDOW_S,
) -> dict:
    """Metrics JSON payload for one trace."""
    pts = abc_points(trace, b_window_s)
    rocof = -rocof_initial(trace, window_s)
    estimate = None
    if contingency_mw and rocof != 0:
        estimate = estimate_inertia(rocof, contingency_mw, trace.nominal_freq_hz)
    return {
        "value_a_hz": pts.value_a_hz,
        "value_b_hz": pts.value_b_hz,
        "point_c_hz": pts.point_c_hz,
        "c_to_b_ratio": pts.c_to_b_ratio,
        "rocof_hzps": rocof,
        "inertia_estimate_mvas": estimate,
    }
