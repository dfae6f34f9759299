"""Per-fuel-type governor/turbine parameters."""

from dataclasses import dataclass
import math

from .errors import DomainError

FUEL_TYPES = ("hydro", "steam", "gas", "other")


@dataclass(frozen=True)
class GovernorParams:
    """Two cascaded lags with a fast-path fraction.

    ``hp_fraction`` is the share of the response taken from the first lag;
    the rest comes from the second. A negative value gives the initial
    inverse response typical of hydro units.
    """

    t1_s: float
    t2_s: float
    hp_fraction: float

    def __post_init__(self):
        for name in ("t1_s", "t2_s"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be > 0, got {value!r}")
        if not math.isfinite(self.hp_fraction):
            raise DomainError("hp_fraction must be finite")


# Tuning constants, not measured data.
DEFAULT_GOVERNORS = {
    "steam": GovernorParams(t1_s=0.5, t2_s=8.0, hp_fraction=0.3),
    "hydro": GovernorParams(t1_s=0.5, t2_s=5.0, hp_fraction=-0.6),
    "gas": GovernorParams(t1_s=0.4, t2_s=1.5, hp_fraction=0.5),
    "other": GovernorParams(t1_s=0.5, t2_s=8.0, hp_fraction=0.3),
}


def merge_governors(overrides=None):
    """Return a full fuel-type -> GovernorParams map, defaults filled in."""
    merged = dict(DEFAULT_GOVERNORS)
    for fuel, params in (overrides or {}).items():
        if fuel not in FUEL_TYPES:
            raise DomainError(f"unknown fuel type {fuel!r}")
        merged[fuel] = params
    return merged
