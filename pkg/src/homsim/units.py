"""Conversion between SI quantities and the internal units (gamma_1 = 1).

Times are measured in lifetimes of emitter 1 and rates/angular frequencies
in multiples of gamma_1.  Frequencies quoted in Hz-multiples are angular by
default (1 GHz = 1e9 rad/s); the ``cycles`` convention multiplies by 2 pi.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .errors import ConfigError

TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12, "fs": 1e-15}
FREQ_UNITS = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, "THz": 1e12}
INTERNAL_TIME = "1/gamma1"
INTERNAL_RATE = "gamma1"
CONVENTIONS = ("angular", "cycles")

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/0-9]*)\s*$")


def parse_quantity(text) -> tuple[float, str]:
    """``"250 ps"`` -> ``(250.0, "ps")``; bare numbers get an empty unit."""
    if isinstance(text, bool):
        raise ConfigError(f"not a quantity: {text!r}")
    if isinstance(text, (int, float)):
        return float(text), ""
    m = _QUANTITY.match(str(text))
    if not m:
        raise ConfigError(f"cannot parse quantity {text!r}")
    return float(m.group(1)), m.group(2)


@dataclass(frozen=True)
class UnitSystem:
    """``gamma1_si`` is emitter 1's decay rate in 1/s (None: internal units only).

    ``lifetime_si`` defaults to ``1/gamma1_si``; passing it explicitly keeps
    emitter 1's own lifetime converting to exactly 1.
    """

    gamma1_si: float | None = None
    convention: str = "angular"
    lifetime_si: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ConfigError(f"frequency convention must be one of {CONVENTIONS}")
        if self.gamma1_si is not None and not self.gamma1_si > 0:
            raise ConfigError("gamma1 must be positive")
        if self.gamma1_si is not None and self.lifetime_si is None:
            object.__setattr__(self, "lifetime_si", 1.0 / self.gamma1_si)

    @classmethod
    def from_lifetime(cls, value: float, unit: str, convention: str = "angular") -> "UnitSystem":
        if unit not in TIME_UNITS:
            raise ConfigError(f"unknown time unit {unit!r}")
        tau = value * TIME_UNITS[unit]
        if not tau > 0:
            raise ConfigError("lifetime must be positive")
        return cls(1.0 / tau, convention, tau)

    def _need_si(self, unit):
        if self.gamma1_si is None:
            raise ConfigError(f"unit {unit!r} needs an SI reference: give emitter1 a lifetime in SI units")

    def _freq_factor(self, unit):
        f = FREQ_UNITS[unit]
        return f * 2.0 * math.pi if self.convention == "cycles" else f

    def time_to_internal(self, value: float, unit: str) -> float:
        if unit in ("", INTERNAL_TIME):
            return float(value)
        if unit not in TIME_UNITS:
            raise ConfigError(f"unknown time unit {unit!r}")
        self._need_si(unit)
        return value * TIME_UNITS[unit] / self.lifetime_si

    def time_from_internal(self, value: float, unit: str) -> float:
        if unit in ("", INTERNAL_TIME):
            return float(value)
        self._need_si(unit)
        return value * self.lifetime_si / TIME_UNITS[unit]

    def rate_to_internal(self, value: float, unit: str) -> float:
        """Decay rates, dephasing rates and angular frequencies.

        ``1/<time unit>`` is a plain rate and ignores the frequency convention.
        """
        if unit in ("", INTERNAL_RATE):
            return float(value)
        if unit.startswith("1/") and unit[2:] in TIME_UNITS:
            self._need_si(unit)
            return value * self.lifetime_si / TIME_UNITS[unit[2:]]
        if unit not in FREQ_UNITS:
            raise ConfigError(f"unknown frequency unit {unit!r}")
        self._need_si(unit)
        return value * self._freq_factor(unit) * self.lifetime_si

    def rate_from_internal(self, value: float, unit: str) -> float:
        if unit in ("", INTERNAL_RATE):
            return float(value)
        if unit.startswith("1/") and unit[2:] in TIME_UNITS:
            self._need_si(unit)
            return value * TIME_UNITS[unit[2:]] / self.lifetime_si
        self._need_si(unit)
        return value / (self.lifetime_si * self._freq_factor(unit))

    def time(self, text) -> float:
        return self.time_to_internal(*parse_quantity(text))

    def rate(self, text) -> float:
        return self.rate_to_internal(*parse_quantity(text))


def lifetime_to_internal(units: UnitSystem, text) -> float:
    """A lifetime quantity converted to an internal decay rate."""
    tau = units.time(text)
    if not tau > 0:
        raise ConfigError(f"lifetime must be positive, got {text!r}")
    return 1.0 / tau
