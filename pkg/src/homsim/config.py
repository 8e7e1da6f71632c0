"""TOML configuration files for scenarios and sweeps.

Example::

    schema = 1

    [emitter1]
    lifetime = "250 ps"

    [emitter2]
    lifetime = "1 ns"
    dephasing = "0.1 1/ns"

    [pulse]
    fwhm = "10 ps"

    [hom]
    delta_omega0 = "4 GHz"      # angular unless frequency_convention = "cycles"

    [run]
    precision = "default"
    outputs = ["g2_pulsewise", "breakdown"]

    [[sweep.axis]]
    path = "emitter2.lifetime"
    min = "50 ps"
    max = "20 ns"
    count = 41
    scale = "log"

Bare numbers are read in internal units (times in 1/gamma_1, rates in
gamma_1).  SI units need emitter 1's lifetime (or decay rate) in SI units.
"""
from __future__ import annotations

import math
from dataclasses import replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, InconsistentTimescales
from .hom import HomConfig
from .sweep import Axis, Scenario, SweepSpec, canonical_path, set_param
from .tls import EmitterSpec, PulseSpec, t1t2_to_rates
from .units import INTERNAL_TIME, TIME_UNITS, UnitSystem, parse_quantity

SCHEMA = 1
_TIME_PATHS = {"lifetime", "fwhm", "delta_tau"}
_PLAIN_PATHS = {"gamma_ratio", "area", "phi"}


def load_toml(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def units_from(doc: dict, convention: str | None = None) -> UnitSystem:
    conv = convention or doc.get("units", {}).get("frequency_convention", "angular")
    e1 = doc.get("emitter1", {})
    if "lifetime" in e1:
        value, unit = parse_quantity(e1["lifetime"])
        if unit not in ("", INTERNAL_TIME):
            return UnitSystem.from_lifetime(value, unit, conv)
    if "gamma" in e1:
        value, unit = parse_quantity(e1["gamma"])
        if unit.startswith("1/") and unit[2:] in TIME_UNITS:
            return UnitSystem(value / TIME_UNITS[unit[2:]], conv)
    return UnitSystem(None, conv)


def convert_value(units: UnitSystem, path: str, raw) -> float:
    """Convert a raw config value for ``path`` to internal units."""
    name = canonical_path(path).rpartition(".")[2]
    if name in _PLAIN_PATHS:
        value, unit = parse_quantity(raw)
        if unit not in ("", "rad"):
            raise ConfigError(f"{path} is dimensionless, got unit {unit!r}")
        return value
    if name in _TIME_PATHS:
        return units.time(raw)
    return units.rate(raw)


def _emitter(section: dict, units: UnitSystem, default_label: str) -> EmitterSpec:
    known = {"lifetime", "gamma", "dephasing", "t2", "laser_detuning", "wander_fwhm", "label"}
    extra = set(section) - known
    if extra:
        raise ConfigError(f"[{default_label}] unknown keys {sorted(extra)}")
    if "lifetime" in section and "gamma" in section:
        raise ConfigError(f"[{default_label}] give either lifetime or gamma, not both")
    if "lifetime" in section:
        gamma = 1.0 / units.time(section["lifetime"])
    else:
        gamma = units.rate(section.get("gamma", 1.0))
    if "t2" in section:
        if "dephasing" in section:
            raise ConfigError(f"[{default_label}] give either dephasing or t2, not both")
        try:
            gamma, deph = t1t2_to_rates(1.0 / gamma, units.time(section["t2"]))
        except InconsistentTimescales as exc:
            raise ConfigError(f"[{default_label}] {exc}") from None
    else:
        deph = units.rate(section.get("dephasing", 0.0))
    try:
        return EmitterSpec(
            gamma=gamma,
            gamma_deph=deph,
            laser_detuning=units.rate(section.get("laser_detuning", 0.0)),
            wander_fwhm=units.rate(section.get("wander_fwhm", 0.0)),
            label=str(section.get("label", default_label)),
        )
    except ValueError as exc:
        raise ConfigError(f"[{default_label}] {exc}") from None


def scenario_from(doc: dict, units: UnitSystem) -> Scenario:
    schema = doc.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ConfigError(f"unsupported config schema {schema!r} (expected {SCHEMA})")
    base = Scenario()
    e1 = _emitter(doc.get("emitter1", {}), units, "emitter1")
    e2 = _emitter(doc.get("emitter2", {}), units, "emitter2")
    p = doc.get("pulse", {})
    h = doc.get("hom", {})
    try:
        pulse = PulseSpec(
            fwhm=units.time(p["fwhm"]) if "fwhm" in p else base.pulse.fwhm,
            area=parse_quantity(p.get("area", math.pi))[0],
        )
        hom = HomConfig(
            delta_omega0=units.rate(h.get("delta_omega0", 0.0)),
            delta_tau=units.time(h.get("delta_tau", 0.0)),
            phi=parse_quantity(h.get("phi", 0.0))[0],
            normalization=h.get("normalization", "polarization"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return Scenario(e1, e2, pulse, hom, bool(doc.get("run", {}).get("resolve_beats", False)))


def sweep_from(doc: dict, units: UnitSystem, precision: str | None = None,
               bin_width: float | None = None) -> SweepSpec:
    base = scenario_from(doc, units)
    run = doc.get("run", {})
    axes = []
    for ax in doc.get("sweep", {}).get("axis", []):
        try:
            path = ax["path"]
            axes.append(Axis(
                path=path,
                min=convert_value(units, path, ax["min"]),
                max=convert_value(units, path, ax["max"]),
                count=int(ax["count"]),
                scale=ax.get("scale", "linear"),
            ))
        except KeyError as exc:
            raise ConfigError(f"sweep axis is missing {exc}") from None
        set_param(base, path, axes[-1].min)  # validates the path early
    bw = bin_width if bin_width is not None else (units.time(run["bin_width"]) if "bin_width" in run else None)
    return SweepSpec(
        base=base,
        axes=tuple(axes),
        outputs=tuple(run.get("outputs", ["g2_pulsewise"])),
        precision=precision or run.get("precision", "default"),
        bin_width=bw,
    )


def apply_overrides(sc: Scenario, units: UnitSystem, overrides) -> Scenario:
    """``["emitter2.gamma=2", "hom.delta_tau=30 ps"]`` applied on top of ``sc``."""
    for item in overrides or ():
        path, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form path=value")
        path = path.strip()
        sc = set_param(sc, path, convert_value(units, path, raw.strip()))
    return sc


def load_config(path=None, convention: str | None = None) -> tuple[dict, UnitSystem]:
    doc = load_toml(Path(path)) if path else {}
    return doc, units_from(doc, convention)


def with_precision(spec: SweepSpec, precision: str | None) -> SweepSpec:
    return replace(spec, precision=precision) if precision else spec
