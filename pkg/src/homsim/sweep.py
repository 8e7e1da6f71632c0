"""Scenario evaluation, parameter sweeps and threshold searches."""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .correlators import compute_correlators
from .errors import ConfigError, NoBracket
from .grid import get_precision, make_grid
from .hom import HomConfig, HomResult, assemble, bin_histogram, delayed_pulses
from .tls import EmitterSpec, PulseSpec
from .wandering import WanderingModel, averaged_g2

OBSERVABLES = ("g2_pulsewise", "g2_time_resolved", "binned_histogram", "breakdown")
BASELINE_PULSE = 0.026  # pulse FWHM in units of 1/gamma_1


@dataclass(frozen=True)
class Scenario:
    """Two emitters driven by identical pulses plus the interference settings."""

    emitter1: EmitterSpec = EmitterSpec(1.0, label="emitter1")
    emitter2: EmitterSpec = EmitterSpec(1.0, label="emitter2")
    pulse: PulseSpec = PulseSpec(BASELINE_PULSE)
    hom: HomConfig = HomConfig()
    resolve_beats: bool = False

    def to_dict(self) -> dict:
        def emitter(e):
            return {"gamma": e.gamma, "gamma_deph": e.gamma_deph, "laser_detuning": e.laser_detuning,
                    "wander_fwhm": e.wander_fwhm, "label": e.label}

        return {
            "emitter1": emitter(self.emitter1),
            "emitter2": emitter(self.emitter2),
            "pulse": {"fwhm": self.pulse.fwhm, "area": self.pulse.area, "center": self.pulse.center},
            "hom": {"delta_omega0": self.hom.delta_omega0, "delta_tau": self.hom.delta_tau,
                    "phi": self.hom.phi, "normalization": self.hom.normalization},
            "resolve_beats": self.resolve_beats,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        return cls(
            EmitterSpec(**d["emitter1"]),
            EmitterSpec(**d["emitter2"]),
            PulseSpec(**d["pulse"]),
            HomConfig(**d["hom"]),
            bool(d.get("resolve_beats", False)),
        )


# short names used by threshold searches and the CLI
ALIASES = {
    "gamma_ratio": "emitter2.gamma_ratio",
    "delta_omega": "hom.delta_omega0",
    "delta_tau": "hom.delta_tau",
    "gamma_deph": "emitter1.gamma_deph",
    "wander_fwhm": "emitter2.wander_fwhm",
}
_EMITTER_FIELDS = ("gamma", "gamma_deph", "laser_detuning", "wander_fwhm")


def canonical_path(path: str) -> str:
    return ALIASES.get(path, path)


def get_param(sc: Scenario, path: str) -> float:
    path = canonical_path(path)
    head, _, name = path.partition(".")
    if head in ("emitter1", "emitter2"):
        e = getattr(sc, head)
        if name == "lifetime":
            return 1.0 / e.gamma
        if name == "gamma_ratio" and head == "emitter2":
            return sc.emitter2.gamma / sc.emitter1.gamma
        if name in _EMITTER_FIELDS:
            return getattr(e, name)
    elif head == "pulse" and name in ("fwhm", "area"):
        return getattr(sc.pulse, name)
    elif head == "hom" and name in ("delta_omega0", "delta_tau", "phi"):
        return getattr(sc.hom, name)
    raise ConfigError(f"unknown parameter path {path!r}")


def set_param(sc: Scenario, path: str, value: float) -> Scenario:
    path = canonical_path(path)
    value = float(value)
    head, _, name = path.partition(".")
    try:
        if head in ("emitter1", "emitter2"):
            e = getattr(sc, head)
            if name == "lifetime":
                return replace(sc, **{head: e.with_(gamma=1.0 / value)})
            if name == "gamma_ratio" and head == "emitter2":
                return replace(sc, emitter2=e.with_(gamma=sc.emitter1.gamma * value))
            if name in _EMITTER_FIELDS:
                return replace(sc, **{head: e.with_(**{name: value})})
        elif head == "pulse" and name in ("fwhm", "area"):
            return replace(sc, pulse=replace(sc.pulse, **{name: value}))
        elif head == "hom" and name in ("delta_omega0", "delta_tau", "phi"):
            return replace(sc, hom=replace(sc.hom, **{name: value}))
    except ValueError as exc:
        raise ConfigError(f"{path}={value}: {exc}") from None
    raise ConfigError(f"unknown parameter path {path!r}")


def evaluate(sc: Scenario, precision="default", cache: bool = True) -> HomResult:
    """Run the full pipeline for one scenario.

    Emitter 2's pulse is shifted to realise ``hom.delta_tau``; spectral
    wandering (non-zero ``wander_fwhm`` on either emitter) switches to the
    detuning-averaged result.  Grid metadata is stored in ``extras["grid"]``.
    """
    prof = get_precision(precision)
    p1, p2 = delayed_pulses(sc.pulse, sc.hom.delta_tau)
    e1, e2 = sc.emitter1, sc.emitter2
    beat = sc.hom.delta_omega0 + e2.laser_detuning - e1.laser_detuning
    grid = make_grid([e1, e2], [p1, p2], prof, resolve_detuning=beat if sc.resolve_beats else 0.0)
    # wandering and labels do not change the single-emitter dynamics
    c1 = compute_correlators(e1.with_(wander_fwhm=0.0, label=""), p1, grid, prof.rtol, cache=cache)
    c2 = compute_correlators(e2.with_(wander_fwhm=0.0, label=""), p2, grid, prof.rtol, cache=cache)
    if e1.wander_fwhm or e2.wander_fwhm:
        model = WanderingModel(sc.hom.delta_omega0, e1.wander_sigma, e2.wander_sigma, prof.gh_nodes)
        res = averaged_g2(c1, c2, sc.hom, model)
    else:
        res = assemble(c1, c2, sc.hom)
    res.extras["grid"] = dict(grid.meta, precision=prof.name, gh_nodes=prof.gh_nodes)
    return res


def g2_of(sc: Scenario, precision="default") -> float:
    return evaluate(sc, precision).g2hom_normalized


# --- sweeps -----------------------------------------------------------------


@dataclass(frozen=True)
class Axis:
    path: str
    min: float
    max: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.count < 2:
            raise ConfigError(f"axis {self.path}: count must be >= 2")
        if not self.min < self.max:
            raise ConfigError(f"axis {self.path}: min must be below max")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"axis {self.path}: scale must be linear or log")
        if self.scale == "log" and self.min <= 0:
            raise ConfigError(f"axis {self.path}: log scale needs min > 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class SweepSpec:
    base: Scenario = Scenario()
    axes: tuple = ()
    outputs: tuple = ("g2_pulsewise",)
    precision: str = "default"
    bin_width: float | None = None

    def __post_init__(self):
        if len(self.axes) > 2:
            raise ConfigError("at most two swept axes are supported")
        bad = set(self.outputs) - set(OBSERVABLES)
        if bad:
            raise ConfigError(f"unknown outputs {sorted(bad)}; choose from {OBSERVABLES}")
        if "binned_histogram" in self.outputs and not (self.bin_width and self.bin_width > 0):
            raise ConfigError("binned_histogram output needs a positive bin_width")
        get_precision(self.precision)

    def points(self):
        grids = [ax.values() for ax in self.axes]
        for index in itertools.product(*(range(len(g)) for g in grids)):
            params = {canonical_path(ax.path): float(g[i]) for ax, g, i in zip(self.axes, grids, index)}
            yield index, params


@dataclass
class RunRecord:
    """One evaluated sweep point; ``wall_time`` is excluded from comparisons."""

    index: tuple
    params: dict
    status: str = "ok"
    scalars: dict = field(default_factory=dict)
    curves: dict = field(default_factory=dict)
    reason: str = ""
    grid: dict = field(default_factory=dict)
    version: str = __version__
    wall_time: float = field(default=0.0, compare=False)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict:
        return {
            "index": list(self.index),
            "params": dict(self.params),
            "status": self.status,
            "scalars": dict(self.scalars),
            "curves": {k: {"x": list(v["x"]), "y": list(v["y"])} for k, v in self.curves.items()},
            "reason": self.reason,
            "grid": dict(self.grid),
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(
            index=tuple(d["index"]),
            params=dict(d["params"]),
            status=d["status"],
            scalars=dict(d["scalars"]),
            curves={k: {"x": list(v["x"]), "y": list(v["y"])} for k, v in d.get("curves", {}).items()},
            reason=d.get("reason", ""),
            grid=dict(d.get("grid", {})),
            version=d.get("version", ""),
        )


def _curve(x, y) -> dict:
    return {"x": [float(v) for v in x], "y": [float(v) for v in y]}


def evaluate_point(spec: SweepSpec, index: tuple, params: dict) -> RunRecord:
    """Evaluate one sweep point; failures are captured in the record."""
    start = time.perf_counter()
    try:
        sc = spec.base
        for path, value in params.items():
            sc = set_param(sc, path, value)
        res = evaluate(sc, spec.precision)
        scalars = res.scalars()
        if "breakdown" not in spec.outputs:
            scalars = {k: v for k, v in scalars.items() if not k.startswith("term_")}
        curves = {}
        if "g2_time_resolved" in spec.outputs or "binned_histogram" in spec.outputs:
            tau, vals = res.time_resolved()
            if "g2_time_resolved" in spec.outputs:
                curves["g2_time_resolved"] = _curve(tau, vals)
            if "binned_histogram" in spec.outputs:
                curves["binned_histogram"] = _curve(*bin_histogram(tau, vals, spec.bin_width))
        rec = RunRecord(index, params, "ok", scalars, curves, "", res.extras["grid"])
    except Exception as exc:  # recorded, never aborts the sweep
        rec = RunRecord(index, params, "failed", {}, {}, f"{type(exc).__name__}: {exc}")
    rec.wall_time = time.perf_counter() - start
    return rec


def _task(args):
    return evaluate_point(*args)


def run_sweep(spec: SweepSpec, jobs: int = 1, progress=None) -> list[RunRecord]:
    """Evaluate every grid point, ordered by axis indices (last axis fastest).

    ``jobs > 1`` distributes points over worker processes; the result list
    is the same for any worker count.
    """
    tasks = [(spec, idx, params) for idx, params in spec.points()]
    if jobs <= 1 or len(tasks) <= 1:
        out = []
        for t in tasks:
            out.append(_task(t))
            if progress:
                progress(len(out), len(tasks))
        return out
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        out = []
        for rec in pool.map(_task, tasks):
            out.append(rec)
            if progress:
                progress(len(out), len(tasks))
        return out


# --- thresholds ---------------------------------------------------------------

THRESHOLD_SPAN = {
    "gamma_ratio": (1.0, 12.0),
    "delta_omega": (0.0, 2.5),
    "delta_tau": (0.0, 2.5),
    "gamma_deph": (0.0, 3.0),
    "wander_fwhm": (0.0, 10.0),
}


def find_crossings(f, xs, target, rtol=1e-3, geometric=False):
    """Refine every sign change of ``f(x) - target`` over the scan ``xs``.

    Returns a list of ``(x, direction)`` with direction +1 where f rises
    through the target.  Bisection stops when the bracket is below ``rtol``
    relative to its upper end.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.array([f(x) for x in xs])
    below = ys < target
    out = []
    for i in np.nonzero(below[:-1] != below[1:])[0]:
        a, b = xs[i], xs[i + 1]
        a_below = bool(below[i])
        while abs(b - a) > rtol * max(abs(a), abs(b)):
            m = math.sqrt(a * b) if geometric else 0.5 * (a + b)
            if (f(m) < target) == a_below:
                a = m
            else:
                b = m
        out.append((math.sqrt(a * b) if geometric else 0.5 * (a + b), 1 if a_below else -1))
    return out, ys


def find_threshold(axis: str, target: float, scenario: Scenario | None = None, precision="default",
                   span=None, scan_points: int = 16, rtol: float = 1e-3) -> float:
    """Largest value along ``axis`` for which g2 stays below ``target``.

    A coarse scan brackets every crossing; each is refined by bisection and
    the largest upward crossing is returned.
    """
    if axis not in THRESHOLD_SPAN:
        raise ConfigError(f"unknown threshold axis {axis!r}; expected one of {tuple(THRESHOLD_SPAN)}")
    sc = scenario or Scenario()
    lo, hi = span or THRESHOLD_SPAN[axis]
    path = ALIASES[axis]

    def f(x):
        return g2_of(set_param(sc, path, x), precision)

    crossings, ys = find_crossings(f, np.linspace(lo, hi, scan_points), target, rtol)
    if ys[0] >= target:
        raise NoBracket(f"{axis}: g2 = {ys[0]:.4g} at {lo} already reaches the target {target}")
    if ys[-1] < target:
        raise NoBracket(f"{axis}: g2 is still below {target} at the end of the scan ({hi})")
    rising = [x for x, d in crossings if d > 0]
    if not rising:
        raise NoBracket(f"{axis}: target {target} not reached on [{lo}, {hi}]")
    return max(rising)
