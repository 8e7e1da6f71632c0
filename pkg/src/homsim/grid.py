"""Discretisation of the (t, tau) plane and precision profiles."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .tls import EmitterSpec, PulseSpec


@dataclass(frozen=True)
class PrecisionProfile:
    name: str
    pulse_step: float  # dense step across a pulse, in units of its sigma
    rate_step: float  # post-pulse step, in units of 1/gamma_max
    growth: float  # geometric stretch factor per step once the fast scales are gone
    cap_step: float  # largest step, in units of 1/gamma_min
    n_life: float  # lifetimes of the slowest emitter covered after the pulse
    rtol: float
    gh_nodes: int


PRECISION = {
    "fast": PrecisionProfile("fast", 1 / 4, 0.1, 0.06, 0.1, 10.0, 1e-7, 31),
    "default": PrecisionProfile("default", 1 / 8, 0.025, 0.02, 0.025, 12.0, 1e-9, 41),
    "high": PrecisionProfile("high", 1 / 16, 0.0125, 0.01, 0.0125, 14.0, 1e-10, 61),
}


def get_precision(precision) -> PrecisionProfile:
    if isinstance(precision, PrecisionProfile):
        return precision
    try:
        return PRECISION[precision]
    except KeyError:
        raise ValueError(f"unknown precision profile {precision!r}") from None


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    w = np.zeros_like(x)
    if x.size < 2:
        return w
    dx = np.diff(x)
    w[:-1] += 0.5 * dx
    w[1:] += 0.5 * dx
    return w


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Shared quadrature grid; ``tau_points[0]`` is always 0."""

    t_points: np.ndarray
    tau_points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.ascontiguousarray(self.t_points, dtype=float)
        tau = np.ascontiguousarray(self.tau_points, dtype=float)
        if t.ndim != 1 or tau.ndim != 1 or t.size < 2 or tau.size < 2:
            raise ValueError("grid axes must be 1-D with at least two points")
        if np.any(np.diff(t) <= 0) or np.any(np.diff(tau) <= 0):
            raise ValueError("grid axes must be strictly increasing")
        if tau[0] != 0.0:
            raise ValueError("tau axis must start at 0")
        t.setflags(write=False)
        tau.setflags(write=False)
        object.__setattr__(self, "t_points", t)
        object.__setattr__(self, "tau_points", tau)
        wt, wtau = trapezoid_weights(t), trapezoid_weights(tau)
        wt.setflags(write=False)
        wtau.setflags(write=False)
        object.__setattr__(self, "t_weights", wt)
        object.__setattr__(self, "tau_weights", wtau)
        digest = hashlib.sha1(t.tobytes() + b"|" + tau.tobytes()).hexdigest()
        object.__setattr__(self, "key", digest)

    def __eq__(self, other):
        return isinstance(other, TimeGrid) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def shape(self) -> tuple[int, int]:
        return self.t_points.size, self.tau_points.size

    @property
    def tau_spacing(self) -> float:
        """Largest tau step inside the uniformly spaced core."""
        return float(self.meta.get("tau_core_step", np.max(np.diff(self.tau_points))))

    @classmethod
    def uniform(cls, t_max: float, tau_max: float, step: float, t_start: float = 0.0) -> "TimeGrid":
        nt = int(round((t_max - t_start) / step)) + 1
        ntau = int(round(tau_max / step)) + 1
        return cls(
            t_start + step * np.arange(nt),
            step * np.arange(ntau),
            {"layout": "uniform", "step": step, "tau_core_step": step},
        )


def _stretched_axis(start, stop, dense, h_fast, core, growth, h_cap):
    """Build an axis: fixed-step inside ``dense`` intervals, ``h_fast`` for
    ``core`` after each of them, geometric growth capped at ``h_cap`` later."""
    pts = [start]
    x = start
    dense = sorted(dense)
    last_dense_end = start
    h_geo = h_fast
    k = 0
    eps = 1e-12 * max(1.0, abs(stop))
    while x < stop - eps:
        while k < len(dense) and dense[k][1] <= x + eps:
            k += 1
        if k < len(dense) and dense[k][0] <= x + eps:
            a, b, h = dense[k]
            n = max(1, int(np.ceil((b - x) / h - 1e-9)))
            pts.extend(x + (b - x) * np.arange(1, n + 1) / n)
            x = b
            last_dense_end = b
            h_geo = h_fast
            k += 1
            continue
        if x - last_dense_end < core:
            h = h_fast
        else:
            h_geo = min(h_cap, h_geo * (1.0 + growth))
            h = h_geo
        nxt = x + h
        if k < len(dense) and nxt > dense[k][0] - 0.25 * h:
            nxt = dense[k][0]
        if nxt > stop - 0.25 * h:
            nxt = stop
        pts.append(nxt)
        x = nxt
    return np.array(pts)


def _merge(intervals):
    out = []
    for a, b, h in sorted(intervals):
        if out and a <= out[-1][1]:
            pa, pb, ph = out[-1]
            out[-1] = (pa, max(pb, b), min(ph, h))
        else:
            out.append((a, b, h))
    return out


def make_grid(
    emitters: list[EmitterSpec],
    pulses: list[PulseSpec],
    precision="default",
    resolve_detuning: float = 0.0,
) -> TimeGrid:
    """Grid covering every pulse window and ``n_life`` slow lifetimes after.

    Dense sampling across each pulse, a uniform core resolving the fastest
    emitter (and quantum beats at ``resolve_detuning`` when non-zero), then a
    geometric stretch.
    """
    prof = get_precision(precision)
    gammas = [e.gamma for e in emitters]
    g_max, g_min = max(gammas), min(gammas)
    windows = [p.window for p in pulses]
    start = min(w[0] for w in windows)
    last = max(w[1] for w in windows)
    h_fast = prof.rate_step / g_max
    h_cap = max(prof.cap_step / g_min, h_fast)
    dense = _merge([(w[0], w[1], prof.pulse_step * p.sigma) for w, p in zip(windows, pulses)])

    t_stop = last + prof.n_life / g_min
    t = _stretched_axis(start, t_stop, dense, h_fast, prof.n_life / g_max, prof.growth, h_cap)

    tau_fast = h_fast
    if resolve_detuning:
        tau_fast = min(tau_fast, 1.0 / (10.0 * abs(resolve_detuning)))
    pulse_len = max(w[1] - w[0] for w in windows)
    h_dense = prof.pulse_step * min(p.sigma for p in pulses)
    tau_core = prof.n_life * 2.0 / sum(sorted(gammas)[-2:]) if len(gammas) > 1 else prof.n_life / g_max
    tau_stop = (last - start) + prof.n_life / g_min
    tau = _stretched_axis(0.0, tau_stop, [(0.0, pulse_len, h_dense)], tau_fast, tau_core, prof.growth,
                          max(h_cap, tau_fast))
    meta = {
        "layout": "stretched",
        "precision": prof.name,
        "tau_core_step": tau_fast,
        "t_count": int(t.size),
        "tau_count": int(tau.size),
        "t_max": float(t[-1]),
        "tau_max": float(tau[-1]),
        "rtol": prof.rtol,
    }
    return TimeGrid(t, tau, meta)
