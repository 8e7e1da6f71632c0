"""Closed-form HOM results for ideal, instantaneously excited emitters.

Each photon is an exponential wavepacket: emitter ``i`` is excited at its
arrival time and ``G1_ii(t, tau) = gamma_i exp(-gamma_i t) exp(-(gamma_i/2 +
gamma_d,i) tau)``.  With one photon per pulse and no re-excitation the
multi-photon term vanishes, the intensity term equals two, and

    g2 = 1/2 - T * Gamma / (Gamma^2 + dw^2),

with ``Gamma = (gamma1 + gamma2)/2 + gamma_d12`` and the temporal overlap
``T = gamma1 gamma2 / (gamma1 + gamma2) * exp(-gamma_late |dtau|)``, where
``gamma_late`` is the rate of the emitter whose photon is *not* delayed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from .errors import NoBracket
from .tls import SQRT_8LN2

AXES = ("gamma_ratio", "delta_omega", "delta_tau", "gamma_deph", "wander_fwhm")
_SCAN_RANGE = {
    "gamma_ratio": (1.0, 60.0),
    "delta_omega": (0.0, 20.0),
    "delta_tau": (0.0, 20.0),
    "gamma_deph": (0.0, 200.0),
    "wander_fwhm": (0.0, 60.0),
}


@dataclass(frozen=True)
class IdealParams:
    gamma1: float = 1.0
    gamma2: float = 1.0
    delta_omega: float = 0.0
    delta_tau: float = 0.0
    gamma_deph_total: float = 0.0

    def __post_init__(self):
        if not (self.gamma1 > 0 and self.gamma2 > 0):
            raise ValueError("decay rates must be positive")
        if self.gamma_deph_total < 0:
            raise ValueError("dephasing rate must be non-negative")


def temporal_overlap(p: IdealParams) -> float:
    g1, g2 = p.gamma1, p.gamma2
    # delayed photon 2: overlap decays with emitter 1's rate, and vice versa
    rate = g1 if p.delta_tau >= 0 else g2
    return g1 * g2 / (g1 + g2) * math.exp(-rate * abs(p.delta_tau))


def ideal_g2hom(p: IdealParams) -> float:
    big = 0.5 * (p.gamma1 + p.gamma2) + p.gamma_deph_total
    return 0.5 - temporal_overlap(p) * big / (big * big + p.delta_omega**2)


def _g1_ideal(gamma, coh, t, tau, start):
    """G1(t, tau) of an exponential wavepacket emitted from ``start``, tau of any sign."""
    later = t + tau
    if t < start or later < start:
        return 0.0
    first = min(t, later)
    return gamma * math.exp(-gamma * (first - start)) * math.exp(-coh * abs(tau))


def ideal_g2hom_bruteforce(p: IdealParams, epsabs: float = 1e-13, epsrel: float = 1e-11) -> float:
    """The same quantity by direct 2-D quadrature of the interference integrand.

    Lags of both signs are integrated explicitly (G1(t,-tau) is the conjugate
    of G1(t-tau, tau)); the t-integral starts at the later arrival time.
    """
    coh1 = 0.5 * p.gamma1 + p.gamma_deph_total
    coh2 = 0.5 * p.gamma2
    s1, s2 = max(0.0, -p.delta_tau), max(0.0, p.delta_tau)
    dw = p.delta_omega

    def integrand(tau, t):
        g1 = _g1_ideal(p.gamma1, coh1, t, tau, s1)
        g2 = _g1_ideal(p.gamma2, coh2, t, tau, s2)
        # both factors are real in the resonant frame; the beat phase is e^{-i dw tau}
        return 2.0 * g1 * g2 * math.cos(dw * tau)

    t0 = max(s1, s2)
    slow = min(p.gamma1, p.gamma2)
    t_hi = t0 + 60.0 / slow
    total = 0.0
    # split the lag axis at the kink tau = 0 and where the earlier photon starts
    for lo, hi in ((-np.inf, 0.0), (0.0, np.inf)):
        val, _ = integrate.dblquad(
            integrand, t0, t_hi, lambda t, lo=lo: lo if np.isfinite(lo) else -(t - t0),
            lambda t, hi=hi: hi if np.isfinite(hi) else 60.0 / slow, epsabs=epsabs, epsrel=epsrel,
        )
        total += val
    intensity = 2.0
    return 0.25 * (intensity - total)


def _averaged_over_wandering(p: IdealParams, fwhm: float, nodes: int = 81) -> float:
    if fwhm == 0:
        return ideal_g2hom(p)
    sigma = fwhm / SQRT_8LN2
    x, w = np.polynomial.hermite.hermgauss(nodes)
    vals = [ideal_g2hom(replace(p, delta_omega=p.delta_omega + math.sqrt(2.0) * sigma * xi)) for xi in x]
    return float(np.dot(w, vals) / math.sqrt(math.pi))


def ideal_on_axis(axis: str, value: float, base: IdealParams | None = None) -> float:
    base = base or IdealParams()
    if axis == "gamma_ratio":
        return ideal_g2hom(replace(base, gamma2=base.gamma1 * value))
    if axis == "delta_omega":
        return ideal_g2hom(replace(base, delta_omega=value))
    if axis == "delta_tau":
        return ideal_g2hom(replace(base, delta_tau=value))
    if axis == "gamma_deph":
        return ideal_g2hom(replace(base, gamma_deph_total=value))
    if axis == "wander_fwhm":
        return _averaged_over_wandering(base, value)
    raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")


def ideal_threshold(axis: str, target: float, base: IdealParams | None = None) -> float:
    """Largest mismatch on ``axis`` keeping the ideal g2 below ``target``."""
    if not 0 < target < 0.5:
        raise ValueError("target must lie in (0, 0.5)")
    lo, hi = _SCAN_RANGE[axis]
    xs = np.linspace(lo, hi, 400)
    ys = np.array([ideal_on_axis(axis, x, base) for x in xs])
    below = ys < target
    if not below[0]:
        raise NoBracket(f"{axis}: ideal value at the origin already exceeds {target}")
    idx = np.nonzero(below[:-1] & ~below[1:])[0]
    if idx.size == 0:
        raise NoBracket(f"{axis}: target {target} not reached on [{lo}, {hi}]")
    a, b = xs[idx[-1]], xs[idx[-1] + 1]
    for _ in range(200):
        m = 0.5 * (a + b)
        if ideal_on_axis(axis, m, base) < target:
            a = m
        else:
            b = m
        if b - a < 1e-13 * max(1.0, b):
            break
    return float(0.5 * (a + b))
