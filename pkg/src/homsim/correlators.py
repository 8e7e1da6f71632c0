"""Single-emitter two-time correlators via the quantum regression theorem.

For a seed time ``t`` the regression operator ``M(0) = f(rho(t))`` is evolved
with the same time-dependent generator from ``t`` to ``t + tau`` and the
correlator is read off as ``Tr[O M(tau)]``:

==========  ==================  ==================
quantity    seed                observable
==========  ==================  ==================
N(t+tau)    rho(t)              gamma * sigma_dag sigma
G1(t,tau)   rho(t) sigma_dag    gamma * sigma
G2(t,tau)   sigma rho sigma_dag gamma^2 * sigma_dag sigma
==========  ==================  ==================

Inside the pulse window the propagator is ``Phi(s, wa) Phi(t, wa)^-1`` from one
adaptive integration; outside it the closed-form free evolution is used, so
the drive envelope is always evaluated at absolute time ``t + tau``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import TimeGrid
from .tls import EE, EG, GE, GG, EmitterSpec, PulseSpec, free_propagator, window_propagators


@dataclass(frozen=True, eq=False)
class CorrelatorSet:
    """N(t), N(t+tau), G1(t,tau), G2(t,tau) of one emitter on a shared grid.

    Everything is expressed in the frame rotating at this emitter's laser
    frequency; ``frame_detuning`` records that laser's detuning.
    """

    emitter: EmitterSpec
    pulse: PulseSpec
    grid: TimeGrid
    n_of_t: np.ndarray
    n_shift: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    rtol: float

    @property
    def frame_detuning(self) -> float:
        return self.emitter.laser_detuning

    @property
    def photon_number(self) -> float:
        """Mean number of emitted photons, the time integral of N(t)."""
        return float(self.grid.t_weights @ self.n_of_t)


def _vec(rho_vecs, kind):
    """Seed operators for a batch of flattened density matrices."""
    out = np.zeros_like(rho_vecs)
    if kind == "g1":  # rho @ sigma_dag puts column e into column g
        out[:, GG] = rho_vecs[:, GE]
        out[:, EG] = rho_vecs[:, EE]
    elif kind == "g2":  # sigma rho sigma_dag = rho_ee |g><g|
        out[:, GG] = rho_vecs[:, EE]
    else:
        raise ValueError(kind)
    return out


class _Regression:
    """Propagator bookkeeping shared by all correlators of one emitter."""

    def __init__(self, emitter: EmitterSpec, pulse: PulseSpec, grid: TimeGrid, rtol: float):
        self.emitter, self.pulse, self.grid, self.rtol = emitter, pulse, grid, rtol
        t, tau = grid.t_points, grid.tau_points
        self.wa, self.wb = pulse.window
        wa, wb = self.wa, self.wb
        s = t[:, None] + tau[None, :]
        self.s = s
        need = np.concatenate([t[(t >= wa) & (t <= wb)], s[(s >= wa) & (s <= wb)], [wa, wb]])
        self.win_times = np.unique(need)
        self.win_phis = window_propagators(emitter, pulse, self.win_times, rtol)
        self.phi_wb = self._phi(np.array([wb]))[0]
        self.rho_wb = self.phi_wb[:, GG]  # Phi acting on |g><g|

    def _phi(self, times):
        idx = np.searchsorted(self.win_times, times)
        idx = np.clip(idx, 0, self.win_times.size - 1)
        if not np.allclose(self.win_times[idx], times, rtol=0, atol=1e-14 * max(1.0, abs(self.wb))):
            raise RuntimeError("window propagator requested at an unsampled time")
        return self.win_phis[idx]

    def rho_at(self, times) -> np.ndarray:
        """Flattened rho at arbitrary absolute times (shape ``times.shape + (4,)``)."""
        times = np.asarray(times, dtype=float)
        flat = times.ravel()
        out = np.zeros((flat.size, 4), dtype=complex)
        out[:, GG] = 1.0
        inside = (flat >= self.wa) & (flat <= self.wb)
        after = flat > self.wb
        if inside.any():
            out[inside] = self._phi(flat[inside])[:, :, GG]
        if after.any():
            out[after] = np.einsum("nab,b->na", free_propagator(self.emitter, flat[after] - self.wb), self.rho_wb)
        return out.reshape(times.shape + (4,))

    def regress(self, seeds: np.ndarray, component: int) -> np.ndarray:
        """``[Phi(t_i + tau_j, t_i) seed_i]_component`` on the full grid."""
        t, tau = self.grid.t_points, self.grid.tau_points
        out = np.zeros((t.size, tau.size), dtype=complex)
        active = np.any(seeds != 0, axis=1)

        post = active & (t >= self.wb)
        if post.any():
            f = free_propagator(self.emitter, tau)[:, component, :]  # (ntau, 4)
            out[post] = seeds[post] @ f.T

        for i in np.nonzero(active & (t < self.wb))[0]:
            if t[i] < self.wa:
                raise RuntimeError("non-zero regression seed before the pulse window")
            v = np.linalg.solve(self._phi(np.array([t[i]]))[0], seeds[i])
            s = self.s[i]
            inside = s <= self.wb
            if inside.any():
                out[i, inside] = self._phi(s[inside])[:, component, :] @ v
            if (~inside).any():
                u = self.phi_wb @ v
                f = free_propagator(self.emitter, s[~inside] - self.wb)[:, component, :]
                out[i, ~inside] = f @ u
        out[:, 0] = seeds[:, component]  # Phi(t, t) = 1 exactly
        return out


def _engine(emitter, pulse, grid, rtol):
    return _Regression(emitter, pulse, grid, rtol)


def compute_populations(emitter: EmitterSpec, pulse: PulseSpec, grid: TimeGrid, rtol: float = 1e-9):
    """``N(t) = gamma <sigma_dag sigma>(t)`` on ``grid.t_points``."""
    eng = _engine(emitter, pulse, grid, rtol)
    return emitter.gamma * eng.rho_at(grid.t_points)[:, EE].real


def compute_g1(emitter, pulse, grid, rtol=1e-9, _eng=None):
    eng = _eng or _engine(emitter, pulse, grid, rtol)
    seeds = _vec(eng.rho_at(grid.t_points), "g1")
    return emitter.gamma * eng.regress(seeds, EG)


def compute_g2(emitter, pulse, grid, rtol=1e-9, _eng=None):
    eng = _eng or _engine(emitter, pulse, grid, rtol)
    seeds = _vec(eng.rho_at(grid.t_points), "g2")
    return emitter.gamma**2 * eng.regress(seeds, EE).real


_CACHE: dict = {}
_CACHE_LIMIT = 64


def compute_correlators(
    emitter: EmitterSpec, pulse: PulseSpec, grid: TimeGrid, rtol: float = 1e-9, cache: bool = True
) -> CorrelatorSet:
    """All correlators of one emitter; results are memoised per process."""
    key = (emitter, pulse, grid.key, rtol)
    if cache and key in _CACHE:
        return _CACHE[key]
    eng = _engine(emitter, pulse, grid, rtol)
    rho_t = eng.rho_at(grid.t_points)
    n_of_t = emitter.gamma * rho_t[:, EE].real
    n_shift = emitter.gamma * eng.rho_at(eng.s)[..., EE].real
    g1 = compute_g1(emitter, pulse, grid, rtol, _eng=eng)
    g2 = compute_g2(emitter, pulse, grid, rtol, _eng=eng)
    for arr in (n_of_t, n_shift, g1, g2):
        arr.setflags(write=False)
    corr = CorrelatorSet(emitter, pulse, grid, n_of_t, n_shift, g1, g2, rtol)
    if cache:
        if len(_CACHE) >= _CACHE_LIMIT:
            _CACHE.pop(next(iter(_CACHE)))
        _CACHE[key] = corr
    return corr


def clear_cache() -> None:
    _CACHE.clear()


def extend_negative_tau(tau, positive, kind: str, partner=None):
    """Mirror a t-integrated tau-profile onto tau < 0.

    Uses G1(t,-tau) = G1(t-tau,tau)* and G2(t,-tau) = G2(t-tau,tau) -- after
    substituting s = t - tau the t-integral of the negative-lag value equals
    the positive-lag one (conjugated for first-order products).  For the
    intensity products ``kind="product"`` the profile of  N_a(t) N_b(t-tau)
    is the swapped profile ``partner`` of N_b(t) N_a(t+tau).

    Returns ``(tau_full, values_full)`` with tau ascending over both signs and
    the tau = 0 node appearing once.
    """
    tau = np.asarray(tau, dtype=float)
    positive = np.asarray(positive)
    if kind == "real":
        neg = positive
    elif kind == "conj":
        neg = np.conj(positive)
    elif kind == "product":
        if partner is None:
            raise ValueError("product profiles need their swapped partner")
        neg = np.asarray(partner)
    else:
        raise ValueError(f"unknown profile kind {kind!r}")
    tau_full = np.concatenate([-tau[:0:-1], tau])
    vals = np.concatenate([neg[:0:-1], positive])
    return tau_full, vals
