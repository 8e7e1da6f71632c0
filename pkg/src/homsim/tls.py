"""Driven, dissipative two-level emitter.

All matrices live in the ``{|g>, |e>}`` basis (index 0 = ground, 1 = excited).
Operators acting on density matrices are represented as 4x4 superoperators
acting on the row-major flattening ``vec(M)[2*a + b] = M[a, b]``, so that
``vec(A @ M @ B) = kron(A, B.T) @ vec(M)``.

Times and rates may be given in any consistent unit system; the rest of the
package works in units where the decay rate of emitter 1 is one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InconsistentTimescales, IntegrationFailure, InvalidState

SQRT_8LN2 = math.sqrt(8.0 * math.log(2.0))
#: Drive is treated as exactly zero outside ``center +/- PULSE_CUTOFF * sigma``.
PULSE_CUTOFF = 6.0

SIGMA = np.array([[0, 1], [0, 0]], dtype=complex)  # |g><e|
SIGMA_DAG = SIGMA.conj().T
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)  # |e><e| - |g><g|
NUMBER = SIGMA_DAG @ SIGMA
IDENTITY = np.eye(2, dtype=complex)

GROUND = np.array([[1, 0], [0, 0]], dtype=complex)
EXCITED = np.array([[0, 0], [0, 1]], dtype=complex)

# flat indices of the density-matrix entries
GG, GE, EG, EE = 0, 1, 2, 3


@dataclass(frozen=True)
class EmitterSpec:
    """Physical parameters of one emitter.

    ``laser_detuning`` is the detuning of the driving laser from the emitter
    transition, ``wander_fwhm`` the FWHM of its slow Gaussian frequency noise.
    """

    gamma: float
    gamma_deph: float = 0.0
    laser_detuning: float = 0.0
    wander_fwhm: float = 0.0
    label: str = ""

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.gamma_deph < 0:
            raise ValueError(f"gamma_deph must be non-negative, got {self.gamma_deph}")
        if self.wander_fwhm < 0:
            raise ValueError(f"wander_fwhm must be non-negative, got {self.wander_fwhm}")

    @property
    def coherence_rate(self) -> float:
        """Decay rate of the off-diagonal density-matrix elements."""
        return 0.5 * self.gamma + self.gamma_deph

    @property
    def wander_sigma(self) -> float:
        return self.wander_fwhm / SQRT_8LN2

    def with_(self, **changes) -> "EmitterSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class PulseSpec:
    """Gaussian drive pulse.

    ``fwhm`` is the full width at half maximum of the field envelope.  When
    ``center`` is omitted the pulse is placed at ``PULSE_CUTOFF * sigma`` so
    that its truncated support starts exactly at t = 0.
    """

    fwhm: float
    area: float = math.pi
    center: float | None = None

    def __post_init__(self):
        if not self.fwhm > 0:
            raise ValueError(f"pulse fwhm must be positive, got {self.fwhm}")
        if not self.area > 0:
            raise ValueError(f"pulse area must be positive, got {self.area}")

    @property
    def sigma(self) -> float:
        return self.fwhm / SQRT_8LN2

    @property
    def t0(self) -> float:
        return PULSE_CUTOFF * self.sigma if self.center is None else float(self.center)

    @property
    def window(self) -> tuple[float, float]:
        """Support of the truncated drive."""
        half = PULSE_CUTOFF * self.sigma
        return self.t0 - half, self.t0 + half

    def shifted(self, delay: float) -> "PulseSpec":
        return replace(self, center=self.t0 + delay)


def rabi_envelope(pulse: PulseSpec, t):
    """Rabi frequency of the area-calibrated Gaussian pulse at time(s) ``t``.

    Normalised so that the integral over all times equals ``pulse.area``.
    Zero outside the truncation window.
    """
    t = np.asarray(t, dtype=float)
    s = pulse.sigma
    x = (t - pulse.t0) / s
    out = pulse.area / (s * math.sqrt(2.0 * math.pi)) * np.exp(-0.5 * x * x)
    out = np.where(np.abs(x) <= PULSE_CUTOFF, out, 0.0)
    return out if out.ndim else float(out)


def build_hamiltonian(emitter: EmitterSpec, pulse: PulseSpec, t: float) -> np.ndarray:
    """H(t)/hbar in the frame rotating at the laser frequency (RWA)."""
    omega = rabi_envelope(pulse, t)
    return -emitter.laser_detuning * NUMBER + 0.5 * omega * (SIGMA + SIGMA_DAG)


def collapse_operators(emitter: EmitterSpec) -> list[np.ndarray]:
    ops = [math.sqrt(emitter.gamma) * SIGMA]
    if emitter.gamma_deph > 0:
        ops.append(math.sqrt(emitter.gamma_deph / 2.0) * SIGMA_Z)
    return ops


def commutator_super(h: np.ndarray) -> np.ndarray:
    """Superoperator of ``M -> -i [h, M]``."""
    return -1j * (np.kron(h, IDENTITY) - np.kron(IDENTITY, h.T))


def dissipator_super(ops) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    for c in ops:
        cdc = c.conj().T @ c
        out += np.kron(c, c.conj()) - 0.5 * np.kron(cdc, IDENTITY) - 0.5 * np.kron(IDENTITY, cdc.T)
    return out


def liouvillian_parts(emitter: EmitterSpec) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(L0, L1)`` with the generator ``L(t) = L0 + Omega(t) * L1``."""
    l0 = commutator_super(-emitter.laser_detuning * NUMBER) + dissipator_super(
        collapse_operators(emitter)
    )
    l1 = commutator_super(0.5 * (SIGMA + SIGMA_DAG))
    return l0, l1


def free_propagator(emitter: EmitterSpec, s) -> np.ndarray:
    """Closed-form ``exp(L0 * s)`` for the undriven emitter.

    Vectorised over ``s``; the result has shape ``np.shape(s) + (4, 4)``.
    """
    s = np.asarray(s, dtype=float)
    decay = np.exp(-emitter.gamma * s)
    coh = np.exp(-(emitter.coherence_rate + 1j * emitter.laser_detuning) * s)
    out = np.zeros(s.shape + (4, 4), dtype=complex)
    out[..., GG, GG] = 1.0
    out[..., GG, EE] = 1.0 - decay
    out[..., EE, EE] = decay
    out[..., GE, GE] = coh
    out[..., EG, EG] = coh.conj()
    return out


def check_density_matrix(rho, atol: float = 1e-8) -> np.ndarray:
    """Validate a 2x2 density matrix and return it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidState(f"density matrix must be 2x2, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise InvalidState("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > atol:
        raise InvalidState(f"trace {np.trace(rho).real:.12g} differs from 1")
    if np.linalg.eigvalsh(rho).min() < -atol:
        raise InvalidState("density matrix has negative eigenvalues")
    return rho


def window_propagators(emitter: EmitterSpec, pulse: PulseSpec, times, rtol: float = 1e-9) -> np.ndarray:
    """Propagators ``Phi(s, wa)`` from the pulse-window start to each time ``s``.

    ``times`` must lie inside the window ``[wa, wb]``.  A single adaptive
    DOP853 integration of the 4x4 matrix equation is performed; the step size
    is capped at a quarter of the pulse sigma so the drive is always resolved.
    Returns an array of shape ``(len(times), 4, 4)``.
    """
    times = np.asarray(times, dtype=float)
    wa, wb = pulse.window
    if times.size == 0:
        return np.zeros((0, 4, 4), dtype=complex)
    if times.min() < wa - 1e-12 * max(1.0, abs(wa)) or times.max() > wb + 1e-12 * max(1.0, abs(wb)):
        raise ValueError("window_propagators: times outside the pulse window")
    l0, l1 = liouvillian_parts(emitter)
    s, inv = np.unique(np.clip(times, wa, wb), return_inverse=True)

    def rhs(t, y):
        gen = l0 + rabi_envelope(pulse, t) * l1
        return (gen @ y.reshape(4, 4)).ravel()

    end = s[-1]
    if end <= wa:
        out = np.broadcast_to(np.eye(4, dtype=complex), (s.size, 4, 4)).copy()
        return out[inv]
    sol = solve_ivp(
        rhs,
        (wa, end),
        np.eye(4, dtype=complex).ravel(),
        method="DOP853",
        t_eval=s,
        rtol=rtol,
        atol=rtol * 1e-3,
        max_step=pulse.sigma / 4.0,
    )
    if sol.status != 0:
        raise IntegrationFailure(f"pulse-window integration failed: {sol.message}")
    phis = sol.y.T.reshape(-1, 4, 4)
    return phis[inv]


def propagate(
    rho0,
    t0: float,
    t1: float,
    emitter: EmitterSpec,
    pulse: PulseSpec,
    rtol: float = 1e-9,
) -> np.ndarray:
    """Evolve a density matrix from ``t0`` to ``t1`` under the Lindblad equation."""
    if t1 < t0:
        raise ValueError("propagate requires t1 >= t0")
    rho = check_density_matrix(rho0)
    return propagate_operator(rho, t0, t1, emitter, pulse, rtol)


def propagate_operator(m0, t0, t1, emitter, pulse, rtol=1e-9) -> np.ndarray:
    """Like :func:`propagate` but for an arbitrary 2x2 operator (no validation)."""
    vec = np.asarray(m0, dtype=complex).reshape(4)
    wa, wb = pulse.window
    t = t0
    # undriven stretch before the window
    a = min(max(t, wa), t1)
    if a > t:
        vec = free_propagator(emitter, a - t) @ vec
        t = a
    b = min(wb, t1)
    if b > t:
        phis = window_propagators(emitter, pulse, [t, b], rtol)
        vec = phis[1] @ np.linalg.solve(phis[0], vec)
        t = b
    if t1 > t:
        vec = free_propagator(emitter, t1 - t) @ vec
    return vec.reshape(2, 2)


def t1t2_to_rates(T1: float, T2: float) -> tuple[float, float]:
    """Convert lifetime and coherence time into ``(gamma, gamma_deph)``."""
    if not (T1 > 0 and T2 > 0):
        raise ValueError("T1 and T2 must be positive")
    if T2 > 2.0 * T1 * (1 + 1e-12):
        raise InconsistentTimescales(f"T2={T2} exceeds 2*T1={2 * T1}")
    return 1.0 / T1, max(1.0 / T2 - 0.5 / T1, 0.0)
