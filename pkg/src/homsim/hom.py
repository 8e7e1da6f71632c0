"""Assembly of the HOM cross-correlation from two emitters' correlators."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .correlators import CorrelatorSet, extend_negative_tau
from .errors import DelayOutOfRange, GridMismatch, ZeroNormalization
from .tls import PulseSpec

NORMALIZATIONS = ("none", "polarization", "intensity_product", "mean_intensity")


@dataclass(frozen=True)
class HomConfig:
    """Interference settings.

    ``delta_omega0`` is the detuning of emitter 2's transition from emitter
    1's, ``delta_tau`` the extra arrival delay of photon 2 and ``phi`` the
    relative linear-polarisation angle.
    """

    delta_omega0: float = 0.0
    delta_tau: float = 0.0
    phi: float = 0.0
    normalization: str = "polarization"

    def __post_init__(self):
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")

    @property
    def overlap(self) -> float:
        """cos^2(phi); only this combination enters the interference."""
        return math.cos(self.phi) ** 2


def delayed_pulses(pulse: PulseSpec, delta_tau: float) -> tuple[PulseSpec, PulseSpec]:
    """Pulse pair realising an arrival delay of photon 2 by ``delta_tau``.

    The earlier pulse keeps ``pulse.t0``; the other one is shifted later.
    """
    return pulse.shifted(max(0.0, -delta_tau)), pulse.shifted(max(0.0, delta_tau))


def filon_weights(tau: np.ndarray, omega) -> np.ndarray:
    """Weights ``w`` with ``sum w * f ~= int f(tau) exp(-i omega tau) dtau``.

    ``f`` is interpolated linearly between nodes and the oscillatory factor is
    integrated exactly, so accuracy does not depend on resolving ``omega``.
    For ``omega = 0`` these are the trapezoid weights.  Vectorised over
    ``omega`` (result shape ``np.shape(omega) + tau.shape``).
    """
    tau = np.asarray(tau, dtype=float)
    om = np.asarray(omega, dtype=float)[..., None]
    a, h = tau[:-1], np.diff(tau)
    theta = om * h
    small = np.abs(theta) < 1e-2
    th = np.where(small, 1.0, theta)
    e = np.exp(-1j * th)
    e0 = (1.0 - e) / (1j * th)
    e1 = (e * (1.0 + 1j * th) - 1.0) / (th * th)
    # series for small theta; the closed forms cancel catastrophically there
    x = -1j * theta
    s0 = 1 + x / 2 + x**2 / 6 + x**3 / 24 + x**4 / 120 + x**5 / 720
    s1 = 0.5 + x / 3 + x**2 / 8 + x**3 / 30 + x**4 / 144 + x**5 / 840
    e0 = np.where(small, s0, e0)
    e1 = np.where(small, s1, e1)
    base = h * np.exp(-1j * om * a)
    w = np.zeros(np.broadcast_shapes(om.shape[:-1], ()) + tau.shape, dtype=complex)
    w[..., :-1] += base * (e0 - e1)
    w[..., 1:] += base * e1
    return w


@dataclass(frozen=True, eq=False)
class HomResult:
    """Assembled HOM quantities.

    ``breakdown`` holds the pulse-integrated multi-photon (``autocorrelation``),
    ``intensity`` and ``interference`` terms; the pulse-wise value is a quarter
    of ``autocorrelation + intensity - interference``.
    """

    config: HomConfig
    tau: np.ndarray
    g2hom_t_tau: np.ndarray
    g2hom_tau: np.ndarray
    g2hom_pulsewise: float
    n_p: float
    n_1: float
    n_2: float
    g2hom_normalized: float
    breakdown: dict
    photon_numbers: tuple[float, float]
    profiles: dict = field(repr=False, default_factory=dict)
    extras: dict = field(repr=False, default_factory=dict)

    def time_resolved(self):
        return time_resolved(self)

    def scalars(self) -> dict:
        return {
            "g2_normalized": self.g2hom_normalized,
            "g2_pulsewise": self.g2hom_pulsewise,
            "n_p": self.n_p,
            "n_1": self.n_1,
            "n_2": self.n_2,
            "photon_number_1": self.photon_numbers[0],
            "photon_number_2": self.photon_numbers[1],
            "term_autocorrelation": self.breakdown["autocorrelation"],
            "term_intensity": self.breakdown["intensity"],
            "term_interference": self.breakdown["interference"],
        }


def intensity_normalizations(n1: float, n2: float) -> tuple[float, float]:
    """Intensity-product and mean-intensity normalisations from photon numbers."""
    return 0.25 * (n1 + n2) ** 2, 0.5 * (n1 * n1 + n2 * n2)


def _check_pair(corr1: CorrelatorSet, corr2: CorrelatorSet, cfg: HomConfig):
    if corr1.grid != corr2.grid:
        raise GridMismatch("correlator sets were computed on different grids")
    realised = corr2.pulse.t0 - corr1.pulse.t0
    scale = max(1.0, abs(cfg.delta_tau), corr1.pulse.sigma)
    if abs(realised - cfg.delta_tau) > 1e-9 * scale:
        raise GridMismatch(
            f"pulse centres realise a delay of {realised:.6g}, config asks for {cfg.delta_tau:.6g}"
        )
    grid = corr1.grid
    t_span = grid.t_points[-1] - grid.t_points[0]
    if abs(cfg.delta_tau) >= min(t_span, grid.tau_points[-1]):
        raise DelayOutOfRange(f"|delta_tau|={abs(cfg.delta_tau):.6g} exceeds the grid coverage")


def normalization_terms(corr1: CorrelatorSet, corr2: CorrelatorSet) -> tuple[float, float, float]:
    """``(N_p, N_1, N_2)``: cross-polarised, intensity-product, mean-intensity."""
    grid = corr1.grid
    if corr2.grid != grid:
        raise GridMismatch("correlator sets were computed on different grids")
    auto = 2.0 * (grid.t_weights @ (corr1.g2 + corr2.g2)) @ grid.tau_weights
    inten = _intensity_term(corr1, corr2)
    n_p = 0.5 * (auto + inten)
    if n_p < 1e-12:
        raise ZeroNormalization("both emitters are dark")
    n_1, n_2 = intensity_normalizations(corr1.photon_number, corr2.photon_number)
    return float(n_p), n_1, n_2


def _intensity_term(corr1: CorrelatorSet, corr2: CorrelatorSet) -> float:
    """Pulse-integrated ``N1(t)N2(t+tau) + N2(t)N1(t+tau)`` over the whole plane.

    The double integral factorises into ``2 <n1><n2>``.  Summing the sampled
    products instead would put the step of the later pulse (at the diagonal
    ``t + tau = t0_2``) between grid nodes whenever the photons are delayed.
    """
    return 2.0 * corr1.photon_number * corr2.photon_number


def _normalize(value, cfg, n_p, n_1, n_2):
    denom = {"none": 1.0, "polarization": n_p, "intensity_product": n_1, "mean_intensity": n_2}[
        cfg.normalization
    ]
    if denom < 1e-12:
        raise ZeroNormalization(f"{cfg.normalization} normalisation vanishes")
    return value / denom


def assemble(corr1: CorrelatorSet, corr2: CorrelatorSet, cfg: HomConfig | None = None) -> HomResult:
    """Combine two emitters' correlators into the HOM coincidence quantities.

    Negative lags are folded onto positive ones, so every tau-integral over
    the real line is twice the half-line integral.  The oscillatory
    interference integral uses :func:`filon_weights`.
    """
    cfg = cfg or HomConfig()
    _check_pair(corr1, corr2, cfg)
    grid = corr1.grid
    wt, wtau, tau = grid.t_weights, grid.tau_weights, grid.tau_points
    beat = cfg.delta_omega0 + corr2.frame_detuning - corr1.frame_detuning
    c2 = cfg.overlap

    auto_tt = corr1.g2 + corr2.g2
    inten_tt = corr1.n_of_t[:, None] * corr2.n_shift + corr2.n_of_t[:, None] * corr1.n_shift
    cross_tt = np.conj(corr1.g1) * corr2.g1
    phase = np.exp(-1j * beat * tau)
    g2hom_t_tau = 0.25 * (auto_tt + inten_tt - 2.0 * c2 * (cross_tt * phase).real)

    a_prof = wt @ auto_tt
    x_prof = wt @ inten_tt
    c_prof = wt @ cross_tt
    tau_curve = 0.25 * (a_prof + x_prof - 2.0 * c2 * (c_prof * phase).real)

    auto = float(2.0 * wtau @ a_prof)
    inten = _intensity_term(corr1, corr2)
    interf = float(4.0 * c2 * (filon_weights(tau, beat) @ c_prof).real)
    pulsewise = 0.25 * (auto + inten - interf)

    n_p = 0.5 * (auto + inten)
    if n_p < 1e-12:
        raise ZeroNormalization("both emitters are dark")
    n1, n2 = corr1.photon_number, corr2.photon_number
    n_1, n_2 = intensity_normalizations(n1, n2)
    normalized = _normalize(pulsewise, cfg, n_p, n_1, n_2)
    return HomResult(
        config=cfg,
        tau=tau,
        g2hom_t_tau=g2hom_t_tau,
        g2hom_tau=np.maximum(tau_curve, 0.0),
        g2hom_pulsewise=pulsewise,
        n_p=n_p,
        n_1=n_1,
        n_2=n_2,
        g2hom_normalized=max(normalized, 0.0),
        breakdown={
            "autocorrelation": auto,
            "intensity": inten,
            "interference": interf,
            "raw_normalized": normalized,
        },
        photon_numbers=(n1, n2),
        profiles={"auto": a_prof, "intensity": x_prof, "cross": c_prof, "beat": beat, "raw_tau": tau_curve},
    )


def time_resolved(result: HomResult):
    """``(tau, G2_HOM(tau))`` over both signs of the lag."""
    return extend_negative_tau(result.tau, result.g2hom_tau, "real")


def bin_histogram(tau, values, bin_width: float):
    """Integrate a sampled curve over consecutive bins centred on tau = 0.

    The curve is taken piecewise linear between samples and cut exactly at
    the bin edges, so the bins add up to the trapezoid integral of the input.
    Returns ``(centers, counts)``.
    """
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    tau = np.asarray(tau, dtype=float)
    values = np.asarray(values, dtype=float)
    lo = math.floor(tau[0] / bin_width + 0.5)
    hi = math.ceil(tau[-1] / bin_width - 0.5)
    centers = bin_width * np.arange(lo, hi + 1)
    edges = np.concatenate([centers - 0.5 * bin_width, [centers[-1] + 0.5 * bin_width]])
    edges = np.clip(edges, tau[0], tau[-1])
    x = np.union1d(tau, edges)
    y = np.interp(x, tau, values)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))])
    at_edges = np.interp(edges, x, cum)
    return centers, np.diff(at_edges)
