"""Averaging over slow Gaussian spectral wandering of the two emitters."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .correlators import CorrelatorSet
from .errors import BeatsUnresolved, DegenerateDistribution
from .hom import HomConfig, HomResult, _normalize, assemble, filon_weights
from .tls import SQRT_8LN2


@dataclass(frozen=True)
class WanderingModel:
    center_detuning: float
    sigma1: float = 0.0
    sigma2: float = 0.0
    node_count: int = 41

    def __post_init__(self):
        if self.sigma1 < 0 or self.sigma2 < 0:
            raise ValueError("wandering widths must be non-negative")
        if self.node_count < 3 or self.node_count % 2 == 0:
            raise ValueError("node_count must be odd and >= 3")

    @classmethod
    def from_fwhm(cls, center_detuning, fwhm1=0.0, fwhm2=0.0, node_count=41):
        return cls(center_detuning, fwhm1 / SQRT_8LN2, fwhm2 / SQRT_8LN2, node_count)

    @property
    def variance(self) -> float:
        return self.sigma1**2 + self.sigma2**2

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    @property
    def fwhm(self) -> float:
        """Width of the detuning distribution; FWHMs add in quadrature."""
        return SQRT_8LN2 * self.sigma

    @property
    def degenerate(self) -> bool:
        return self.variance == 0.0


def detuning_pdf(model: WanderingModel):
    """Density of the detuning between the two emitters' transitions."""
    if model.degenerate:
        raise DegenerateDistribution("both wandering widths are zero")
    var, mu = model.variance, model.center_detuning

    def pdf(x):
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * (x - mu) ** 2 / var) / math.sqrt(2.0 * math.pi * var)

    return pdf


def detuning_nodes(model: WanderingModel) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite nodes and probability weights (summing to one)."""
    if model.degenerate:
        raise DegenerateDistribution("both wandering widths are zero")
    x, w = np.polynomial.hermite.hermgauss(model.node_count)
    nodes = model.center_detuning + math.sqrt(2.0) * model.sigma * x
    weights = w / math.sqrt(math.pi)
    return nodes, weights


def _averaged_curve(base: HomResult, model: WanderingModel) -> np.ndarray:
    prof = base.profiles
    tau = base.tau
    c2 = base.config.overlap
    # exact Gaussian average of the beat phase factor
    envelope = np.exp(-1j * prof["beat"] * tau - 0.5 * model.variance * tau**2)
    return 0.25 * (prof["auto"] + prof["intensity"] - 2.0 * c2 * (prof["cross"] * envelope).real)


def averaged_g2(
    corr1: CorrelatorSet, corr2: CorrelatorSet, cfg: HomConfig, model: WanderingModel
) -> HomResult:
    """HOM quantities averaged over the detuning distribution.

    The pulse-wise value is the Gauss-Hermite weighted mean of the per-node
    values; only the interference integral is re-evaluated per node.  The
    time-resolved curve uses the closed-form Gaussian average of the phase
    factor, which stays exact at lags where a finite node set would alias.
    """
    cfg = replace(cfg, delta_omega0=model.center_detuning)
    base = assemble(corr1, corr2, cfg)
    if model.degenerate:
        return base
    nodes, weights = detuning_nodes(model)
    offset = corr2.frame_detuning - corr1.frame_detuning
    cross = base.profiles["cross"]
    interf = 4.0 * cfg.overlap * (filon_weights(base.tau, nodes + offset) @ cross).real
    auto, inten = base.breakdown["autocorrelation"], base.breakdown["intensity"]
    pulsewise_k = 0.25 * (auto + inten - interf)
    norm_k = np.array([_normalize(v, cfg, base.n_p, base.n_1, base.n_2) for v in pulsewise_k])
    pulsewise = float(weights @ pulsewise_k)
    normalized = float(weights @ norm_k)
    curve = _averaged_curve(base, model)
    # 2-D map: average of the interference phase applied row-wise
    envelope = np.exp(-1j * base.profiles["beat"] * base.tau - 0.5 * model.variance * base.tau**2)
    cross_tt = np.conj(corr1.g1) * corr2.g1
    g2hom_t_tau = 0.25 * (
        corr1.g2 + corr2.g2
        + corr1.n_of_t[:, None] * corr2.n_shift
        + corr2.n_of_t[:, None] * corr1.n_shift
        - 2.0 * cfg.overlap * (cross_tt * envelope).real
    )
    return HomResult(
        config=cfg,
        tau=base.tau,
        g2hom_t_tau=g2hom_t_tau,
        g2hom_tau=np.maximum(curve, 0.0),
        g2hom_pulsewise=pulsewise,
        n_p=base.n_p,
        n_1=base.n_1,
        n_2=base.n_2,
        g2hom_normalized=max(normalized, 0.0),
        breakdown={
            "autocorrelation": auto,
            "intensity": inten,
            "interference": float(weights @ interf),
            "raw_normalized": normalized,
        },
        photon_numbers=base.photon_numbers,
        profiles=dict(base.profiles, raw_tau=curve),
        extras={"nodes": nodes, "weights": weights, "node_g2": norm_k, "model": model},
    )


def beat_washing_curve(corr1: CorrelatorSet, corr2: CorrelatorSet, cfg: HomConfig, model: WanderingModel):
    """Wandering-averaged time-resolved HOM curve, ``(tau, values)`` over both signs."""
    if model.center_detuning:
        period = 2.0 * math.pi / abs(model.center_detuning)
        if corr1.grid.tau_spacing > period / 10.0:
            raise BeatsUnresolved(
                f"tau spacing {corr1.grid.tau_spacing:.4g} exceeds a tenth of the beat period {period:.4g}"
            )
    res = averaged_g2(corr1, corr2, cfg, model) if not model.degenerate else assemble(
        corr1, corr2, replace(cfg, delta_omega0=model.center_detuning)
    )
    return res.time_resolved()
