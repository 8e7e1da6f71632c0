import math

import numpy as np
import pytest
from conftest import correlator_pair
from scipy.integrate import quad
from scipy.signal import find_peaks

from homsim.correlators import compute_correlators
from homsim.errors import BeatsUnresolved, DegenerateDistribution
from homsim.grid import make_grid
from homsim.hom import HomConfig, assemble
from homsim.tls import SQRT_8LN2, EmitterSpec, PulseSpec
from homsim.wandering import WanderingModel, averaged_g2, beat_washing_curve, detuning_nodes, detuning_pdf


def avg(pair, dw, fwhm, nodes=41):
    if fwhm == 0:
        return assemble(*pair, HomConfig(delta_omega0=dw)).g2hom_normalized
    model = WanderingModel.from_fwhm(dw, 0.0, fwhm, nodes)
    return averaged_g2(*pair, HomConfig(), model).g2hom_normalized


def test_model_validation():
    with pytest.raises(ValueError):
        WanderingModel(0.0, -1.0)
    with pytest.raises(ValueError):
        WanderingModel(0.0, 1.0, node_count=4)
    with pytest.raises(ValueError):
        WanderingModel(0.0, 1.0, node_count=1)
    with pytest.raises(DegenerateDistribution):
        detuning_pdf(WanderingModel(1.0))
    with pytest.raises(DegenerateDistribution):
        detuning_nodes(WanderingModel(1.0))


def test_pdf_normalized_and_moments():
    m = WanderingModel(0.7, 0.4, 1.1)
    nodes, w = detuning_nodes(m)
    assert w.sum() == pytest.approx(1.0, abs=1e-10)
    assert w @ nodes == pytest.approx(0.7, abs=1e-12)
    assert w @ (nodes - 0.7) ** 2 == pytest.approx(0.4**2 + 1.1**2, rel=1e-12)
    val, _ = quad(detuning_pdf(m), -np.inf, np.inf, epsabs=1e-13)
    assert val == pytest.approx(1.0, abs=1e-10)
    assert m.node_count % 2 == 1 and np.any(np.isclose(nodes, 0.7, atol=1e-14))


def test_variance_addition():
    s = 0.8
    both = WanderingModel(0.0, s, s)
    one = WanderingModel(0.0, s)
    assert both.variance == pytest.approx(2 * s * s)
    assert both.fwhm == pytest.approx(math.sqrt(2) * one.fwhm)
    m = WanderingModel.from_fwhm(0.0, 3.0, 4.0)
    assert m.fwhm == pytest.approx(5.0)
    # one emitter still: the detuning distribution is the other's own, shifted
    shifted = WanderingModel(1.5, s)
    x = np.linspace(-3, 5, 41)
    own = np.exp(-0.5 * (x - 1.5) ** 2 / s**2) / (s * math.sqrt(2 * math.pi))
    assert np.allclose(detuning_pdf(shifted)(x), own, rtol=1e-14)
    assert m.sigma1 == pytest.approx(3.0 / SQRT_8LN2)


def test_zero_width_equals_plain(baseline_pair):
    r = averaged_g2(*baseline_pair, HomConfig(), WanderingModel(1.3))
    assert r.g2hom_normalized == assemble(*baseline_pair, HomConfig(delta_omega0=1.3)).g2hom_normalized


def test_linearity_bookkeeping(baseline_pair):
    r = averaged_g2(*baseline_pair, HomConfig(), WanderingModel.from_fwhm(0.5, 1.0, 2.0))
    x = r.extras
    assert r.g2hom_normalized == pytest.approx(x["weights"] @ x["node_g2"], abs=1e-12)
    direct = [assemble(*baseline_pair, HomConfig(delta_omega0=d)).g2hom_normalized for d in x["nodes"][::8]]
    assert np.allclose(direct, x["node_g2"][::8], atol=1e-12)


def test_wandering_reference_values(baseline_pair):
    assert avg(baseline_pair, 0.0, 1.0) == pytest.approx(0.07, abs=0.015)
    assert avg(baseline_pair, 0.0, 5.0) == pytest.approx(0.30, abs=0.03)


@pytest.mark.parametrize("fwhm", [1.0, 5.0, 10.0])
def test_quadrature_convergence_41_vs_81(baseline_pair, fwhm):
    assert abs(avg(baseline_pair, 0.0, fwhm, 41) - avg(baseline_pair, 0.0, fwhm, 81)) < 1e-4


def test_symmetric_improvement_and_linear_optimum(baseline_pair):
    ws = np.linspace(0.0, 12.0, 49)
    opts = {}
    for dw in (0.25, 0.5, 1.0, 2.0, 3.0, 4.0):
        ys = np.array([avg(baseline_pair, dw, w) for w in ws])
        opts[dw] = ws[int(np.argmin(ys))]
        if dw == 3.0:
            assert ys.min() < ys[0]
    assert opts[0.25] == 0.0 and opts[0.5] == 0.0
    big = [1.0, 2.0, 3.0, 4.0]
    y = np.array([opts[d] for d in big])
    slope, icpt = np.polyfit(big, y, 1)
    assert slope > 0
    assert np.max(np.abs(slope * np.array(big) + icpt - y)) < 0.25 * (y[-1] - y[0])


@pytest.fixture(scope="module")
def beat_pair():
    e = EmitterSpec(1.0)
    p = PulseSpec(0.026)
    g = make_grid([e], [p], "default", resolve_detuning=20.0)
    return compute_correlators(e, p, g), compute_correlators(e, p, g)


def _post_dip(tau, curve):
    keep = tau > 2 * math.pi / 20
    return tau[keep], curve[keep]


def test_beats_period_and_washing(beat_pair):
    tau, c0 = beat_washing_curve(*beat_pair, HomConfig(), WanderingModel(20.0))
    t, y = _post_dip(tau, c0)
    peaks, _ = find_peaks(y)
    spacing = np.median(np.diff(t[peaks]))
    assert spacing == pytest.approx(2 * math.pi / 20, rel=0.05)
    _, c200 = beat_washing_curve(*beat_pair, HomConfig(), WanderingModel.from_fwhm(20.0, 0.0, 200.0))
    t2, y2 = _post_dip(tau, c200)
    k = (t2 > 2 * math.pi / 20) & (t2 < 4)

    def amplitude(v):
        # oscillation about the local envelope, from the detrended signal
        trend = np.polyval(np.polyfit(t2[k], np.log(np.maximum(v[k], 1e-300)), 3), t2[k])
        return np.max(np.abs(v[k] - np.exp(trend)))

    assert amplitude(y2) < 0.05 * amplitude(y)
    assert len(find_peaks(y2)[0]) == 0


def test_beats_unresolved():
    e = EmitterSpec(1.0)
    c1, c2 = correlator_pair(e, e, PulseSpec(0.026), precision="fast")
    with pytest.raises(BeatsUnresolved):
        beat_washing_curve(c1, c2, HomConfig(), WanderingModel(20.0))


def test_averaging_preserves_integral(baseline_pair):
    r = averaged_g2(*baseline_pair, HomConfig(), WanderingModel.from_fwhm(0.0, 0.0, 3.0))
    tau, curve = r.time_resolved()
    total = float(np.sum(0.5 * (curve[1:] + curve[:-1]) * np.diff(tau)))
    assert total == pytest.approx(r.g2hom_pulsewise, rel=2e-3)
