import numpy as np
import pytest

from homsim.grid import PRECISION, TimeGrid, get_precision, make_grid, trapezoid_weights
from homsim.tls import EmitterSpec, PulseSpec


def test_trapezoid_weights_integrate_constants():
    x = np.sort(np.random.default_rng(1).uniform(0, 7, 50))
    w = trapezoid_weights(x)
    assert np.all(w > 0)
    assert w.sum() == pytest.approx(x[-1] - x[0], rel=1e-12)


@pytest.mark.parametrize("prec", sorted(PRECISION))
def test_grid_invariants(prec):
    e1, e2 = EmitterSpec(1.0), EmitterSpec(3.0)
    pulses = [PulseSpec(0.05), PulseSpec(0.05).shifted(1.0)]
    g = make_grid([e1, e2], pulses, prec)
    for axis, w in ((g.t_points, g.t_weights), (g.tau_points, g.tau_weights)):
        assert np.all(np.diff(axis) > 0)
        assert np.all(w > 0)
        assert w.sum() == pytest.approx(axis[-1] - axis[0], rel=1e-12)
    assert g.tau_points[0] == 0
    # both pulse windows are inside the grid and sampled densely
    for p in pulses:
        lo, hi = p.window
        assert g.t_points[0] <= lo and g.t_points[-1] >= hi
        inside = g.t_points[(g.t_points >= lo) & (g.t_points <= hi)]
        assert np.max(np.diff(inside)) <= get_precision(prec).pulse_step * p.sigma * (1 + 1e-9)
    # slowest lifetime covered n_life times
    assert g.t_points[-1] >= pulses[-1].window[1] + get_precision(prec).n_life - 1e-9


def test_detuning_resolution():
    e, p = EmitterSpec(1.0), PulseSpec(0.05)
    g = make_grid([e], [p], "default", resolve_detuning=20.0)
    core = g.tau_points[(g.tau_points > p.window[1] - p.window[0]) & (g.tau_points < 3)]
    assert np.max(np.diff(core)) <= (2 * np.pi / 20) / 10


def test_grid_key_and_invalid():
    a = TimeGrid.uniform(2.0, 1.0, 0.1)
    b = TimeGrid.uniform(2.0, 1.0, 0.1)
    assert a == b and a.key == b.key and hash(a) == hash(b)
    assert a != TimeGrid.uniform(2.0, 1.0, 0.05)
    with pytest.raises(ValueError):
        TimeGrid(np.array([0.0, 1.0, 0.5]), np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        TimeGrid(np.array([0.0, 1.0]), np.array([0.1, 1.0]))
    with pytest.raises(ValueError):
        get_precision("ultra")
