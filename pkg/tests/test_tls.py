import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad, solve_ivp

from homsim.errors import InconsistentTimescales, InvalidState
from homsim.tls import (
    EXCITED, GROUND, IDENTITY, NUMBER, SIGMA, SIGMA_DAG, SIGMA_Z, EmitterSpec, PulseSpec,
    build_hamiltonian, check_density_matrix, collapse_operators, free_propagator, liouvillian_parts,
    propagate, rabi_envelope, t1t2_to_rates,
)


def lindblad_rhs_reference(emitter, pulse):
    """Straightforward matrix-form master equation, independent of the superoperators."""
    ops = collapse_operators(emitter)

    def rhs(t, y):
        rho = y.reshape(2, 2)
        h = build_hamiltonian(emitter, pulse, t)
        d = -1j * (h @ rho - rho @ h)
        for c in ops:
            cd = c.conj().T
            d += c @ rho @ cd - 0.5 * (cd @ c @ rho + rho @ cd @ c)
        return d.ravel()

    return rhs


def test_operator_basis():
    assert np.allclose(SIGMA @ SIGMA, 0)
    assert np.allclose(SIGMA_DAG @ SIGMA + SIGMA @ SIGMA_DAG, IDENTITY)
    assert np.allclose(SIGMA_Z, SIGMA_Z.conj().T)
    assert np.allclose(sorted(np.linalg.eigvalsh(SIGMA_Z)), [-1, 1])
    assert np.allclose(NUMBER, EXCITED)


def test_invalid_specs():
    with pytest.raises(ValueError):
        EmitterSpec(0.0)
    with pytest.raises(ValueError):
        EmitterSpec(1.0, gamma_deph=-1)
    with pytest.raises(ValueError):
        EmitterSpec(1.0, wander_fwhm=-1)
    with pytest.raises(ValueError):
        PulseSpec(0.0)
    with pytest.raises(ValueError):
        PulseSpec(1.0, area=0.0)


def test_pulse_sigma_from_fwhm():
    p = PulseSpec(0.3)
    assert p.sigma == pytest.approx(0.3 / math.sqrt(8 * math.log(2)), rel=1e-15)
    # the Gaussian envelope is at half maximum half a FWHM away from the centre
    peak = rabi_envelope(p, p.t0)
    assert rabi_envelope(p, p.t0 + 0.15) / peak == pytest.approx(0.5, rel=1e-12)
    assert peak == pytest.approx(math.pi / (p.sigma * math.sqrt(2 * math.pi)))


@pytest.mark.parametrize("area", [math.pi, 0.5, 2 * math.pi])
def test_pulse_area_calibration(area):
    p = PulseSpec(0.2, area=area)
    lo, hi = p.window
    val, _ = quad(lambda t: rabi_envelope(p, t), lo, hi, epsabs=1e-13, epsrel=1e-13, points=[p.t0])
    assert abs(val - area) < 1e-6


def test_hamiltonian_examples():
    e = EmitterSpec(1.0)
    far = PulseSpec(0.1, center=100.0)
    assert np.allclose(build_hamiltonian(e, far, 0.0), 0)
    p = PulseSpec(0.1)
    h = build_hamiltonian(e, p, p.t0)
    assert h[0, 1] == pytest.approx(rabi_envelope(p, p.t0) / 2)
    assert h[0, 1].imag == 0 and h[1, 0] == h[0, 1]


def test_hamiltonian_hermitian_random(rng):
    p = PulseSpec(0.4)
    for _ in range(100):
        e = EmitterSpec(1.0, laser_detuning=rng.normal(scale=3))
        h = build_hamiltonian(e, p, rng.uniform(*p.window))
        assert np.max(np.abs(h - h.conj().T)) == 0


def test_collapse_operators():
    ops = collapse_operators(EmitterSpec(1.0))
    assert len(ops) == 1 and np.allclose(ops[0], SIGMA)
    ops = collapse_operators(EmitterSpec(4.0, gamma_deph=2.0))
    assert np.allclose(ops[0], 2 * SIGMA) and np.allclose(ops[1], SIGMA_Z)


def test_free_decay_population():
    e = EmitterSpec(1.0)
    far = PulseSpec(0.1, center=-50.0)
    rho = propagate(EXCITED, 0.0, 1.0, e, far)
    assert rho[1, 1].real == pytest.approx(math.exp(-1), rel=1e-12)


def test_pi_pulse_inverts():
    e = EmitterSpec(1e-9)
    p = PulseSpec(0.1)
    rho = propagate(GROUND, 0.0, p.window[1], e, p)
    assert abs(rho[1, 1] - 1) < 1e-4


def test_pure_dephasing_coherence():
    # gamma must be positive; 1e-12 is indistinguishable from zero here
    e = EmitterSpec(1e-12, gamma_deph=1.0)
    plus = 0.5 * np.ones((2, 2))
    rho = propagate(plus, 0.0, 1.0, e, PulseSpec(0.1, center=-50.0))
    assert rho[0, 1] == pytest.approx(0.5 * math.exp(-1), rel=1e-9)


@given(gamma=st.floats(0.1, 5), deph=st.floats(0, 3), det=st.floats(-3, 3), s=st.floats(0, 10))
@settings(max_examples=60, deadline=None)
def test_free_propagator_matches_closed_form_solution(gamma, deph, det, s):
    e = EmitterSpec(gamma, gamma_deph=deph, laser_detuning=det)
    rho0 = np.array([[0.3, 0.2 - 0.1j], [0.2 + 0.1j, 0.7]])
    rho = (free_propagator(e, s) @ rho0.ravel()).reshape(2, 2)
    ee = 0.7 * math.exp(-gamma * s)
    # H = -det |e><e| rotates rho_ge as exp(-i det s)
    ge = (0.2 - 0.1j) * np.exp(-(gamma / 2 + deph) * s - 1j * det * s)
    assert rho[1, 1] == pytest.approx(ee, rel=1e-7, abs=1e-300)
    assert rho[0, 0] == pytest.approx(1 - ee, rel=1e-7)
    assert rho[0, 1] == pytest.approx(ge, rel=1e-7, abs=1e-300)
    # same generator as the superoperator form
    from scipy.linalg import expm
    assert np.allclose(free_propagator(e, s), expm(liouvillian_parts(e)[0] * s), atol=1e-10)


@given(gamma=st.floats(0.05, 3), deph=st.floats(0, 2), det=st.floats(-2, 2),
       fwhm=st.floats(0.02, 1.0), area=st.floats(0.5, 7))
@settings(max_examples=25, deadline=None)
def test_propagation_invariants_and_reference(gamma, deph, det, fwhm, area):
    e = EmitterSpec(gamma, gamma_deph=deph, laser_detuning=det)
    p = PulseSpec(fwhm, area=area)
    rhs = lindblad_rhs_reference(e, p)
    t_end = p.window[1] + 0.5
    ref = solve_ivp(rhs, (0, t_end), GROUND.ravel(), method="DOP853", rtol=1e-11, atol=1e-13,
                    max_step=p.sigma / 8, dense_output=True)
    for t in np.linspace(0, t_end, 9):
        rho = propagate(GROUND, 0.0, t, e, p)
        assert abs(np.trace(rho) - 1) < 1e-8
        assert np.max(np.abs(rho - rho.conj().T)) < 1e-8
        assert np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() > -1e-8
        assert np.allclose(rho.ravel(), ref.sol(t), atol=1e-7)


def test_invalid_state_rejected():
    with pytest.raises(InvalidState):
        check_density_matrix(np.eye(2))
    with pytest.raises(InvalidState):
        check_density_matrix(np.array([[1.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(InvalidState):
        check_density_matrix(np.array([[1.5, 0], [0, -0.5]]))
    with pytest.raises(ValueError):
        propagate(GROUND, 1.0, 0.0, EmitterSpec(1.0), PulseSpec(0.1))


def test_t1t2():
    assert t1t2_to_rates(1, 2) == (1, 0)
    assert t1t2_to_rates(1, 1) == (1, 0.5)
    with pytest.raises(InconsistentTimescales):
        t1t2_to_rates(1, 2.5)
