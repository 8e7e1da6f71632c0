import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from homsim.errors import NoBracket
from homsim.oracle import AXES, IdealParams, ideal_g2hom, ideal_g2hom_bruteforce, ideal_on_axis, ideal_threshold


def test_examples():
    assert ideal_g2hom(IdealParams()) == 0.0
    for dw, want in ((0.5, 0.1), (0.8, 0.195), (1.2, 0.295)):
        assert ideal_g2hom(IdealParams(delta_omega=dw)) == pytest.approx(want, abs=5e-4)
    assert ideal_g2hom(IdealParams(delta_tau=3.0)) == pytest.approx((1 - math.exp(-3)) / 2, rel=1e-14)
    assert ideal_g2hom(IdealParams(delta_tau=3.0)) == pytest.approx(0.475, abs=1e-3)


def test_invalid_params():
    with pytest.raises(ValueError):
        IdealParams(gamma2=0.0)
    with pytest.raises(ValueError):
        IdealParams(gamma_deph_total=-0.1)
    with pytest.raises(ValueError):
        ideal_on_axis("bogus", 1.0)
    with pytest.raises(ValueError):
        ideal_threshold("delta_omega", 0.6)


@pytest.mark.slow
def test_closed_form_matches_bruteforce_1000_draws():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        p = IdealParams(
            gamma1=rng.uniform(0.2, 5.0),
            gamma2=rng.uniform(0.2, 5.0),
            delta_omega=rng.uniform(-4.0, 4.0),
            delta_tau=rng.uniform(-3.0, 3.0),
            gamma_deph_total=rng.uniform(0.0, 3.0),
        )
        worst = max(worst, abs(ideal_g2hom(p) - ideal_g2hom_bruteforce(p)))
    assert worst < 1e-9


@given(x=st.floats(0, 6), step=st.floats(1e-3, 1), field=st.sampled_from(
    ["delta_omega", "delta_tau", "gamma_deph_total"]))
@settings(max_examples=300, deadline=None)
def test_monotone_in_each_mismatch(x, step, field):
    # one mismatch at a time, everything else ideal
    a = ideal_g2hom(IdealParams(**{field: x}))
    b = ideal_g2hom(IdealParams(**{field: x + step}))
    assert 0.0 <= a <= b <= 0.5


@given(r=st.floats(0.2, 8), dw=st.floats(0, 4), dt=st.floats(-3, 3), gd=st.floats(0, 3))
@settings(max_examples=100, deadline=None)
def test_range_and_detuning_sign(r, dw, dt, gd):
    v = ideal_g2hom(IdealParams(1.0, r, dw, dt, gd))
    assert 0.0 <= v <= 0.5
    assert ideal_g2hom(IdealParams(1.0, r, -dw, dt, gd)) == v


@pytest.mark.parametrize("dw", [0.5, 1.0, 2.0, 3.0])
def test_optimal_ratio_exceeds_one(dw):
    res = minimize_scalar(lambda lr: ideal_g2hom(IdealParams(1.0, math.exp(lr), dw)),
                          bounds=(-3, 3), method="bounded", options={"xatol": 1e-8})
    assert math.exp(res.x) > 1.0


def test_thresholds():
    assert ideal_threshold("delta_omega", 0.1) == pytest.approx(0.5, rel=1e-9)
    assert ideal_threshold("delta_tau", 0.3) == pytest.approx(1.0, rel=0.15)
    assert ideal_threshold("gamma_ratio", 1e-6) == pytest.approx(1.0, abs=1e-2)
    for axis in AXES:
        x = ideal_threshold(axis, 0.2)
        assert ideal_on_axis(axis, x) == pytest.approx(0.2, abs=1e-9)
    with pytest.raises(NoBracket):
        ideal_threshold("delta_omega", 0.1, IdealParams(delta_omega=0.0, delta_tau=2.0))
