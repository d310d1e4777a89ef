import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavityrqi.bogo import first_order
from cavityrqi.scenario import (Coast, Smooth, TravelScenario, UniformAccel, alpha_centauri,
                                building_block, building_block_first_order, compose,
                                identity_residuals, parse_scenario, phases, repeated_blocks,
                                smooth_first_order)
from cavityrqi.spectra import CavityConfig
from helpers import random_scenario

SCALAR = CavityConfig("scalar", 0.0, 1.0, 10)
DIRAC = CavityConfig("dirac", 0.0, 1.0, 6)


def test_single_block_is_one_way_coefficients_times_phase_differences():
    tau = 0.7
    c = compose(building_block(tau=tau), SCALAR)
    fo = first_order(SCALAR)
    g = np.exp(1j * np.pi * np.arange(1, 11) * tau)
    assert np.allclose(c.alpha1, fo.alpha1 * (g[:, None] - g[None, :]), atol=1e-15)
    assert np.allclose(c.beta1, fo.beta1 * (g[:, None] - g.conj()[None, :]), atol=1e-15)
    assert np.allclose(c.G0, g)


def test_negative_block_is_the_leftward_transformation():
    right = building_block_first_order(0.01, 0.7, DIRAC)
    left = building_block_first_order(-0.01, 0.7, DIRAC)
    assert np.allclose(left.A1, -right.A1)


def test_coasting_only_has_no_first_order():
    c = compose(TravelScenario([Coast(1.3)], 0.01), SCALAR)
    assert np.max(np.abs(c.alpha1)) == 0 and np.max(np.abs(c.beta1)) == 0
    assert np.allclose(c.G0, phases(SCALAR, 1.3))


def test_massless_building_block_is_periodic_and_vanishes_at_integer_u():
    for u in (0.0, 1.0, 2.0):
        c = compose(building_block(u=u), DIRAC)
        assert np.max(np.abs(c.A1)) < 1e-13
    a = compose(building_block(u=0.3), SCALAR)
    b = compose(building_block(u=1.3), SCALAR)
    assert np.allclose(a.beta1, b.beta1, atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_first_order_identities_hold_for_random_scenarios(seed):
    sc = random_scenario(np.random.default_rng(seed))
    assert identity_residuals(compose(sc, SCALAR)) < 1e-12
    assert identity_residuals(compose(sc, DIRAC)) < 1e-12


def test_composition_is_linear_in_the_segment_accelerations():
    sc = TravelScenario([UniformAccel(0.5, u=0.3), Coast(0.2), UniformAccel(-1.0, u=0.4)], 0.01)
    parts = [TravelScenario([UniformAccel(0.5, u=0.3), Coast(0.2), UniformAccel(0.0, u=0.4)], 0.01),
             TravelScenario([UniformAccel(0.0, u=0.3), Coast(0.2), UniformAccel(-1.0, u=0.4)], 0.01)]
    total = compose(sc, DIRAC).A1
    assert np.allclose(total, sum(compose(p, DIRAC).A1 for p in parts), atol=1e-15)


def test_sinusoidal_profile_closed_form_matches_quadrature():
    wc, T = 3.0, 2.0
    closed = smooth_first_order({"a0": 0.8, "omega_c": wc}, 0.0, T, SCALAR)
    quad = smooth_first_order(lambda t: 0.8 * math.sin(wc * t), 0.0, T, SCALAR)
    assert np.allclose(closed.beta1, quad.beta1, atol=1e-12)
    assert np.allclose(closed.alpha1, quad.alpha1, atol=1e-12)


def test_repeated_blocks_layout():
    sc = repeated_blocks(3, 0.4)
    kinds = [type(s).__name__ for s in sc.segments]
    assert kinds == ["UniformAccel", "Coast", "UniformAccel", "Coast", "UniformAccel"]
    assert sc.total_proper_time() == pytest.approx(3 * 0.4 + 2 * 0.4)


def test_text_scenario_round_trip():
    text = """
[[segment]]
type = "accel"
h = 0.02
duration_u = 0.25

[[segment]]
type = "coast"
duration_tau = 1.5

[[segment]]
type = "accel"
h = -0.01
duration_tau = 0.4

[[segment]]
type = "smooth"
duration_tau = 1.0
a0 = 0.01
omega_c = 2.0
"""
    sc = parse_scenario(text)
    assert sc.h == pytest.approx(0.02)
    assert sc.accelerations() == pytest.approx([0.02, -0.01])
    assert isinstance(sc.segments[3], Smooth) and sc.segments[3].a0 == pytest.approx(0.5)
    built = TravelScenario([UniformAccel(1.0, u=0.25), Coast(1.5), UniformAccel(-0.5, tau=0.4),
                            Smooth(1.0, a0=0.5, omega_c=2.0)], 0.02)
    assert np.allclose(compose(sc, SCALAR).beta1, compose(built, SCALAR).beta1)


@pytest.mark.parametrize("text", ["", "[[segment]]\ntype = 'jump'\n",
                                  "[[segment]]\ntype = 'smooth'\nprofile = 'gauss'\n"
                                  "duration_tau = 1.0\nomega_c = 1.0\n"])
def test_text_scenario_errors(text):
    with pytest.raises(ValueError):
        parse_scenario(text)


def test_segment_validation_and_guards():
    with pytest.raises(ValueError):
        UniformAccel(1.0, u=0.1, tau=0.2)
    with pytest.raises(ValueError):
        Coast(-1.0)
    with pytest.raises(ValueError):
        compose(TravelScenario([UniformAccel(3.0, u=0.1)], 0.9), SCALAR)
    c = compose(alpha_centauri(0.4, 0.5, h=0.5), SCALAR)
    assert c.meta["guards"]
