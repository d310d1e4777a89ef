import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavityrqi import gaussian as g
from cavityrqi.scenario import Coast, TravelScenario, building_block, compose
from cavityrqi.spectra import CavityConfig


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 2.0))
def test_two_mode_squeezed_state_closed_forms(r):
    t = g.tms(r)
    assert g.is_bona_fide(t) and g.is_pure(t, tol=1e-8)
    assert g.ppt_nu_minus(t) == pytest.approx(math.exp(-2 * r), rel=1e-9)
    assert g.teleport_fidelity(t) == pytest.approx(1 / (1 + math.exp(-2 * r)), rel=1e-12)
    c2, s2 = math.cosh(r) ** 2, math.sinh(r) ** 2
    assert g.eof(t) == pytest.approx(c2 * math.log(c2) - s2 * math.log(s2), rel=1e-9)
    lo, hi = g.fidelity_bounds(g.ppt_nu_minus(t))
    assert lo <= g.teleport_fidelity(t) <= hi + 1e-12


def test_product_states_are_separable():
    prod = g.direct_sum(g.squeezed(0.4), g.thermal(0.3))
    m = g.measures(prod)
    assert m["negativity"] < 1e-14 and m["log_negativity"] < 1e-14
    assert m["eof"] is None
    with pytest.raises(g.UnsupportedMeasureError):
        g.eof(prod)
    assert g.mean_occupation(g.thermal(0.3)) == pytest.approx(0.3)


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(-2, 2))
def test_elementary_maps_are_symplectic(theta, s):
    assert g.symplectic_residual(g.beam_splitter(theta)) < 1e-13
    assert g.symplectic_residual(g.rotation(theta)) < 1e-13
    sq = g.symplectic_from_bogo(np.array([[math.cosh(s)]]), np.array([[math.sinh(s)]]))
    assert g.symplectic_residual(sq) < 1e-12 * math.cosh(s) ** 2
    assert np.allclose(g.transform(sq, g.vacuum(1)), g.squeezed(-s)) or \
        np.allclose(g.transform(sq, g.vacuum(1)), g.squeezed(s))


def test_local_rotation_and_partial_trace():
    t = g.tms(0.5)
    rot = g.local_rotation(t, 1, 0.3)
    assert g.ppt_nu_minus(rot) == pytest.approx(g.ppt_nu_minus(t))
    assert np.allclose(g.partial_trace(t, [1]), math.cosh(1.0) * np.eye(2))
    best, _ = g.phase_optimised_fidelity(g.local_rotation(t, 1, 1.1))
    assert best == pytest.approx(g.teleport_fidelity(t), rel=1e-9)
    with pytest.raises(ValueError):
        g.transform(np.eye(2), t)


def test_static_resonance_free_motion():
    cfg = CavityConfig("scalar", 0.0, 1.0, 10)
    c = compose(TravelScenario([Coast(0.8)], 0.01), cfg)
    deg = g.tms_degradation(c, 2, 0.7)
    assert deg.nu0 == pytest.approx(math.exp(-1.4))
    assert deg.nu2 == 0 and deg.fidelity_opt[1] == 0
    S = g.symplectic_from_bogo(np.eye(10), None)
    out = g.tms_exact_pipeline(S, 1, 0.7)
    assert out["nu_minus"] == pytest.approx(math.exp(-1.4))
    assert out["fidelity"] == pytest.approx(1 / (1 + math.exp(-1.4)))


def test_first_order_squeezed_negativity_three_routes():
    c = compose(building_block(u=0.3), CavityConfig("scalar", 0.0, 1.0, 20))
    for sk, skp in ((0.0, 0.0), (1.0, 1.0), (0.5, -0.3)):
        closed = g.squeezed_generation_negativity(c, 1, 2, sk, skp)
        assert g.nu_minus_first_order(c, 1, 2, sk, skp) == pytest.approx(closed, rel=1e-8)
        assert g.squeezed_generation_local_invariant(c, 1, 2, sk, skp) == pytest.approx(closed,
                                                                                       rel=1e-8)
    assert g.squeezed_generation_negativity(c, 1, 2, 0, 0) == pytest.approx(abs(c.beta1[0, 1]))
    with pytest.raises(ValueError):
        g.squeezed_generation_negativity(c, 1, 3, 0, 0)
    with pytest.warns(g.GaussianValidityWarning):
        g.squeezed_generation_negativity(c, 1, 2, 3.0, 3.0, h=0.3)


def test_validity_guards_and_resonance_times():
    c = compose(building_block(u=0.3), CavityConfig("scalar", 0.0, 1.0, 20))
    with pytest.warns(g.GaussianValidityWarning):
        deg = g.tms_degradation(c, 1, 2.0, h=0.3)
    assert deg.warnings
    times = g.resonance_times(1, 2, CavityConfig("scalar"))
    assert times[0] == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        g.resonance_times(0, 1, CavityConfig("dirac"))


def test_circuit_estimate_arithmetic():
    est = g.circuit_estimate(a_c=2.0, L=1.0, c_eff=2.0, r=0.5, f_alpha=1.0, f_beta=0.5)
    assert est.h == pytest.approx(0.5)
    assert est.correction == pytest.approx(0.25 * (0.5 + math.tanh(1.0)))
    assert est.correction_tanh_r == pytest.approx(0.25 * (0.5 + math.tanh(0.5)))
    with pytest.raises(ValueError):
        g.circuit_estimate(1.0, 1.0, 1.0, 0.5)
