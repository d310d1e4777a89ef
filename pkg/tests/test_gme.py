import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavityrqi import gme
from cavityrqi.scenario import building_block, compose
from cavityrqi.spectra import CavityConfig

BB = building_block(u=0.3, h=0.01)


def _ket(dim, amps):
    v = np.zeros(dim, dtype=complex)
    for i, a in amps.items():
        v[i] = a
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def test_witnesses_detect_their_target_states():
    rho = _ket(27, {0: 1, 9 * 1 + 3 * 2 + 1: 1})
    assert gme.bosonic_witness_value(rho) == pytest.approx(1.0)
    rho = _ket(8, {0: 1, 5: 1, 3: 1})
    assert gme.fermionic_witness_value(rho) == pytest.approx(2 / 3 - math.sqrt(2) / 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_biseparable_states_never_violate(seed):
    rng = np.random.default_rng(seed)
    assert gme.bosonic_witness_value(gme.biseparable_state((3, 3, 3), rng)) <= 1e-12
    assert gme.fermionic_witness_value(gme.biseparable_state((2, 2, 2), rng)) <= 1e-12


def test_biseparable_samples_are_states():
    for rho in gme.biseparable_samples((2, 2, 2), n=5, seed=3):
        assert np.trace(rho) == pytest.approx(1.0)
        assert np.min(np.linalg.eigvalsh(rho)) > -1e-12


def test_bosonic_witness_on_transformed_vacuum():
    c = compose(BB, CavityConfig("scalar", 0.0, 1.0, 12))
    reps = [gme.bosonic_gme_witness(c, 1, 2, 3, h) for h in (1e-2, 1e-3)]
    for rep in reps:
        assert rep.value > 0
        assert rep.value == pytest.approx(rep.leading, rel=1e-6)
    assert reps[0].leading / reps[1].leading == pytest.approx(100.0)
    with pytest.raises(ValueError):
        gme.bosonic_gme_witness(c, 1, 3, 2, 1e-2)


def test_fermionic_witness_on_transformed_vacuum():
    c = compose(BB, CavityConfig("dirac", 0.0, 1.0, 8))
    rep = gme.fermionic_gme_witness(c, 0, 4, -3, 1e-3)
    assert rep.value > 0
    assert rep.value == pytest.approx(rep.leading, rel=1e-2)
    # particle modes of different parity, then a missing antiparticle mode
    for bad in ((0, 1, -2), (0, 2, 3)):
        with pytest.raises(ValueError):
            gme.fermionic_gme_witness(c, *bad, 1e-3)
