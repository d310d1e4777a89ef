import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavityrqi.spectra import (AccelerationRangeError, CavityConfig, InvalidModeError,
                               dirac_frequency, dirac_momenta, dirac_rindler_frequency,
                               frequencies, log_ratio, scalar_frequency,
                               scalar_rindler_frequency, wall_positions)


def test_massless_dirac_momenta_are_half_integer_multiples_of_pi():
    cfg = CavityConfig("dirac", 0.0, 1.0, 5)
    k = dirac_momenta(cfg)
    assert np.allclose(k, (np.arange(-5, 5) + 0.5) * np.pi, rtol=0, atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 200.0))
def test_massive_roots_solve_the_boundary_condition(M):
    cfg = CavityConfig("dirac", M, 1.0, 6)
    labels = np.arange(6)
    x = dirac_momenta(cfg, labels)
    assert np.all(x > (labels + 0.5) * np.pi) and np.all(x < (labels + 1) * np.pi)
    assert np.allclose(np.tan(x) / x, -1.0 / M, rtol=1e-8, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 50.0), st.integers(0, 20))
def test_mirror_relation_between_particle_and_antiparticle_branches(M, n):
    cfg = CavityConfig("dirac", M, 1.0, 25)
    k = dirac_momenta(cfg, [n, -n - 1])
    assert k[1] == pytest.approx(-k[0], rel=1e-15)
    w = dirac_frequency(k, cfg)
    assert w[1] == pytest.approx(-w[0], rel=1e-15)


def test_scalar_frequencies_and_transverse_mass():
    cfg = CavityConfig("scalar", 3.0, 2.0, 4, transverse=(2.0,))
    assert cfg.mass == pytest.approx(5.0)
    assert scalar_frequency(2, cfg) == pytest.approx(math.sqrt(25 + 4 * math.pi ** 2) / 2.0)
    assert len(frequencies(cfg)) == 4


def test_window_labels_and_indices():
    s = CavityConfig("scalar", n_max=4)
    d = CavityConfig("dirac", n_max=3)
    assert list(s.labels()) == [1, 2, 3, 4]
    assert list(d.labels()) == [-3, -2, -1, 0, 1, 2]
    assert [d.index(m) for m in d.labels()] == list(range(6))
    assert d.with_window(5).n_max == 5
    with pytest.raises(InvalidModeError):
        s.index(0)
    with pytest.raises(InvalidModeError):
        d.index(3)
    with pytest.raises(InvalidModeError):
        scalar_frequency(0, s)


@pytest.mark.parametrize("bad", [dict(field_kind="vector"), dict(M=-1.0), dict(L=0.0),
                                 dict(n_max=1)])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        CavityConfig(**bad)


@pytest.mark.parametrize("h", [0.0, 2.0, -2.5])
def test_acceleration_range(h):
    with pytest.raises(AccelerationRangeError):
        wall_positions(h)


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-4, 1.99))
def test_wall_positions_and_log_ratio(h):
    chi_l, chi_r = wall_positions(h)
    assert chi_r - chi_l == pytest.approx(1.0)
    assert log_ratio(h) == pytest.approx(math.log(chi_r / chi_l), rel=1e-12)


def test_rindler_frequencies_reduce_to_inertial_ones():
    h = 1e-6
    big, proper = scalar_rindler_frequency(np.arange(1, 4), h)
    assert np.allclose(proper, np.pi * np.arange(1, 4), rtol=1e-10)
    assert np.allclose(h * dirac_rindler_frequency(np.arange(3), h),
                       (np.arange(3) + 0.5) * np.pi, rtol=1e-10)
