"""Shared generators for the test-suite."""

import numpy as np

from cavityrqi.scenario import Coast, TravelScenario, UniformAccel


def random_scenario(rng, h=0.01, max_segments=4):
    """Random mix of accelerated and coasting segments (at least one accelerated)."""
    segs = [UniformAccel(float(rng.uniform(-1, 1)), u=float(rng.uniform(0.05, 1.0)))]
    for _ in range(int(rng.integers(0, max_segments))):
        if rng.random() < 0.5:
            segs.append(Coast(float(rng.uniform(0.0, 2.0))))
        else:
            segs.append(UniformAccel(float(rng.uniform(-1, 1)), u=float(rng.uniform(0.05, 1.0))))
    rng.shuffle(segs)
    return TravelScenario(segs, h)


def random_density(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_charge_block_density(rng, n_modes, charges):
    """Random state with coherences only inside sectors of equal total charge."""
    charge = np.array([sum(q for q, b in zip(charges, np.binary_repr(i, n_modes)) if b == "1")
                       for i in range(2 ** n_modes)])
    rho = np.zeros((2 ** n_modes, 2 ** n_modes), dtype=complex)
    for q in np.unique(charge):
        idx = np.nonzero(charge == q)[0]
        rho[np.ix_(idx, idx)] = random_density(rng, len(idx)) * rng.uniform(0.5, 1.5)
    return rho / np.trace(rho)
