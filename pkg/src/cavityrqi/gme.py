"""Witnesses of genuine tripartite entanglement in transformed vacua.

Both witnesses compare coherences of a three-mode density matrix with
geometric means of populations.  Every biseparable state gives a value
``<= 0``; a positive value detects genuine multipartite entanglement.

Bosonic modes ``(k, k', k'')`` are truncated at occupation 2 (index
``9 n_k + 3 n_k' + n_k''``) and the witness targets the coherence between
``|000>`` and ``|121>``.  Fermionic modes are mapped to three qubits
(index ``4 n_k + 2 n_k' + n_k''``) and the witness targets ``|000>``
against ``|101>`` and ``|011>``.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import fock_boson, fock_fermion


@dataclass
class WitnessReport:
    """Witness value (positive detects GME) and its leading perturbative term."""

    value: float
    leading: float
    modes: tuple
    parity: str


def _check_boson_parity(k, kp, kpp):
    if (k + kp) % 2 == 0 or (kp + kpp) % 2 == 0:
        raise ValueError("need (k + k') and (k' + k'') odd")


def bosonic_three_mode_reduction(c, k, kp, kpp, second=None):
    """Transformed bosonic vacuum reduced to ``(k, k', k'')``.

    Returns
    -------
    PerturbedState
        On dims ``(3, 3, 3)``; flagged ``first_order_only`` without
        second-order coefficients.
    """
    _check_boson_parity(k, kp, kpp)
    eng, s, psi = fock_boson.transformed_vacuum(c, [k, kp, kpp], second)
    slots = tuple(s.index(m) for m in (k, kp, kpp))
    rho = fock_boson._normalised(fock_boson._reduce(psi, slots, (3, 3, 3)),
                                 fock_boson._norm_series(psi))
    return fock_boson.PerturbedState(*rho, dims=(3, 3, 3),
                                     first_order_only=not s.has_second_order,
                                     labels=(k, kp, kpp))


def _qutrit(a, b, c):
    return 9 * a + 3 * b + c


def bosonic_witness_value(rho):
    """``2(|rho_{000,121}| - sum of three population geometric means)``."""
    rho = np.asarray(rho)
    p = np.real(np.diag(rho)).clip(min=0)
    coh = abs(rho[_qutrit(0, 0, 0), _qutrit(1, 2, 1)])
    pairs = [((1, 0, 0), (0, 2, 1)), ((0, 0, 1), (1, 2, 0)), ((0, 2, 0), (1, 0, 1))]
    bound = sum(math.sqrt(p[_qutrit(*x)] * p[_qutrit(*y)]) for x, y in pairs)
    return 2.0 * (coh - bound)


def bosonic_gme_witness(c, k, kp, kpp, h, second=None):
    """Evaluate the bosonic witness on the reduced vacuum at ``h``.

    ``leading`` is ``2 sqrt(2) h^2 |beta1_kk'| |beta1_k'k''|``.
    """
    st = bosonic_three_mode_reduction(c, k, kp, kpp, second)
    s = fock_boson._series(c, second)
    b1 = abs(s.beta1[s.index(k), s.index(kp)])
    b2 = abs(s.beta1[s.index(kp), s.index(kpp)])
    return WitnessReport(bosonic_witness_value(st.matrix(h)),
                         2 * math.sqrt(2) * h * h * b1 * b2, (k, kp, kpp), "odd-odd")


def fermionic_witness_value(rho):
    """Three-qubit witness for coherences ``|000><101|`` and ``|000><011|``.

    ``|r_{0,5}| + |r_{0,3}| - sqrt(r_0 (r_5 + r_3)) - sqrt(r_1 r_2) - sqrt(r_1 r_4)``
    with populations ``r_i`` and qubit order ``(k, k', k'')``.
    """
    rho = np.asarray(rho)
    p = np.real(np.diag(rho)).clip(min=0)
    return float(abs(rho[0, 5]) + abs(rho[0, 3]) - math.sqrt(p[0] * (p[5] + p[3]))
                 - math.sqrt(p[1] * p[2]) - math.sqrt(p[1] * p[4]))


def _check_fermion_modes(k, kp, kpp):
    if k < 0 or kp < 0 or kpp >= 0:
        raise ValueError("need two particle modes and one antiparticle mode")
    if (k + kp) % 2 or (k + kpp) % 2 == 0:
        raise ValueError("particle modes need equal parity, opposite to the antiparticle")


def fermionic_three_mode_reduction(c, k, kp, kpp, second=None):
    """Transformed fermionic vacuum on ``(k, k', k'')`` as three qubits.

    Raises
    ------
    fock_fermion.MappingInconsistentError
        If no consistent three-qubit sign convention exists.
    """
    _check_fermion_modes(k, kp, kpp)
    return fock_fermion.reduced_three_mode_vacuum(c, [k, kp, kpp], second)


def fermionic_gme_witness(c, k, kp, kpp, h, second=None):
    """Evaluate the fermionic witness at ``h``.

    ``leading`` is ``h (|A1_kk''| + |A1_k'k''| - sqrt(|A1_kk''|^2 + |A1_k'k''|^2))``.
    """
    st = fermionic_three_mode_reduction(c, k, kp, kpp, second)
    rho = st.matrix(h)
    if not fock_fermion.three_mode_map_search(rho).success:
        raise fock_fermion.MappingInconsistentError("no consistent three-qubit representation")
    s = fock_fermion._series(c, second)
    a = abs(s.A1[s.index(k), s.index(kpp)])
    b = abs(s.A1[s.index(kp), s.index(kpp)])
    return WitnessReport(fermionic_witness_value(rho), h * (a + b - math.hypot(a, b)),
                         (k, kp, kpp), "even-odd")


# --------------------------------------------------------------------------
# biseparable test states

def _random_pure(d, rng):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def biseparable_state(dims, rng, n_terms=4):
    """Random mixture of pure states that are products across a bipartition.

    Each term picks one of the three bipartitions at random.
    """
    total = int(np.prod(dims))
    rho = np.zeros((total, total), dtype=complex)
    weights = rng.dirichlet(np.ones(n_terms))
    for w in weights:
        cut = rng.integers(3)
        single = _random_pure(dims[cut], rng)
        rest = [m for m in range(3) if m != cut]
        pair = _random_pure(dims[rest[0]] * dims[rest[1]], rng).reshape(dims[rest[0]], dims[rest[1]])
        psi = np.einsum("a,bc->abc", single, pair)
        psi = np.moveaxis(psi, [0, 1, 2], [cut] + rest).reshape(total)
        rho += w * np.outer(psi, psi.conj())
    return rho


def biseparable_samples(dims, n=1000, seed=0):
    rng = np.random.default_rng(seed)
    return [biseparable_state(dims, rng) for _ in range(n)]
