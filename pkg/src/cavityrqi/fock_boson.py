"""Bosonic Fock-space consequences of a perturbative Bogoliubov transformation.

The Bogoliubov transformation ``phi^_m = sum_n (alpha_mn phi_n + beta_mn phi_n^*)``
maps the inertial vacuum onto the squeezed state
``N exp(1/2 sum_pq V_pq a^dag_p a^dag_q) |0^>`` with ``V = -beta^* alpha^-1``.
This module provides the expansion of ``V``, the noise sums ``f``, and
reduced two-mode states of transformed vacua, single-particle states and
Bell states, together with their negativities.

Reduced states are produced by a sparse Fock-space engine.  States are
dictionaries from occupation patterns to power series truncated at second
order.  Only the components that can reach the reduced density matrix at
second order are kept: the zero-order state has no excitations outside the
two selected modes, so every second-order component with excitations in the
environment drops out of the partial trace.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bogo import hs_closed_form_massless, hs_large_mass_limit, hs_sum
from .spectra import SCALAR
from .states import PerturbedState, SeriesValue


class SecondOrderUnavailable(ValueError):
    """Raised when a quantity needs second-order Bogoliubov coefficients."""


class TailWarning(UserWarning):
    """A window sum has not converged to the requested precision."""


@dataclass
class BosonSeries:
    """Bogoliubov coefficients ``alpha = G0 + h alpha1 + h^2 alpha2`` and
    ``beta = h beta1 + h^2 beta2`` on a scalar mode window.

    ``alpha2`` and ``beta2`` are optional; they come from the numeric
    channel of the exact engine.
    """

    G0: np.ndarray
    alpha1: np.ndarray
    beta1: np.ndarray
    labels: np.ndarray
    alpha2: np.ndarray = None
    beta2: np.ndarray = None

    @classmethod
    def from_composed(cls, c, second=None):
        """Build from a :class:`~cavityrqi.scenario.ComposedFirstOrder`.

        ``second`` may be a :class:`~cavityrqi.exact.SeriesEstimate` (or any
        object with a ``second`` tuple ``(alpha2, beta2)``) on the same window.
        """
        if c.kind != SCALAR:
            raise ValueError("bosonic quantities need a scalar-field transformation")
        a2 = b2 = None
        if second is not None:
            a2, b2 = second.second if hasattr(second, "second") else second
            n = len(c.G0)
            a2, b2 = np.asarray(a2)[:n, :n], np.asarray(b2)[:n, :n]
        return cls(np.asarray(c.G0), c.alpha1, c.beta1, c.cfg.labels(), a2, b2)

    @property
    def has_second_order(self):
        return self.alpha2 is not None and self.beta2 is not None

    def index(self, label):
        hits = np.nonzero(self.labels == label)[0]
        if not len(hits):
            raise IndexError(f"mode {label} outside the window")
        return int(hits[0])


def _series(c, second=None):
    if isinstance(c, BosonSeries):
        return c
    return BosonSeries.from_composed(c, second)


# --------------------------------------------------------------------------
# V matrix and noise sums

@dataclass
class VMatrix:
    """``V = h V1 + h^2 V2`` of the transformed vacuum.

    ``V2_partial`` is set when ``V2`` only contains the part built from
    first-order coefficients.
    """

    V1: np.ndarray
    V2: np.ndarray = None
    V2_partial: bool = False


def v_matrix(c, second=None, allow_partial=False):
    """Expansion of ``V = -beta^* alpha^-1``.

    ``V1_pq = -G0*_q beta1*_pq`` and
    ``V2_pq = G0*_p G0*_q sum_m beta1*_mp alpha1_mq - G0*_q beta2*_pq``.

    Parameters
    ----------
    c : ComposedFirstOrder or BosonSeries
    second : SeriesEstimate, optional
        Numeric second-order coefficients.
    allow_partial : bool
        Without ``beta2`` return the first-order part of ``V2`` and flag it.

    Raises
    ------
    SecondOrderUnavailable
        When ``beta2`` is missing and ``allow_partial`` is false.
    """
    s = _series(c, second)
    gc = s.G0.conj()
    V1 = -s.beta1.conj() * gc[None, :]
    analytic = gc[:, None] * gc[None, :] * (s.beta1.conj().T @ s.alpha1)
    if s.beta2 is None:
        if not allow_partial:
            raise SecondOrderUnavailable("V2 needs second-order beta coefficients")
        return VMatrix(V1, analytic, True)
    return VMatrix(V1, analytic - s.beta2.conj() * gc[None, :], False)


@dataclass
class FSums:
    """Noise sums of the first-order coefficients for the pair ``(k, k')``.

    ``f_beta[(m, n)]`` is ``1/2 sum_{i != n} |beta1_mi|^2``; the key
    ``(m, None)`` holds the unrestricted sum.  ``f_alpha`` likewise with
    ``alpha1``.  ``g_bb`` is ``sum_p beta1_pk beta1*_pk'`` and ``g_ab`` is
    ``sum_{p != k'} alpha1_pk beta1*_pk``.
    """

    k: int
    kp: int
    f_beta: dict
    f_alpha: dict
    g_bb: complex
    g_ab: complex
    converged: bool = True

    def fb(self, m, n=None):
        return self.f_beta[(m, n)]

    def fa(self, m, n=None):
        return self.f_alpha[(m, n)]


def _half_sum(row, exclude=None, rel=1e-8, name=""):
    terms = np.abs(row) ** 2
    total = 0.5 * np.sum(terms)
    if exclude is not None:
        total -= 0.5 * terms[exclude]
    ok = not (terms[-1] > rel * max(total, 1e-300) and total > 0)
    return float(total), ok


def f_sums(c, k, kp, rel=1e-8):
    """Noise sums ``f^beta``, ``f^alpha`` and cross sums for modes ``k, k'``.

    A :class:`TailWarning` is emitted when the last window term exceeds
    ``rel`` times the running sum.
    """
    s = _series(c)
    i, j = s.index(k), s.index(kp)
    fb, fa = {}, {}
    ok = True
    for m, im in ((k, i), (kp, j)):
        for n, jn in ((k, i), (kp, j), (None, None)):
            fb[(m, n)], o1 = _half_sum(s.beta1[im], jn, rel)
            fa[(m, n)], o2 = _half_sum(s.alpha1[im], jn, rel)
            ok = ok and o1 and o2
    if not ok:
        warnings.warn(f"noise sums for ({k}, {kp}) not converged on the window",
                      TailWarning, stacklevel=2)
    g_bb = complex(np.sum(s.beta1[:, i] * s.beta1[:, j].conj()))
    mask = np.ones(len(s.labels), bool)
    mask[j] = False
    g_ab = complex(np.sum(s.alpha1[mask, i] * s.beta1[mask, i].conj()))
    return FSums(k, kp, fb, fa, g_bb, g_ab, ok)


def hs_diagnostics(cfg, s_max=None):
    """Hilbert-Schmidt sum of one-way particle creation with reference values.

    Returns
    -------
    dict
        ``value``, ``tail``, ``tail_error``, the massless closed form when
        ``M = 0`` (``closed_form``) and the large-mass limit of ``M^2`` times
        the sum (``large_mass_limit``).
    """
    out = hs_sum(cfg, s_max)
    out["kind"] = cfg.field_kind
    out["M"] = cfg.mass
    out["closed_form"] = hs_closed_form_massless(cfg.field_kind) if cfg.mass == 0 else None
    out["large_mass_limit"] = hs_large_mass_limit(cfg.field_kind)
    out["M2_times_value"] = cfg.mass ** 2 * out["value"]
    return out


# --------------------------------------------------------------------------
# sparse perturbative Fock engine

def _count(key, i):
    for idx, n in key:
        if idx == i:
            return n
    return 0


def _shift(key, i, d):
    occ = dict(key)
    n = occ.get(i, 0) + d
    if n:
        occ[i] = n
    else:
        occ.pop(i, None)
    return tuple(sorted(occ.items()))


class _Engine:
    """Series-valued Fock states restricted by the keep rule."""

    def __init__(self, keep):
        self.keep = frozenset(keep)

    def env_empty(self, key):
        return all(i in self.keep for i, _ in key)

    def add(self, state, key, order, amp):
        if order > 2 or amp == 0:
            return
        if order == 2 and not self.env_empty(key):
            return
        vec = state.get(key)
        if vec is None:
            vec = state[key] = np.zeros(3, dtype=complex)
        vec[order] += amp

    def apply_linear(self, state, cre, ann):
        """Apply ``sum_o h^o sum_i (cre[o][i] a^dag_i + ann[o][i] a_i)``."""
        out = {}
        for key, vec in state.items():
            for o_st in range(3):
                if vec[o_st] == 0:
                    continue
                for o_op in range(3 - o_st):
                    for i, coef in cre[o_op]:
                        n = _count(key, i)
                        self.add(out, _shift(key, i, 1), o_st + o_op,
                                 vec[o_st] * coef * math.sqrt(n + 1))
                    for i, coef in ann[o_op]:
                        n = _count(key, i)
                        if n:
                            self.add(out, _shift(key, i, -1), o_st + o_op,
                                     vec[o_st] * coef * math.sqrt(n))
        return out

    def apply_pairs(self, state, V, order, modes, factor=0.5):
        """Apply ``factor * sum_{p,q in modes} V_pq a^dag_p a^dag_q`` at ``order``."""
        out = {}
        modes = list(modes)
        for key, vec in state.items():
            for o_st in range(3 - order):
                if vec[o_st] == 0:
                    continue
                for a, p in enumerate(modes):
                    for q in modes[a:]:
                        coef = factor * (V[p, q] + V[q, p]) if p != q else factor * V[p, p]
                        if coef == 0:
                            continue
                        k1 = _shift(key, q, 1)
                        amp = math.sqrt(_count(key, q) + 1)
                        amp *= math.sqrt(_count(k1, p) + 1)
                        self.add(out, _shift(k1, p, 1), o_st + order, vec[o_st] * coef * amp)
        return out


def _merge(*states):
    out = {}
    for st in states:
        for key, vec in st.items():
            if key in out:
                out[key] = out[key] + vec
            else:
                out[key] = vec.copy()
    return out


def _scale(state, z):
    return {k: v * z for k, v in state.items()}


def _vacuum_state(eng, V1, V2, n):
    """``exp(1/2 a^dag V a^dag)|0>`` to second order (unnormalised)."""
    vac = {(): np.array([1, 0, 0], dtype=complex)}
    first = eng.apply_pairs(vac, V1, 1, range(n))
    # kept slots beyond the field window (Alice's mode) are not squeezed
    kept = [i for i in sorted(eng.keep) if i < n]
    second = eng.apply_pairs(vac, V2, 2, kept) if V2 is not None else {}
    kept_first = {k: v for k, v in first.items() if eng.env_empty(k)}
    twice = eng.apply_pairs(kept_first, V1, 1, kept)
    return _merge(vac, first, second, _scale(twice, 0.5))


def _creation_map(s, col):
    """Series of ``a^dag_col`` in terms of the transformed operators.

    ``a^dag_m = sum_n (alpha*_nm a^_dag_n + beta_nm a^_n)``.
    """
    def nz(vec):
        return [(i, complex(v)) for i, v in enumerate(vec) if v != 0]

    cre = [[(col, complex(np.conj(s.G0[col])))], nz(s.alpha1[:, col].conj()),
           nz(s.alpha2[:, col].conj()) if s.alpha2 is not None else []]
    ann = [[], nz(s.beta1[:, col]), nz(s.beta2[:, col]) if s.beta2 is not None else []]
    return cre, ann


def _norm_series(state):
    n = np.zeros(3)
    for vec in state.values():
        n[0] += abs(vec[0]) ** 2
        n[1] += 2 * np.real(np.conj(vec[0]) * vec[1])
        n[2] += abs(vec[1]) ** 2 + 2 * np.real(np.conj(vec[0]) * vec[2])
    return n


def _reduce(state, slots, dims):
    """Reduced density matrix series on the modes ``slots``.

    ``slots`` lists storage indices; ``dims`` the truncation of each.
    """
    size = int(np.prod(dims))
    groups = {}
    for key, vec in state.items():
        occ = dict(key)
        local = [occ.pop(i, 0) for i in slots]
        if any(n >= d for n, d in zip(local, dims)):
            continue
        idx = int(np.ravel_multi_index(local, dims))
        env = tuple(sorted(occ.items()))
        groups.setdefault(env, []).append((idx, vec))
    rho = np.zeros((3, size, size), dtype=complex)
    for items in groups.values():
        idx = np.array([i for i, _ in items])
        vecs = np.array([v for _, v in items])
        for o1 in range(3):
            for o2 in range(3 - o1):
                rho[o1 + o2][np.ix_(idx, idx)] += np.outer(vecs[:, o1], vecs[:, o2].conj())
    return rho


def _normalised(rho, nser):
    n0, n1, n2 = nser
    inv = np.array([1.0 / n0, -n1 / n0 ** 2, (n1 ** 2 / n0 - n2) / n0 ** 2])
    return [sum(inv[a] * rho[o - a] for a in range(o + 1)) for o in range(3)]


def _prepare(c, k, kp, second, allow_partial=True):
    s = _series(c, second)
    i, j = s.index(k), s.index(kp)
    if i == j:
        raise ValueError("k and k' must differ")
    vm = v_matrix(s, allow_partial=allow_partial)
    V2 = None if vm.V2_partial else vm.V2
    return s, i, j, vm.V1, V2


def transformed_vacuum(c, keep, second=None):
    """Series-valued transformed vacuum restricted by the keep rule."""
    s = _series(c, second)
    idx = [s.index(m) for m in keep]
    vm = v_matrix(s, allow_partial=True)
    eng = _Engine(idx)
    return eng, s, _vacuum_state(eng, vm.V1, None if vm.V2_partial else vm.V2, len(s.labels))


def reduced_vacuum(c, k, kp, second=None):
    """Reduced state of the transformed vacuum on modes ``(k, k')``.

    The basis is ``|n_k, n_k'>`` with ``n <= 2`` and index ``3 n_k + n_k'``.
    Without second-order coefficients the ``V2`` coherences are absent and
    the state is flagged ``first_order_only``.

    Returns
    -------
    PerturbedState
    """
    s, i, j, V1, V2 = _prepare(c, k, kp, second)
    eng = _Engine((i, j))
    psi = _vacuum_state(eng, V1, V2, len(s.labels))
    rho = _normalised(_reduce(psi, (i, j), (3, 3)), _norm_series(psi))
    return PerturbedState(*rho, dims=(3, 3), first_order_only=V2 is None, labels=(k, kp))


def reduced_one_particle(c, k, kp, second=None):
    """Reduced state of the transformed single-particle state ``|1_k>``.

    Mode ``k`` is truncated at occupation 3 and mode ``k'`` at 2, so the
    basis index is ``3 n_k + n_k'``.
    """
    s, i, j, V1, V2 = _prepare(c, k, kp, second)
    if not s.has_second_order:
        s = BosonSeries(s.G0, s.alpha1, s.beta1, s.labels)
    eng = _Engine((i, j))
    vac = _vacuum_state(eng, V1, V2, len(s.labels))
    psi = eng.apply_linear(vac, *_creation_map(s, i))
    rho = _normalised(_reduce(psi, (i, j), (4, 3)), _norm_series(psi))
    return PerturbedState(*rho, dims=(4, 3), first_order_only=V2 is None, labels=(k, kp))


def reduced_bell(c, kp, sign=+1, second=None):
    """Alice (static, one mode) and Rob's mode ``k'`` after Rob's motion.

    The initial state is ``(|0>|0> + sign |1>|1_k'>)/sqrt(2)``.  Alice's
    qubit comes first, Rob's mode is truncated at occupation 3.
    """
    s = _series(c, second)
    j = s.index(kp)
    vm = v_matrix(s, allow_partial=True)
    V2 = None if vm.V2_partial else vm.V2
    alice = len(s.labels)
    eng = _Engine((j, alice))
    vac = _vacuum_state(eng, vm.V1, V2, len(s.labels))
    one = eng.apply_linear(vac, *_creation_map(s, j))
    lifted = {_shift(k, alice, 1): v for k, v in one.items()}
    psi = _merge(_scale(vac, 1 / math.sqrt(2)), _scale(lifted, sign / math.sqrt(2)))
    rho = _normalised(_reduce(psi, (alice, j), (2, 4)), _norm_series(psi))
    return PerturbedState(*rho, dims=(2, 4), first_order_only=V2 is None, labels=("A", kp))


# --------------------------------------------------------------------------
# closed-form negativities

def _odd(k, kp):
    return (k + kp) % 2 == 1


def negativity_vacuum(c, k, kp, second=None):
    """Leading negativity generated from the vacuum between modes ``k, k'``.

    Opposite parity: ``h |beta1_kk'|``.  Equal parity:
    ``h^2 max{0, sqrt((f_k->k' - f_k'->k)^2 + |V2_kk'|^2) - (f_k->k' + f_k'->k)}``,
    which needs second-order coefficients.

    Returns
    -------
    SeriesValue
    """
    s = _series(c, second)
    i, j = s.index(k), s.index(kp)
    if _odd(k, kp):
        return SeriesValue(0.0, float(abs(s.beta1[i, j])), 0.0)
    V2 = v_matrix(s).V2
    f = f_sums(s, k, kp)
    a, b = f.fb(k, kp), f.fb(kp, k)
    val = max(0.0, math.hypot(a - b, abs(V2[i, j])) - (a + b))
    return SeriesValue(0.0, 0.0, val)


def one_particle_even_block(c, k, kp, second=None):
    """Second-order block of the partial transpose for the ``|1_k>`` state.

    Basis ``(|0,0>, |1,1>, |2,0>)`` (occupations of ``k, k'``) of the partial transpose in the
    degenerate zero eigenspace for equal-parity modes.
    """
    s = _series(c, second)
    if not s.has_second_order:
        raise SecondOrderUnavailable("the equal-parity one-particle block needs alpha2")
    i, j = s.index(k), s.index(kp)
    g = s.G0
    f = f_sums(s, k, kp)
    V2 = v_matrix(s).V2
    off = g[i] * np.conj(s.alpha2[j, i]) - 2 * np.real(g[i] * np.conj(g[j]) * np.conj(f.g_bb))
    m = np.array([
        [2 * f.fa(k, kp), off, -math.sqrt(2) * g[i] ** 2 * np.conj(f.g_ab)],
        [np.conj(off), 2 * f.fb(kp, k), math.sqrt(2) * np.conj(V2[i, j])],
        [-math.sqrt(2) * np.conj(g[i]) ** 2 * f.g_ab, math.sqrt(2) * V2[i, j], 4 * f.fb(k, kp)],
    ], dtype=complex)
    return m


def negativity_one_particle(c, k, kp, second=None):
    """Leading negativity generated from ``|1_k>`` between modes ``k, k'``.

    Opposite parity: ``h sqrt(|alpha1_kk'|^2 + 2 |beta1_kk'|^2)``.  Equal
    parity: ``h^2`` times the modulus of the negative eigenvalue of the
    3x3 block from :func:`one_particle_even_block`.
    """
    s = _series(c, second)
    i, j = s.index(k), s.index(kp)
    if _odd(k, kp):
        return SeriesValue(0.0, float(math.sqrt(abs(s.alpha1[i, j]) ** 2
                                                + 2 * abs(s.beta1[i, j]) ** 2)), 0.0)
    ev = np.linalg.eigvalsh(one_particle_even_block(s, k, kp))
    return SeriesValue(0.0, 0.0, float(-np.sum(ev[ev < 0])))


def bell_negativity(c, kp, second=None):
    """Negativity of the Bell state after Rob's motion.

    ``1/2 - h^2 (2 f^beta_k' + f^alpha_k')`` with unrestricted noise sums.
    """
    s = _series(c, second)
    j = s.index(kp)
    fb = 0.5 * float(np.sum(np.abs(s.beta1[j]) ** 2))
    fa = 0.5 * float(np.sum(np.abs(s.alpha1[j]) ** 2))
    return SeriesValue(0.5, 0.0, -(2 * fb + fa))
