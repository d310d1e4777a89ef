"""Fermionic Fock space over a finite window of signed Dirac modes.

Basis vectors are creation operators applied in ascending label order to
the vacuum, ``d^dag_{m1} d^dag_{m2} ... |0>`` with ``m1 < m2 < ...``; labels
``>= 0`` are particles (``b``) and labels ``< 0`` antiparticles (``c``), so
antiparticle operators always stand to the left.  The bra of a basis
vector is its adjoint, ``<0| ... d_{m2} d_{m1}``.

Partial traces are taken "inside out": the operators of a traced mode are
anticommuted next to the vacuum projector before they are removed.  With
this rule the reduced state reproduces every expectation value of
operators acting on the kept modes, which :func:`consistency_check`
verifies.

Two kept modes are mapped to two qubits with the first listed mode as the
first qubit and ``|11> = d^dag_a d^dag_b |0>`` for the listed order
``(a, b)``.
"""

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exact import SeriesEstimate
from .spectra import DIRAC
from .states import PerturbedState, SeriesValue

__all__ = [
    "FermionSeries", "FermionVMatrix", "FermionFSums", "MappingInconsistentError",
    "SecondOrderUnavailable", "basis_states", "creation_matrix", "inside_out_partial_trace",
    "consistency_check", "qubit_map", "three_mode_map_search", "fermion_v_matrix",
    "fermion_f_sums", "reduced_state", "reduced_vacuum", "reduced_particle",
    "reduced_antiparticle", "reduced_pair", "reduced_three_mode_vacuum",
    "fermion_negativity", "bell_state", "fermion_bell_observables",
    "two_qubit_concurrence", "two_qubit_chsh_max", "two_qubit_fidelity_max",
    "correlation_matrix", "annihilation_residual",
]


class MappingInconsistentError(ValueError):
    """A fermionic state cannot be represented consistently on qubits."""


class SecondOrderUnavailable(ValueError):
    """Raised when a quantity needs second-order Bogoliubov coefficients."""


# --------------------------------------------------------------------------
# small dense Fock spaces

def basis_states(n_modes):
    """Occupation tuples of ``n_modes`` modes in binary order.

    Mode 0 is the most significant bit, so for two modes the order is
    ``|00>, |01>, |10>, |11>``.
    """
    if n_modes == 0:
        return [()]
    return [tuple(int(b) for b in np.binary_repr(i, n_modes)) for i in range(2 ** n_modes)]


def creation_matrix(n_modes, mode):
    """Matrix of ``d^dag_mode`` in the canonical basis of ``n_modes`` modes.

    The canonical order of operators is ascending mode index, so creating
    ``mode`` picks up ``(-1)^(number of occupied modes with smaller index)``.
    """
    states = basis_states(n_modes)
    index = {s: i for i, s in enumerate(states)}
    out = np.zeros((2 ** n_modes, 2 ** n_modes))
    for s in states:
        if s[mode]:
            continue
        t = list(s)
        t[mode] = 1
        out[index[tuple(t)], index[s]] = (-1) ** sum(s[:mode])
    return out


def _move_to_end(occupied, traced):
    """Sign of moving the traced operators to the vacuum end of the string."""
    kept = [m for m in occupied if m not in traced]
    moved = [m for m in occupied if m in traced]
    perm = [occupied.index(m) for m in kept + moved]
    inversions = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm))
                     if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def inside_out_partial_trace(rho, n_modes, traced):
    """Trace out the modes ``traced`` of a canonical-basis density matrix.

    Parameters
    ----------
    rho : ndarray
        ``2^n x 2^n`` matrix in the basis of :func:`basis_states`.
    n_modes : int
    traced : int or iterable of int
        Mode positions to remove.

    Returns
    -------
    ndarray
        Matrix on the remaining modes, in their original relative order.
    """
    traced = {traced} if isinstance(traced, (int, np.integer)) else set(traced)
    kept = [m for m in range(n_modes) if m not in traced]
    states = basis_states(n_modes)
    small = {s: i for i, s in enumerate(basis_states(len(kept)))}
    out = np.zeros((2 ** len(kept), 2 ** len(kept)), dtype=complex)
    for i, s in enumerate(states):
        occ_s = [m for m in range(n_modes) if s[m]]
        for j, t in enumerate(states):
            if rho[i, j] == 0 or any(s[m] != t[m] for m in traced):
                continue
            occ_t = [m for m in range(n_modes) if t[m]]
            sign = _move_to_end(occ_s, traced) * _move_to_end(occ_t, traced)
            a = small[tuple(s[m] for m in kept)]
            b = small[tuple(t[m] for m in kept)]
            out[a, b] += sign * rho[i, j]
    return out


def _operator_basis(n_modes, modes):
    """Hermitian pairs ``X + X^dag`` and ``i(X - X^dag)`` over ``modes``.

    ``X`` runs over all products ``d_lambda ... d^dag_tau ...`` of
    annihilators and creators of the listed modes (including the number
    operator products needed for diagonal elements).
    """
    cre = [creation_matrix(n_modes, m) for m in range(n_modes)]
    ops = []
    for lam_size in range(len(modes) + 1):
        for lam in itertools.combinations(modes, lam_size):
            rest = [m for m in modes if m not in lam]
            for tau_size in range(len(rest) + 1):
                for tau in itertools.combinations(rest, tau_size):
                    others = [m for m in rest if m not in tau]
                    for nsize in range(len(others) + 1):
                        for nums in itertools.combinations(others, nsize):
                            X = np.eye(2 ** n_modes)
                            for m in lam:
                                X = X @ cre[m].T
                            for m in tau:
                                X = X @ cre[m]
                            for m in nums:
                                X = X @ cre[m] @ cre[m].T
                            ops.append(X + X.conj().T)
                            ops.append(1j * (X - X.conj().T))
    return ops


def _embed_modes(n_modes, modes):
    return [m for m in range(n_modes) if m in modes]


def consistency_check(rho, n_modes, keep):
    """Largest mismatch between global and reduced expectation values.

    Every Hermitian operator built from the modes ``keep`` is evaluated in
    ``rho`` and in the inside-out reduction of ``rho``.
    """
    keep = sorted(keep)
    traced = [m for m in range(n_modes) if m not in keep]
    red = inside_out_partial_trace(rho, n_modes, traced)
    big = _operator_basis(n_modes, keep)
    small = _operator_basis(len(keep), list(range(len(keep))))
    worst = 0.0
    for O, o in zip(big, small):
        worst = max(worst, abs(np.trace(O @ rho) - np.trace(o @ red)))
    return float(worst)


def _charge(state, charges):
    return sum(q for q, n in zip(charges, state) if n)


def qubit_map(rho, charges=(1, 1), tol=1e-12):
    """Two-mode fermionic state as a two-qubit density matrix.

    Parameters
    ----------
    rho : ndarray
        4x4 matrix in the canonical basis of the two modes.
    charges : tuple
        Charge of each mode (particles ``+1``, antiparticles ``-1``).

    Raises
    ------
    MappingInconsistentError
        When coherences between different total charges are present; no
        sign convention then commutes with both partial traces.
    """
    rho = np.asarray(rho, dtype=complex)
    states = basis_states(2)
    for i, s in enumerate(states):
        for j, t in enumerate(states):
            if abs(rho[i, j]) > tol and _charge(s, charges) != _charge(t, charges):
                raise MappingInconsistentError(
                    "state violates charge superselection; no consistent qubit map")
    out = rho.copy()
    for m in range(2):
        red_f = inside_out_partial_trace(rho, 2, 1 - m)
        red_q = _qubit_partial_trace(out, 2, 1 - m)
        if not np.allclose(red_f, red_q, atol=1e-10):
            raise MappingInconsistentError("qubit map does not commute with the partial trace")
    return out


def _qubit_partial_trace(rho, n, traced):
    traced = {traced} if isinstance(traced, (int, np.integer)) else set(traced)
    r = np.asarray(rho).reshape([2] * (2 * n))
    keep = [m for m in range(n) if m not in traced]
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = [letters[m] for m in range(n)]
    col = [letters[m] if m in traced else letters[n + m] for m in range(n)]
    out = "".join(letters[m] for m in keep) + "".join(letters[n + m] for m in keep)
    res = np.einsum("".join(row) + "".join(col) + "->" + out, r)
    d = 2 ** len(keep)
    return res.reshape(d, d)


@dataclass
class MapSearchResult:
    """Outcome of the exhaustive sign search for a three-qubit representation."""

    success: bool
    signs: tuple = None
    tried: int = 0


def three_mode_map_search(rho, tol=1e-10):
    """Search all ``2^8`` basis sign flips for a consistent three-qubit map.

    A sign assignment ``D`` is consistent when, for each pair of modes, the
    qubit partial trace of ``D rho D`` equals the inside-out reduction of
    ``rho`` up to a sign flip of the two-qubit basis.
    """
    rho = np.asarray(rho, dtype=complex)
    reductions = [(m, inside_out_partial_trace(rho, 3, m)) for m in range(3)]
    two_signs = [np.array(s) for s in itertools.product((1, -1), repeat=4)]
    tried = 0
    for signs in itertools.product((1, -1), repeat=8):
        tried += 1
        if signs[0] == -1:
            continue  # a global sign does not change D rho D
        d = np.array(signs)
        q = d[:, None] * rho * d[None, :]
        ok = True
        for m, red in reductions:
            target = _qubit_partial_trace(q, 3, m)
            if not any(np.allclose(target, s[:, None] * red * s[None, :], atol=tol)
                       for s in two_signs):
                ok = False
                break
        if ok:
            return MapSearchResult(True, signs, tried)
    return MapSearchResult(False, None, tried)


# --------------------------------------------------------------------------
# Bogoliubov data

@dataclass
class FermionSeries:
    """``A = G0 + h A1 + h^2 A2`` on a signed Dirac window."""

    G0: np.ndarray
    A1: np.ndarray
    labels: np.ndarray
    A2: np.ndarray = None

    @classmethod
    def from_composed(cls, c, second=None):
        if c.kind != DIRAC:
            raise ValueError("fermionic quantities need a Dirac-field transformation")
        a2 = None
        if second is not None:
            a2 = second.second[0] if isinstance(second, SeriesEstimate) else second
            n = len(c.G0)
            a2 = np.asarray(a2)[:n, :n]
        return cls(np.asarray(c.G0), c.A1, np.asarray(c.cfg.labels()), a2)

    @property
    def has_second_order(self):
        return self.A2 is not None

    def index(self, label):
        hits = np.nonzero(self.labels == label)[0]
        if not len(hits):
            raise IndexError(f"mode {label} outside the window")
        return int(hits[0])


def _series(c, second=None):
    if isinstance(c, FermionSeries):
        return c
    return FermionSeries.from_composed(c, second)


@dataclass
class FermionVMatrix:
    """``V = h V1 + h^2 V2`` of the transformed fermionic vacuum.

    Entries are defined for every index pair (the expansion extends
    naturally beyond ``p >= 0, q < 0``); the vacuum itself only uses that
    block.  ``V2_partial`` marks a ``V2`` lacking the ``A2`` term.
    """

    V1: np.ndarray
    V2: np.ndarray
    V2_partial: bool = False


def fermion_v_matrix(c, second=None, allow_partial=False):
    """``V1_pq = -G0*_p A1_qp`` and
    ``V2_pq = -G0*_p A2_qp - G0*_p G0_q sum_{m>=0} A1_mp A1*_mq``.

    Raises
    ------
    SecondOrderUnavailable
        Without ``A2`` unless ``allow_partial``.
    """
    s = _series(c, second)
    gc = s.G0.conj()
    V1 = -gc[:, None] * s.A1.T
    pos = s.labels >= 0
    analytic = -gc[:, None] * s.G0[None, :] * (s.A1[pos].T @ s.A1[pos].conj())
    if s.A2 is None:
        if not allow_partial:
            raise SecondOrderUnavailable("V2 needs second-order coefficients A2")
        return FermionVMatrix(V1, analytic, True)
    return FermionVMatrix(V1, analytic - gc[:, None] * s.A2.T, False)


class TailWarning(UserWarning):
    """A window sum has not converged to the requested precision."""


@dataclass
class FermionFSums:
    """Half sums of ``|A1|^2`` along a row, split by frequency sign."""

    series: FermionSeries

    def _sum(self, m, exclude, negative):
        s = self.series
        row = np.abs(s.A1[s.index(m)]) ** 2
        mask = (s.labels < 0) if negative else (s.labels >= 0)
        for e in np.atleast_1d(exclude if exclude is not None else []):
            mask = mask & (s.labels != e)
        return 0.5 * float(np.sum(row[mask]))

    def f(self, m, exclude=None):
        """``f^A_{m->n} = 1/2 sum_{i>=0, i not excluded} |A1_mi|^2``."""
        return self._sum(m, exclude, False)

    def fbar(self, m, exclude=None):
        """``fbar^A_{m->n} = 1/2 sum_{i<0, i not excluded} |A1_mi|^2``."""
        return self._sum(m, exclude, True)

    def converged(self, m, rel=1e-8):
        """Whether the last window entries are below ``rel`` of the sum."""
        s = self.series
        row = np.abs(s.A1[s.index(m)]) ** 2
        total = np.sum(row)
        return bool(total == 0 or max(row[0], row[-1]) <= rel * total)


def fermion_f_sums(c, second=None):
    return FermionFSums(_series(c, second))


def vacuum_normalisation(c):
    """``1 - h^2/2 sum_{p>=0,q<0} |A1_pq|^2`` as ``(c0, c2)``."""
    s = _series(c)
    pos, neg = s.labels >= 0, s.labels < 0
    return 1.0, -0.5 * float(np.sum(np.abs(s.A1[np.ix_(pos, neg)]) ** 2))


# --------------------------------------------------------------------------
# series-valued sparse states

class _Engine:
    """Fock states as ``{occupied indices (sorted): [c0, c1, c2]}``.

    Second-order amplitudes are kept only for configurations inside the
    kept modes, which is all a reduced state to second order needs when
    the unperturbed state lives in the kept modes.
    """

    def __init__(self, keep):
        self.keep = frozenset(keep)

    def env_empty(self, key):
        return all(i in self.keep for i in key)

    def add(self, state, key, order, amp):
        if order > 2 or amp == 0:
            return
        if order == 2 and not self.env_empty(key):
            return
        vec = state.get(key)
        if vec is None:
            vec = state[key] = np.zeros(3, dtype=complex)
        vec[order] += amp

    @staticmethod
    def create(key, i):
        if i in key:
            return None, 0
        pos = sum(1 for j in key if j < i)
        return tuple(sorted(key + (i,))), (-1) ** pos

    @staticmethod
    def annihilate(key, i):
        if i not in key:
            return None, 0
        pos = key.index(i)
        return key[:pos] + key[pos + 1:], (-1) ** pos

    def apply_linear(self, state, cre, ann):
        """Apply ``sum_o h^o sum_i (cre[o][i] d^dag_i + ann[o][i] d_i)``."""
        out = {}
        for key, vec in state.items():
            for o_st in range(3):
                if vec[o_st] == 0:
                    continue
                for o_op in range(3 - o_st):
                    for ops, fn in ((cre[o_op], self.create), (ann[o_op], self.annihilate)):
                        for i, coef in ops:
                            new, sign = fn(key, i)
                            if new is not None:
                                self.add(out, new, o_st + o_op, sign * coef * vec[o_st])
        return out

    def apply_pairs(self, state, V, order, pos, neg):
        """Apply ``sum_{p in pos, q in neg} V_pq d^dag_p d^dag_q`` at ``order``."""
        out = {}
        for key, vec in state.items():
            for o_st in range(3 - order):
                if vec[o_st] == 0:
                    continue
                for q in neg:
                    k1, s1 = self.create(key, q)
                    if k1 is None:
                        continue
                    for p in pos:
                        if V[p, q] == 0:
                            continue
                        k2, s2 = self.create(k1, p)
                        if k2 is not None:
                            self.add(out, k2, o_st + order, s1 * s2 * V[p, q] * vec[o_st])
        return out


def _merge(*states):
    out = {}
    for st in states:
        for key, vec in st.items():
            out[key] = out[key] + vec if key in out else vec.copy()
    return out


def _vacuum_state(eng, s, vm):
    pos = [i for i, l in enumerate(s.labels) if l >= 0]
    neg = [i for i, l in enumerate(s.labels) if l < 0]
    vac = {(): np.array([1, 0, 0], dtype=complex)}
    first = eng.apply_pairs(vac, vm.V1, 1, pos, neg)
    kpos = [i for i in pos if i in eng.keep]
    kneg = [i for i in neg if i in eng.keep]
    second = eng.apply_pairs(vac, vm.V2, 2, kpos, kneg) if vm.V2 is not None else {}
    kept_first = {k: v for k, v in first.items() if eng.env_empty(k)}
    twice = eng.apply_pairs(kept_first, vm.V1, 1, kpos, kneg)
    twice = {k: 0.5 * v for k, v in twice.items()}
    return _merge(vac, first, second, twice)


def _mode_operator(s, label, dagger):
    """Expansion of ``b^dag_n`` / ``c^dag_n`` (``dagger``) or ``b_n`` / ``c_n``.

    Returns ``(cre, ann)`` coefficient lists per order over hatted operators.
    """
    col = s.index(label)
    mats = [np.diag(s.G0), s.A1, s.A2 if s.A2 is not None else None]
    pos = s.labels >= 0
    cre, ann = [], []
    particle = label >= 0
    for M in mats:
        if M is None:
            cre.append([])
            ann.append([])
            continue
        v = M[:, col]
        # b_n = sum_{m>=0} A_mn b^_m + sum_{m<0} A_mn c^dag_m ;
        # c_n = sum_{m>=0} A*_mn b^dag_m + sum_{m<0} A*_mn c^_m
        if particle:
            lowering = [(i, complex(v[i])) for i in range(len(v)) if pos[i] and v[i] != 0]
            raising = [(i, complex(v[i])) for i in range(len(v)) if not pos[i] and v[i] != 0]
        else:
            raising = [(i, complex(np.conj(v[i]))) for i in range(len(v)) if pos[i] and v[i] != 0]
            lowering = [(i, complex(np.conj(v[i]))) for i in range(len(v))
                        if not pos[i] and v[i] != 0]
        if dagger:
            cre.append([(i, z.conjugate()) for i, z in lowering])
            ann.append([(i, z.conjugate()) for i, z in raising])
        else:
            cre.append(raising)
            ann.append(lowering)
    return cre, ann


def _norm_series(state):
    n = np.zeros(3)
    for vec in state.values():
        n[0] += abs(vec[0]) ** 2
        n[1] += 2 * np.real(np.conj(vec[0]) * vec[1])
        n[2] += abs(vec[1]) ** 2 + 2 * np.real(np.conj(vec[0]) * vec[2])
    return n


def _normalise(state):
    n0, n1, n2 = _norm_series(state)
    inv = np.array([1.0, -0.5 * n1, 0.375 * n1 ** 2 - 0.5 * n2]) / math.sqrt(n0)
    out = {}
    for key, vec in state.items():
        out[key] = np.array([inv[0] * vec[0],
                             inv[0] * vec[1] + inv[1] * vec[0],
                             inv[0] * vec[2] + inv[1] * vec[1] + inv[2] * vec[0]])
    return out


def _reduce(ket, bra, slots):
    """Inside-out reduction of ``|ket><bra|`` onto the storage indices ``slots``.

    ``slots`` lists kept modes in qubit order.  Returns the three series
    coefficients of a ``2^n`` square matrix.
    """
    n = len(slots)
    canon = sorted(slots)

    def split(key):
        env = tuple(i for i in key if i not in slots)
        local = [i for i in key if i in slots]
        sign = _move_to_end(list(key), set(env))
        # reorder the kept operators from ascending index into qubit order
        order = [slots.index(i) for i in local]
        inv = sum(1 for a in range(len(order)) for b in range(a + 1, len(order))
                  if order[a] > order[b])
        if inv % 2:
            sign = -sign
        idx = 0
        for i in local:
            idx |= 1 << (n - 1 - slots.index(i))
        return env, idx, sign

    del canon
    groups_k, groups_b = {}, {}
    for key, vec in ket.items():
        env, idx, sign = split(key)
        groups_k.setdefault(env, []).append((idx, sign * vec))
    for key, vec in bra.items():
        env, idx, sign = split(key)
        groups_b.setdefault(env, []).append((idx, sign * vec))
    rho = np.zeros((3, 2 ** n, 2 ** n), dtype=complex)
    for env, items in groups_k.items():
        other = groups_b.get(env)
        if not other:
            continue
        for i, u in items:
            for j, w in other:
                for o1 in range(3):
                    for o2 in range(3 - o1):
                        rho[o1 + o2, i, j] += u[o1] * np.conj(w[o2])
    return rho


def _transformed(s, vm, keep, initial):
    """Normalised transformed state ``d^dag_{initial...}|0>`` (left to right)."""
    eng = _Engine(keep)
    state = _vacuum_state(eng, s, vm)
    for label in reversed(list(initial)):
        cre, ann = _mode_operator(s, label, dagger=True)
        state = eng.apply_linear(state, cre, ann)
    return _normalise(state)


def _prepare(c, second, allow_partial):
    s = _series(c, second)
    vm = fermion_v_matrix(s, allow_partial=True)
    if vm.V2_partial and not allow_partial:
        raise SecondOrderUnavailable("this state needs second-order coefficients A2")
    return s, vm


def reduced_state(c, initial, keep, second=None, allow_partial=True):
    """Reduced state of a transformed Fock state on the modes ``keep``.

    Parameters
    ----------
    c : ComposedFirstOrder or FermionSeries
    initial : sequence of int
        Labels of the initially excited modes, created left to right on the
        vacuum (``[]`` for the vacuum).
    keep : sequence of int
        Labels of the kept modes in qubit order.
    second : SeriesEstimate, optional
    allow_partial : bool
        Without ``A2`` the second-order coherences involving ``A2`` are
        missing; the result is flagged ``first_order_only``.

    Returns
    -------
    PerturbedState
    """
    s, vm = _prepare(c, second, allow_partial)
    slots = [s.index(k) for k in keep]
    if len(set(slots)) != len(slots):
        raise ValueError("kept modes must differ")
    if not set(s.index(i) for i in initial) <= set(slots):
        raise ValueError("initial excitations must lie in the kept modes")
    psi = _transformed(s, vm, slots, initial)
    rho = _reduce(psi, psi, slots)
    return PerturbedState(rho[0], rho[1], rho[2], (2,) * len(slots),
                          first_order_only=vm.V2_partial, labels=tuple(keep))


def reduced_vacuum(c, kappa, kappap, second=None, allow_partial=True):
    return reduced_state(c, [], [kappa, kappap], second, allow_partial)


def reduced_particle(c, kappa, kappap, second=None, allow_partial=True):
    """Single particle in ``kappa >= 0``, reduced to ``(kappa, kappap)``."""
    if kappa < 0:
        raise ValueError("particle modes have non-negative labels")
    return reduced_state(c, [kappa], [kappa, kappap], second, allow_partial)


def reduced_antiparticle(c, kappa, kappap, second=None, allow_partial=True):
    """Single antiparticle in ``kappa < 0``, reduced to ``(kappa, kappap)``."""
    if kappa >= 0:
        raise ValueError("antiparticle modes have negative labels")
    return reduced_state(c, [kappa], [kappa, kappap], second, allow_partial)


def reduced_pair(c, kappa, kappap, second=None, allow_partial=True):
    """Particle ``kappa >= 0`` and antiparticle ``kappap < 0``."""
    if kappa < 0 or kappap >= 0:
        raise ValueError("need a particle label >= 0 and an antiparticle label < 0")
    return reduced_state(c, [kappa, kappap], [kappa, kappap], second, allow_partial)


def reduced_three_mode_vacuum(c, modes, second=None, allow_partial=True):
    return reduced_state(c, [], list(modes), second, allow_partial)


def annihilation_residual(c, label, second=None, keep=None):
    """Largest series coefficient of ``b_n|0>`` (or ``c_n|0>``) up to ``h^2``.

    A consistency audit of the vacuum ansatz and the operator expansions.
    ``keep`` limits the second order to a set of labels (default: all).
    """
    s, vm = _prepare(c, second, allow_partial=True)
    keep = range(len(s.labels)) if keep is None else [s.index(k) for k in keep]
    eng = _Engine(keep)
    state = _vacuum_state(eng, s, vm)
    cre, ann = _mode_operator(s, label, dagger=False)
    out = eng.apply_linear(state, cre, ann)
    return np.max(np.abs(np.array(list(out.values())))) if out else 0.0, out


# --------------------------------------------------------------------------
# negativities

def _odd(a, b):
    return (a + b) % 2 == 1


def fermion_negativity(c, case, kappa, kappap, second=None):
    """Perturbative negativity between two fermionic modes.

    Parameters
    ----------
    case : {"vacuum", "particle", "antiparticle", "pair"}
        Initial state.  ``particle``/``antiparticle`` start from an
        excitation in ``kappa``; ``pair`` from a particle in ``kappa`` and an
        antiparticle in ``kappap``.

    Returns
    -------
    SeriesValue
        For opposite parity ``(0, |A1_kk'|, 0)``; otherwise ``(0, 0, N2)``
        with ``N2 = max{0, sqrt(d^2 + |V2|^2) - sigma}`` where ``d`` and
        ``sigma`` are the difference and sum of the case's noise sums.

    Raises
    ------
    SecondOrderUnavailable
        Equal parity without ``A2``.
    """
    s = _series(c, second)
    i, j = s.index(kappa), s.index(kappap)
    if _odd(kappa, kappap):
        return SeriesValue(0.0, float(abs(s.A1[i, j])), 0.0)
    vm = fermion_v_matrix(s)
    fs = FermionFSums(s)
    if case == "vacuum":
        if kappa < 0 or kappap >= 0:
            raise ValueError("vacuum case needs kappa >= 0 > kappap")
        a, b = fs.fbar(kappa, kappap), fs.f(kappap, kappa)
        v2 = vm.V2[i, j]
    elif case in ("particle", "antiparticle"):
        if case == "antiparticle":
            if kappa >= 0 or kappap >= 0:
                raise ValueError("antiparticle case needs two negative labels")
            kappa, kappap = -kappa - 1, -kappap - 1
            i, j = s.index(kappa), s.index(kappap)
        if kappa < 0 or kappap < 0:
            raise ValueError("particle case needs two non-negative labels")
        a, b = fs.f(kappa, kappap), fs.fbar(kappap)
        v2 = vm.V2[i, j]
    elif case == "pair":
        if kappa < 0 or kappap >= 0:
            raise ValueError("pair case needs kappa >= 0 > kappap")
        a, b = fs.f(kappa), fs.fbar(kappap)
        v2 = vm.V2[i, j]
    else:
        raise ValueError(f"unknown case {case!r}")
    n2 = max(0.0, math.sqrt((a - b) ** 2 + abs(v2) ** 2) - (a + b))
    return SeriesValue(0.0, 0.0, n2)


# --------------------------------------------------------------------------
# two-qubit tools

_SIGMA = [np.array([[0, 1], [1, 0]], dtype=complex),
          np.array([[0, -1j], [1j, 0]], dtype=complex),
          np.array([[1, 0], [0, -1]], dtype=complex)]


def _check_two_qubit(rho, tol=1e-9):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("need a 4x4 density matrix")
    if not np.allclose(rho, rho.conj().T, atol=tol):
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(rho) - 1) > tol or np.min(np.linalg.eigvalsh(rho)) < -tol:
        raise ValueError("not a physical density matrix")
    return rho


def two_qubit_concurrence(rho, tol=1e-9):
    """Wootters concurrence.

    ``tol`` bounds the admitted negative eigenvalues, for example of a
    density matrix truncated at a finite perturbative order.
    """
    rho = _check_two_qubit(rho, tol)
    yy = np.kron(_SIGMA[1], _SIGMA[1])
    lam = np.linalg.eigvals(rho @ yy @ rho.conj() @ yy)
    root = np.sort(np.sqrt(np.clip(lam.real, 0, None)))[::-1]
    return float(max(0.0, root[0] - root[1] - root[2] - root[3]))


def correlation_matrix(rho):
    """``t_ij = Tr(rho sigma_i x sigma_j)``."""
    rho = np.asarray(rho, dtype=complex)
    return np.array([[np.real(np.trace(rho @ np.kron(a, b))) for b in _SIGMA] for a in _SIGMA])


def two_qubit_chsh_max(rho):
    """Largest CHSH expectation ``2 sqrt(mu1 + mu2)``."""
    rho = _check_two_qubit(rho)
    t = correlation_matrix(rho)
    mu = np.sort(np.linalg.eigvalsh(t.T @ t))[::-1]
    return float(2 * math.sqrt(max(mu[0] + mu[1], 0.0)))


def two_qubit_fidelity_max(rho):
    """Teleportation fidelity optimised over the receiver's local rotations."""
    rho = _check_two_qubit(rho)
    t = correlation_matrix(rho)
    mu = np.clip(np.linalg.eigvalsh(t.T @ t), 0, None)
    return float(0.5 * (1 + np.sum(np.sqrt(mu)) / 3))


# --------------------------------------------------------------------------
# Bell states across two cavities

def bell_state(c, kappap, sign=+1, second=None, allow_partial=True):
    """``(|0>|0> + sign |1>|1_k'>)/sqrt(2)`` with Rob's cavity transformed.

    Alice's (inertial) mode is the first qubit.  Rob's half is reduced to
    the mode ``kappap`` by the inside-out trace of each matrix element.

    Returns
    -------
    PerturbedState
    """
    s, vm = _prepare(c, second, allow_partial)
    slot = s.index(kappap)
    psi = {0: _transformed(s, vm, [slot], []), 1: _transformed(s, vm, [slot], [kappap])}
    rho = np.zeros((3, 4, 4), dtype=complex)
    for a in (0, 1):
        for b in (0, 1):
            amp = 0.5 * (sign if a != b else 1.0)
            block = _reduce(psi[a], psi[b], [slot])
            for o in range(3):
                rho[o][2 * a:2 * a + 2, 2 * b:2 * b + 2] += amp * block[o]
    return PerturbedState(rho[0], rho[1], rho[2], (2, 2), first_order_only=vm.V2_partial,
                          labels=("A", kappap))


@dataclass
class BellObservables:
    """Second-order degradation of a fermionic Bell state.

    ``f`` and ``fbar`` are the no-exclusion sums of Rob's mode;
    ``correlation`` the diagonal of ``t^T t`` to second order.
    """

    f: float
    fbar: float
    negativity: SeriesValue
    concurrence_bounds: tuple
    chsh: SeriesValue
    fidelity: SeriesValue
    correlation: np.ndarray

    def at(self, h):
        """Numerical values at ``h``."""
        lo, hi = self.concurrence_bounds
        return {"negativity": self.negativity.value(h),
                "concurrence_bounds": (lo.value(h), hi.value(h)),
                "chsh": self.chsh.value(h), "fidelity": self.fidelity.value(h)}


def fermion_bell_observables(c, kappap, second=None):
    """Negativity, concurrence bounds, CHSH and fidelity of a degraded Bell state.

    The CHSH value and fidelity are evaluated from the second-order
    correlation matrix ``t^T t`` of the reduced state, which needs only
    first-order coefficients.
    """
    if kappap < 0:
        raise ValueError("the presented branch needs a particle mode kappap >= 0")
    s = _series(c, second)
    fs = FermionFSums(s)
    f, fb = fs.f(kappap), fs.fbar(kappap)
    tot = f + fb
    st = bell_state(s, kappap, allow_partial=True)
    t = [correlation_matrix(r) for r in (st.rho0, st.rho1, st.rho2)]
    M2 = t[0].T @ t[2] + t[2].T @ t[0] + t[1].T @ t[1]
    M0 = t[0].T @ t[0]
    mu0 = np.diag(M0)
    if not np.allclose(M0, np.diag(mu0), atol=1e-10):
        raise ArithmeticError("unperturbed correlation matrix is not diagonal")
    mu2 = np.real(np.diag(M2))
    order = np.argsort(mu0 + 1e-9 * mu2)[::-1]
    chsh2 = 2 * 0.5 * (mu2[order[0]] + mu2[order[1]]) / math.sqrt(mu0[order[0]] + mu0[order[1]])
    chsh = SeriesValue(2 * math.sqrt(mu0[order[0]] + mu0[order[1]]), 0.0, chsh2)
    fid2 = sum(0.5 * m2 / math.sqrt(m0) for m0, m2 in zip(mu0, mu2) if m0 > 0) / 6
    fidelity = SeriesValue(0.5 * (1 + np.sum(np.sqrt(mu0)) / 3), 0.0, fid2)
    return BellObservables(
        f, fb, SeriesValue(0.5, 0.0, -tot),
        (SeriesValue(1.0, 0.0, -2 * tot), SeriesValue(1.0, 0.0, -tot)),
        chsh, fidelity, np.array([mu0, mu2]))


def _warn_truncation(fs, label, rel=1e-8):
    if not fs.converged(label, rel):
        warnings.warn(f"noise sums for mode {label} not converged in the window", TailWarning,
                      stacklevel=3)
