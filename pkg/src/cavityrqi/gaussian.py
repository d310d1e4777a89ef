"""Covariance-matrix toolbox for bosonic Gaussian states.

Quadratures are ordered ``(q1, p1, q2, p2, ...)`` with ``q = (a + a^dag)/sqrt(2)``
so that the vacuum has covariance matrix ``1``.  The symplectic form is the
direct sum of ``[[0, 1], [-1, 0]]``.  A Bogoliubov transformation acts on
covariance matrices as ``Gamma -> S Gamma S^T`` with ``S`` assembled from
2x2 blocks of the coefficients.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .spectra import SCALAR, frequencies


class GaussianValidityWarning(UserWarning):
    """A perturbative Gaussian result is used outside its stated regime."""


class UnsupportedMeasureError(ValueError):
    """The requested entanglement measure does not apply to this state."""


# --------------------------------------------------------------------------
# basics

def omega(n_modes):
    """Symplectic form on ``n_modes`` modes."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def vacuum(n_modes):
    return np.eye(2 * n_modes)


def squeezed(s):
    """Product of single-mode squeezed states ``diag(e^{2s}, e^{-2s})``."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    return np.diag(np.ravel([[math.exp(2 * x), math.exp(-2 * x)] for x in s]))


def tms(r):
    """Two-mode squeezed state with real squeezing parameter ``r``."""
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    return np.array([[c, 0, s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, -s, 0, c]], dtype=float)


def thermal(nbar):
    """Product of thermal states with mean occupations ``nbar``."""
    nbar = np.atleast_1d(np.asarray(nbar, dtype=float))
    return np.diag(np.repeat(2 * nbar + 1, 2))


def mean_occupation(gamma_mode):
    """``<a^dag a> = (Tr Gamma - 2) / 4`` for a single-mode block."""
    return 0.25 * (np.trace(gamma_mode) - 2.0)


def is_bona_fide(gamma, tol=1e-10):
    """``Gamma + i Omega >= 0`` up to ``tol``."""
    n = gamma.shape[0] // 2
    return bool(np.min(np.linalg.eigvalsh(gamma + 1j * omega(n))) >= -tol)


def is_pure(gamma, tol=1e-10):
    return abs(np.linalg.det(gamma) - 1.0) <= tol


def direct_sum(*blocks):
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size))
    i = 0
    for b in blocks:
        n = b.shape[0]
        out[i:i + n, i:i + n] = b
        i += n
    return out


# --------------------------------------------------------------------------
# symplectic maps

def _block(a, b):
    return np.array([[np.real(a - b), np.imag(a + b)], [-np.imag(a - b), np.real(a + b)]])


def symplectic_from_bogo(alpha, beta):
    """Real symplectic matrix of the coefficients ``alpha, beta``.

    Block ``(m, n)`` is ``[[Re(a - b), Im(a + b)], [-Im(a - b), Re(a + b)]]``
    with ``a = alpha_mn`` and ``b = beta_mn``.
    """
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.zeros_like(alpha) if beta is None else np.asarray(beta, dtype=complex)
    n = alpha.shape[0]
    S = np.empty((2 * n, 2 * n))
    S[0::2, 0::2] = np.real(alpha - beta)
    S[0::2, 1::2] = np.imag(alpha + beta)
    S[1::2, 0::2] = -np.imag(alpha - beta)
    S[1::2, 1::2] = np.real(alpha + beta)
    return S


def symplectic_residual(S):
    """``max |S Omega S^T - Omega|``."""
    om = omega(S.shape[0] // 2)
    return float(np.max(np.abs(S @ om @ S.T - om)))


def beam_splitter(theta):
    """Two-mode beam splitter with transmissivity angle ``theta``."""
    c, s = math.cos(theta), math.sin(theta)
    return symplectic_from_bogo(np.array([[c, s], [s, -c]]), None)


def rotation(theta):
    """Phase rotation ``a -> e^{-i theta} a`` as a 2x2 symplectic block."""
    return _block(np.exp(1j * theta), 0.0)


def transform(S, gamma):
    if S.shape != gamma.shape:
        raise ValueError(f"dimension mismatch {S.shape} vs {gamma.shape}")
    return S @ gamma @ S.T


def partial_trace(gamma, keep):
    """Keep the rows and columns of the listed modes (in the given order)."""
    idx = np.ravel([[2 * m, 2 * m + 1] for m in keep])
    return gamma[np.ix_(idx, idx)]


def local_rotation(gamma, mode, theta):
    """Rotate one mode of a covariance matrix by ``theta``."""
    n = gamma.shape[0] // 2
    S = np.eye(2 * n)
    S[2 * mode:2 * mode + 2, 2 * mode:2 * mode + 2] = rotation(theta)
    return transform(S, gamma)


# --------------------------------------------------------------------------
# spectra and measures

def symplectic_spectrum(gamma):
    """Symplectic eigenvalues (moduli of the eigenvalues of ``i Omega Gamma``)."""
    gamma = np.asarray(gamma, dtype=float)
    if not np.allclose(gamma, gamma.T, atol=1e-12):
        raise ValueError("covariance matrix must be symmetric")
    n = gamma.shape[0] // 2
    ev = np.sort(np.abs(np.linalg.eigvals(1j * omega(n) @ gamma)))
    return ev[0::2]


def ppt_flip(n_modes=2, mode=1):
    """``T~`` flipping the momentum of ``mode`` (partial transposition)."""
    t = np.ones(2 * n_modes)
    t[2 * mode + 1] = -1.0
    return np.diag(t)


def ppt_nu_minus(gamma):
    """Smallest symplectic eigenvalue of the partial transpose (two modes)."""
    T = ppt_flip(2, 1)
    return float(symplectic_spectrum(T @ gamma @ T)[0])


def eof_function(nu):
    """Entropic function of the entanglement of formation (natural log)."""
    if nu >= 1:
        return 0.0
    a = (1 + nu) ** 2 / (4 * nu)
    b = (1 - nu) ** 2 / (4 * nu)
    return float(a * math.log(a) - (b * math.log(b) if b > 0 else 0.0))


def measures(gamma, tol=1e-9):
    """Negativity, logarithmic negativity and (symmetric states) EoF."""
    nu = ppt_nu_minus(gamma)
    out = {"nu_minus": nu,
           "negativity": max(0.0, (1 - nu) / (2 * nu)),
           "log_negativity": max(0.0, -math.log2(nu))}
    da = np.linalg.det(gamma[:2, :2])
    db = np.linalg.det(gamma[2:, 2:])
    out["eof"] = eof_function(nu) if abs(da - db) <= tol * max(1.0, abs(da)) else None
    return out


def eof(gamma, tol=1e-9):
    """Entanglement of formation; only for ``det Gamma_k = det Gamma_k'``."""
    val = measures(gamma, tol)["eof"]
    if val is None:
        raise UnsupportedMeasureError("entanglement of formation needs a symmetric state")
    return val


# --------------------------------------------------------------------------
# teleportation

_Z = np.diag([1.0, -1.0])


def teleport_fidelity(gamma):
    """Coherent-state teleportation fidelity of a two-mode resource.

    ``F = 2 / sqrt(4 + 2 Tr N + det N)`` with
    ``N = Z G_k Z - Z C - C^T Z + G_k'``; the sign of the correlation terms
    is the one for which the two-mode squeezed state with ``r > 0`` gives
    ``1 / (1 + e^{-2r})``.
    """
    gk, c, gkp = gamma[:2, :2], gamma[:2, 2:], gamma[2:, 2:]
    N = _Z @ gk @ _Z - _Z @ c - c.T @ _Z + gkp
    return float(2.0 / math.sqrt(4 + 2 * np.trace(N) + np.linalg.det(N)))


def fidelity_bounds(nu_minus):
    """Bounds on the fidelity optimised over local Gaussian operations."""
    return (1 + nu_minus) / (1 + 3 * nu_minus), 1.0 / (1 + nu_minus)


optimal_bounds = fidelity_bounds


def phase_optimised_fidelity(gamma, thetas=None):
    """Fidelity after local phase rotations of both modes.

    With ``thetas = (theta_k, theta_k')`` the rotations are applied as given
    (for example minus the recorded proper-time phases).  Otherwise the
    angles are optimised numerically.

    Returns
    -------
    (float, tuple)
        The fidelity and the rotation angles used.
    """
    def fid(t):
        g = local_rotation(local_rotation(gamma, 0, t[0]), 1, t[1])
        return teleport_fidelity(g)

    if thetas is not None:
        return fid(thetas), tuple(thetas)
    best = None
    for t0 in np.linspace(0, 2 * np.pi, 8, endpoint=False):
        res = minimize(lambda t: -fid(t), x0=[0.0, t0], method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
        if best is None or res.fun < best.fun:
            best = res
    return -float(best.fun), tuple(best.x)


# --------------------------------------------------------------------------
# resonances

def resonance_check(S):
    """Norm of the commutator ``[S, S^T]``."""
    return float(np.linalg.norm(S @ S.T - S.T @ S))


def resonance_first_order(c, k, kp):
    """``|(G0*_k - G0_k') beta1_kk'|``, the first-order resonance obstruction."""
    i, j = c.index(k), c.index(kp)
    return float(abs((np.conj(c.G0[i]) - c.G0[j]) * c.beta1[i, j]))


def resonance_times(k, kp, cfg, count=5):
    """Repetition times ``2 pi n / (w_k + w_k')`` for ``n = 1..count``."""
    if cfg.field_kind != SCALAR:
        raise ValueError("resonance times are defined for the scalar field here")
    w = frequencies(cfg, [k, kp])
    return [2 * math.pi * n / float(w[0] + w[1]) for n in range(1, count + 1)]


# --------------------------------------------------------------------------
# perturbative transformations

def perturbative_symplectic(c, second=None):
    """``S = S0 + h S1 + h^2 S2`` from a composed first order.

    ``second`` optionally supplies ``(alpha2, beta2)``; otherwise ``S2`` is
    ``None``.
    """
    S0 = symplectic_from_bogo(np.diag(c.G0), np.zeros_like(c.alpha1))
    S1 = symplectic_from_bogo(c.alpha1, c.beta1)
    S2 = None
    if second is not None:
        a2, b2 = second.second if hasattr(second, "second") else second
        n = len(c.G0)
        S2 = symplectic_from_bogo(np.asarray(a2)[:n, :n], np.asarray(b2)[:n, :n])
    return S0, S1, S2


def squeezed_generation_negativity(c, k, kp, s_k, s_kp, h=None):
    """First-order negativity coefficient for squeezed inputs in modes ``k, k'``.

    Only defined for modes of opposite parity.  When ``h`` is supplied the
    validity condition ``h^2 (f^a_k->k' + f^a_k'->k) e^{2|s|} << 1`` is
    checked (threshold 0.1) and a warning issued when it fails.
    """
    if (k + kp) % 2 == 0:
        raise ValueError("modes of equal parity have no first-order negativity")
    i, j = c.index(k), c.index(kp)
    a = c.alpha1[i, j]
    b = c.beta1[i, j]
    gk = c.G0[i]
    ck, cq = math.cosh(2 * s_k), math.cosh(2 * s_kp)
    sk, sq = math.sinh(2 * s_k), math.sinh(2 * s_kp)
    x = np.conj(gk) * a
    y = np.conj(gk) * b
    val = (abs(a) ** 2 * (ck * cq - 1) + abs(b) ** 2 * (ck * cq + 1)
           - np.real(x ** 2 + y ** 2) * sk * sq
           - 2 * np.real(x * np.conj(y)) * ck * sq
           + 2 * np.real(x * y) * sk * cq)
    if h is not None:
        fa = 0.5 * (np.sum(np.abs(c.alpha1[i]) ** 2) - abs(c.alpha1[i, j]) ** 2
                    + np.sum(np.abs(c.alpha1[j]) ** 2) - abs(c.alpha1[j, i]) ** 2)
        if h * h * fa * math.exp(2 * max(abs(s_k), abs(s_kp))) > 0.1:
            warnings.warn("squeezing too large for the perturbative negativity",
                          GaussianValidityWarning, stacklevel=2)
    return float(math.sqrt(max(val, 0.0) / 2.0))


def squeezed_transformed_blocks(c, k, kp, s, second=None):
    """Perturbative two-mode covariance blocks of a squeezed product input.

    ``s`` lists squeezing parameters for every mode of the window (zeros
    give vacua).  Returns ``(G0, G1, G2)`` reduced to modes ``k, k'``; ``G2``
    is ``None`` without second-order coefficients.
    """
    S0, S1, S2 = perturbative_symplectic(c, second)
    gam = squeezed(s)
    g0 = S0 @ gam @ S0.T
    g1 = S1 @ gam @ S0.T + S0 @ gam @ S1.T
    g2 = None
    if S2 is not None:
        g2 = S2 @ gam @ S0.T + S0 @ gam @ S2.T + S1 @ gam @ S1.T
    keep = [c.index(k), c.index(kp)]
    red = [partial_trace(g, keep) if g is not None else None for g in (g0, g1, g2)]
    return tuple(red)


def nu_minus_first_order(c, k, kp, s_k, s_kp):
    """``|nu~_-^(1)| / 2`` from degenerate perturbation of ``i Omega T Gamma T``."""
    from .perturb import PerturbedMatrix, eigen_corrections

    s = np.zeros(len(c.G0))
    s[c.index(k)], s[c.index(kp)] = s_k, s_kp
    g0, g1, _ = squeezed_transformed_blocks(c, k, kp, s)
    T = ppt_flip(2, 1)
    om = 1j * omega(2)
    pm = PerturbedMatrix(om @ T @ g0 @ T, om @ T @ g1 @ T)
    firsts = [np.real(x.lambda1) for x in eigen_corrections(pm) if abs(x.lambda0 - 1) < 1e-8]
    return 0.5 * float(max(np.abs(firsts)))


def squeezed_generation_local_invariant(c, k, kp, s_k, s_kp):
    """``sqrt(-det C1) / 2`` from the first-order correlation block.

    The determinant of the correlation block is a local symplectic
    invariant; for a two-mode squeezed state of parameter ``r`` it equals
    ``-4 r^2``, so this reproduces the first-order negativity coefficient.
    """
    s = np.zeros(len(c.G0))
    s[c.index(k)], s[c.index(kp)] = s_k, s_kp
    _, g1, _ = squeezed_transformed_blocks(c, k, kp, s)
    return 0.5 * math.sqrt(max(0.0, -float(np.linalg.det(g1[:2, 2:]))))


@dataclass
class TMSDegradation:
    """Second-order degradation of a two-mode squeezed resource.

    ``nu0 + h^2 nu2`` is the smallest symplectic eigenvalue of the partial
    transpose; ``negativity`` and ``fidelity_opt`` hold ``(c0, c2)`` pairs of
    ``c0 + h^2 c2``; ``fidelity`` is the phase-dependent value before local
    rotations, whose ``h^2`` coefficient is
    ``-F0^2 [(1 - ch) f^a + (1 + ch) f^b + cos(phi) sh (f^a - f^b)]`` with
    ``ch, sh = cosh(2r), sinh(2r)``.  At ``phi = 0`` this becomes
    ``-F0 [f^b + f^a tanh(r)]``, the optimal value saturating
    ``1 / (1 + nu~_-)``.  ``fidelity_opt_tanh2r_c2`` keeps the variant with
    ``tanh(2r)`` for comparison.
    """

    r: float
    f_alpha: float
    f_beta: float
    nu0: float
    nu2: float
    negativity: tuple
    fidelity: tuple
    fidelity_opt: tuple
    fidelity_opt_tanh2r_c2: float
    det2: float
    warnings: list


def tms_degradation(c, kp, r, h=None, phase=None):
    """Degradation of a two-mode squeezed state shared with the moving mode ``k'``.

    Parameters
    ----------
    c : ComposedFirstOrder
        Rob's scenario.
    kp : int
        Rob's mode.
    r : float
        Two-mode squeezing parameter.
    h : float, optional
        Enables the validity guards ``e^{2|r|} h^2 << 1`` and
        ``h^2 << sinh(2|r|)`` (threshold 0.1).
    phase : float, optional
        Combined free phase of the two modes for the un-rotated fidelity;
        defaults to Rob's ``w_k' tau``.
    """
    j = c.index(kp)
    fa = 0.5 * float(np.sum(np.abs(c.alpha1[j]) ** 2))
    fb = 0.5 * float(np.sum(np.abs(c.beta1[j]) ** 2))
    ar = abs(r)
    e = math.exp(-2 * ar)
    nu0 = e
    nu2 = (1 - e) * fa + (1 + e) * fb
    n0 = 0.5 * (math.exp(2 * ar) - 1)
    n2 = -math.exp(2 * ar) * (0.5 * (math.exp(2 * ar) - 1) * (fb + fa) + fb)
    if phase is None:
        phase = float(np.angle(c.G0[j]))
    f0 = 1.0 / (1 + math.cosh(2 * r) - math.cos(phase) * math.sinh(2 * r))
    ch, sh = math.cosh(2 * r), math.sinh(2 * r)
    f2 = -f0 ** 2 * ((1 - ch) * fa + (1 + ch) * fb + math.cos(phase) * sh * (fa - fb))
    fo0 = 1.0 / (1 + e)
    fo2 = -fo0 * (fb + fa * math.tanh(ar))
    tanh2r = -fo0 * (fb + fa * math.tanh(2 * ar))
    det2 = 4 * ((ch + 1) * fb + (ch - 1) * fa)
    msgs = []
    if h is not None:
        if math.exp(2 * ar) * h * h > 0.1:
            msgs.append("e^{2|r|} h^2 is not small")
        if ar == 0 or h * h > 0.1 * math.sinh(2 * ar):
            msgs.append("h^2 is not small compared with sinh(2|r|)")
        for m in msgs:
            warnings.warn(m, GaussianValidityWarning, stacklevel=2)
    return TMSDegradation(r, fa, fb, nu0, nu2, (n0, n2), (f0, f2), (fo0, fo2), tanh2r,
                          det2, msgs)


def tms_exact_pipeline(S_rob, kp_index, r, thetas=None):
    """Transform a two-mode squeezed resource with Rob's full symplectic matrix.

    Alice's mode is static and placed first; Rob's window carries the
    resource in ``kp_index`` and vacua elsewhere.

    Returns
    -------
    dict
        ``gamma`` (two-mode reduced covariance), ``nu_minus``,
        ``negativity``, ``fidelity`` (un-rotated) and ``fidelity_rotated``
        (after the local rotations ``thetas``, if given).
    """
    n = S_rob.shape[0] // 2
    full = np.eye(2 * (n + 1))
    t = tms(r)
    a_idx = [0, 1]
    r_idx = [2 + 2 * kp_index, 3 + 2 * kp_index]
    idx = a_idx + r_idx
    full[np.ix_(idx, idx)] = t
    S = direct_sum(np.eye(2), S_rob)
    g = partial_trace(S @ full @ S.T, [0, 1 + kp_index])
    g = 0.5 * (g + g.T)
    nu = ppt_nu_minus(g)
    out = {"gamma": g, "nu_minus": nu, "negativity": max(0.0, (1 - nu) / (2 * nu)),
           "fidelity": teleport_fidelity(g)}
    if thetas is not None:
        out["fidelity_rotated"] = phase_optimised_fidelity(g, thetas)[0]
    return out


@dataclass
class CircuitEstimate:
    """Relative correction to the optimal fidelity in a circuit simulation.

    ``correction`` is ``h^2 [f^b + f^a tanh(2r)]``; ``correction_tanh_r``
    replaces ``tanh(2r)`` by ``tanh(r)``, the form consistent with the
    saturated fidelity bound.  ``quoted`` is the commonly cited figure of about 4%
    for these inputs; no agreement is enforced.
    """

    h: float
    h2: float
    f_alpha: float
    f_beta: float
    r: float
    correction: float
    correction_tanh_r: float
    quoted: float = 0.04


def circuit_estimate(a_c, L, c_eff, r, f_alpha=None, f_beta=None, composed=None, kp=None):
    """Relative fidelity correction for physical circuit parameters.

    Parameters
    ----------
    a_c : float
        Proper acceleration at the cavity centre in m/s^2.
    L : float
        Cavity length in m.
    c_eff : float
        Effective speed of light in the circuit in m/s.
    r : float
        Two-mode squeezing parameter.
    f_alpha, f_beta : float, optional
        Sums for Rob's mode; computed from ``composed`` and ``kp`` otherwise.
    """
    if f_alpha is None or f_beta is None:
        if composed is None or kp is None:
            raise ValueError("give f_alpha and f_beta or a composed scenario and mode")
        j = composed.index(kp)
        f_alpha = 0.5 * float(np.sum(np.abs(composed.alpha1[j]) ** 2))
        f_beta = 0.5 * float(np.sum(np.abs(composed.beta1[j]) ** 2))
    h = a_c * L / c_eff ** 2
    h2 = h * h
    return CircuitEstimate(h, h2, f_alpha, f_beta, r,
                           h2 * (f_beta + f_alpha * math.tanh(2 * r)),
                           h2 * (f_beta + f_alpha * math.tanh(r)))
