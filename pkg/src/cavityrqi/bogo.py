"""First-order Minkowski to Rindler Bogoliubov coefficients.

A cavity that switches from inertial motion to uniform proper acceleration
``h / L`` (measured at its centre) mixes modes (alpha-type coefficients) and
creates particles (beta-type coefficients).  To linear order in ``h`` the
one-way coefficients are closed-form expressions in the inertial spectrum.
All formulas below are written for ``L = 1``; the window of the supplied
:class:`~cavityrqi.spectra.CavityConfig` fixes which modes are tabulated.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

from . import kernels
from .spectra import DIRAC, SCALAR, CavityConfig, dirac_momenta, scalar_frequency


class PerturbativeRegimeWarning(UserWarning):
    """Emitted when parameters leave the regime where first order is trusted."""


#: Default thresholds used by :func:`regime_warnings`.
H_LIMIT = 0.3
MH_LIMIT = 0.3
M2H_LIMIT = 1.0


def regime_warnings(h, M=0.0, h_limit=H_LIMIT, mh_limit=MH_LIMIT, m2h_limit=M2H_LIMIT,
                    emit=True):
    """List the perturbative-regime conditions violated by ``(h, M)``.

    The expansion needs ``|h| << 1`` and, for massive fields, ``M |h| << 1``
    together with ``M^2 |h| <~ 1``.  The numeric thresholds are conservative
    readings of those inequalities.

    Returns
    -------
    list of str
        One message per violated condition (empty when all hold).
    """
    h = abs(float(h))
    out = []
    if h >= h_limit:
        out.append(f"|h| = {h:g} >= {h_limit:g}")
    if M * h >= mh_limit:
        out.append(f"M|h| = {M * h:g} >= {mh_limit:g}")
    if M * M * h > m2h_limit:
        out.append(f"M^2|h| = {M * M * h:g} > {m2h_limit:g}")
    if emit:
        for msg in out:
            warnings.warn(msg, PerturbativeRegimeWarning, stacklevel=2)
    return out


def _parity_factor(m, n):
    return 1 - (-1.0) ** (np.asarray(m) + np.asarray(n))


def scalar_alpha1(m, n, cfg):
    """Mode-mixing coefficient ``alpha1_mn`` of the scalar field.

    ``-pi^2 m n (1 - (-1)^(m+n)) / (sqrt(w_m w_n) (w_m - w_n)^3)``, zero on
    the diagonal and for modes of equal parity.
    """
    m = np.asarray(m)
    n = np.asarray(n)
    wm = scalar_frequency(m, cfg) * cfg.L
    wn = scalar_frequency(n, cfg) * cfg.L
    par = _parity_factor(m, n)
    diff = np.where(m == n, 1.0, wm - wn)
    val = -np.pi ** 2 * m * n * par / (np.sqrt(wm * wn) * diff ** 3)
    return np.where(m == n, 0.0, val)


def scalar_beta1(m, n, cfg):
    """Particle-creation coefficient ``beta1_mn`` of the scalar field."""
    m = np.asarray(m)
    n = np.asarray(n)
    wm = scalar_frequency(m, cfg) * cfg.L
    wn = scalar_frequency(n, cfg) * cfg.L
    return np.pi ** 2 * m * n * _parity_factor(m, n) / (np.sqrt(wm * wn) * (wm + wn) ** 3)


def _dirac_A1_from_momenta(m, n, km, kn, M):
    """Massive Dirac coefficient written in terms of the momenta."""
    wm = np.sign(km) * np.sqrt(M * M + km * km)
    wn = np.sign(kn) * np.sqrt(M * M + kn * kn)
    cm = km + wm
    cn = kn + wn
    par = (-1.0) ** (np.asarray(m) + np.asarray(n)) - 1.0
    same = np.asarray(m) == np.asarray(n)
    d1 = np.where(same, 1.0, cm - cn)
    d2 = cm * cn - M * M
    # pairs with w_m = -w_n have d2 == 0 at M == 0 as well as a vanishing
    # numerator; their coefficient is zero
    zero = same | (np.abs(cm + cn) == 0.0)
    d2 = np.where(zero, 1.0, d2)
    num = 2.0 * par * np.abs(km * kn) * cm ** 2 * cn ** 2 * (cm + cn) * (cm * cn + M * M)
    den = np.sqrt(wm ** 2 + M) * np.sqrt(wn ** 2 + M) * d1 ** 3 * d2 ** 3
    return np.where(zero, 0.0, num / den)


def dirac_A1(m, n, cfg):
    """First-order Dirac coefficient ``A1_mn`` for signed labels ``m, n``.

    Uses the massive closed form with ``C_k = k + w_k``.  For ``M = 0`` it
    equals ``((-1)^(m+n) - 1)(m + n + 1) / (2 pi^2 (m - n)^3)``.
    """
    m = np.asarray(m)
    n = np.asarray(n)
    unit = CavityConfig(DIRAC, cfg.mass, 1.0, 2)
    km = dirac_momenta(unit, np.atleast_1d(m)).reshape(m.shape)
    kn = dirac_momenta(unit, np.atleast_1d(n)).reshape(n.shape)
    return _dirac_A1_from_momenta(m, n, km, kn, cfg.mass)


def dirac_A1_massless(m, n):
    """Massless Dirac coefficient in closed form."""
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    same = m == n
    d = np.where(same, 1.0, m - n)
    return np.where(same, 0.0, ((-1.0) ** (m + n) - 1.0) * (m + n + 1.0) / (2 * np.pi ** 2 * d ** 3))


@dataclass
class BogoFirstOrder:
    """Tabulated one-way first-order coefficients over the window of ``cfg``.

    Attributes
    ----------
    kind : str
        ``"scalar"`` or ``"dirac"``.
    alpha1, beta1 : ndarray or None
        Scalar coefficients (rows/columns are labels ``1..n_max``).
    A1 : ndarray or None
        Dirac coefficients (labels ``-n_max..n_max-1``).
    cfg : CavityConfig
    """

    kind: str
    cfg: CavityConfig
    alpha1: np.ndarray = None
    beta1: np.ndarray = None
    A1: np.ndarray = None

    def matrices(self):
        """The coefficient matrices as a tuple (``(alpha1, beta1)`` or ``(A1,)``)."""
        if self.kind == SCALAR:
            return self.alpha1, self.beta1
        return (self.A1,)


def first_order(cfg):
    """Build :class:`BogoFirstOrder` for the window of ``cfg``."""
    labels = cfg.labels()
    m, n = np.meshgrid(labels, labels, indexing="ij")
    if cfg.field_kind == SCALAR:
        return BogoFirstOrder(SCALAR, cfg, alpha1=scalar_alpha1(m, n, cfg),
                              beta1=scalar_beta1(m, n, cfg))
    k = dirac_momenta(CavityConfig(DIRAC, cfg.mass, 1.0, cfg.n_max))
    km, kn = np.meshgrid(k, k, indexing="ij")
    return BogoFirstOrder(DIRAC, cfg, A1=_dirac_A1_from_momenta(m, n, km, kn, cfg.mass))


def parity_signs(labels):
    """Matrix of ``(-1)^(m+n)`` over a label window."""
    labels = np.asarray(labels)
    return (-1.0) ** np.add.outer(labels, labels)


def leftward(coeffs):
    """Coefficients for acceleration towards decreasing ``x``.

    Every entry is multiplied by ``(-1)^(m+n)``; the map is an involution.
    """
    sign = parity_signs(coeffs.cfg.labels())
    if coeffs.kind == SCALAR:
        return BogoFirstOrder(SCALAR, coeffs.cfg, alpha1=coeffs.alpha1 * sign,
                              beta1=coeffs.beta1 * sign)
    return BogoFirstOrder(DIRAC, coeffs.cfg, A1=coeffs.A1 * sign)


def asymptotic_class(m, n, cfg, which="alpha", M_lo=None, n_points=21):
    """Fit the large-mass power law of a first-order coefficient.

    Parameters
    ----------
    m, n : int
        Mode labels (signed for Dirac; opposite signs select beta-type).
    cfg : CavityConfig
        Supplies the field kind and the lower end of the mass range.
    which : {"alpha", "beta"}
        Scalar coefficient family.  Ignored for Dirac fields.
    M_lo : float, optional
        Start of the decade; defaults to ``max(cfg.M, 20)``.

    Returns
    -------
    dict
        ``exponent`` of ``|coefficient| ~ M^exponent`` and the fitted range.
    """
    lo = max(cfg.M, 20.0) if M_lo is None else float(M_lo)
    masses = np.geomspace(lo, 10 * lo, n_points)
    vals = []
    for M in masses:
        c = CavityConfig(cfg.field_kind, M, 1.0, 2)
        if cfg.field_kind == SCALAR:
            f = scalar_alpha1 if which == "alpha" else scalar_beta1
            vals.append(abs(float(f(m, n, c))))
        else:
            vals.append(abs(float(dirac_A1(m, n, c))))
    slope = np.polyfit(np.log(masses), np.log(vals), 1)[0]
    return {"exponent": float(slope), "M_range": (lo, 10 * lo)}


def _tail_fit(D, s_max, window=400):
    """Fit odd anti-diagonal sums with inverse powers and sum the tail.

    Returns the tail estimate beyond ``s_max`` and a crude uncertainty taken
    from the change when the fit basis is enlarged.
    """
    s = np.arange(len(D))
    odd = s[(s % 2 == 1) & (s > s_max - 2 * window) & (s <= s_max) & (D > 0)]
    if len(odd) < 10:
        return 0.0, float("inf")
    q = (s_max + 2) / 2.0
    est = []
    for powers in ((3, 4, 5), (3, 4, 5, 6)):
        A = np.array([odd ** (-float(p)) for p in powers]).T
        scale = odd ** 3.0
        coef, *_ = np.linalg.lstsq(A * scale[:, None], D[odd] * scale, rcond=None)
        est.append(sum(c * 2.0 ** (-p) * zeta(p, q) for c, p in zip(coef, powers)))
    return float(est[-1]), float(abs(est[-1] - est[0]))


def hs_sum(cfg, s_max=None):
    """Hilbert-Schmidt sum of the one-way particle-creation coefficients.

    Scalar: ``sum_{m,n >= 1} |beta1_mn|^2``.  Dirac:
    ``sum_{p >= 0, q < 0} |A1_pq|^2``.  Terms are summed along anti-diagonals
    up to ``s_max`` and the remainder is estimated by an inverse-power fit
    summed with Hurwitz zeta functions.

    Returns
    -------
    dict
        ``value`` (partial sum plus tail), ``partial``, ``tail`` and
        ``tail_error``.
    """
    M = cfg.mass
    if s_max is None:
        s_max = int(2001 + 200 * M)
    if s_max % 2 == 0:
        s_max += 1
    if cfg.field_kind == SCALAR:
        D = kernels.scalar_beta_antidiagonals(M, s_max)
    else:
        branches = np.arange(s_max, dtype=np.int64)
        if M == 0.0:
            x = (branches + 0.5) * np.pi
        else:
            x = kernels.dirac_roots(branches, M)
        D = kernels.dirac_beta_antidiagonals(M, x)
    partial = float(np.sum(D))
    tail, err = _tail_fit(D, s_max)
    return {"value": partial + tail, "partial": partial, "tail": tail,
            "tail_error": err, "s_max": s_max}


def hs_closed_form_massless(kind):
    """Closed forms of the massless Hilbert-Schmidt sums."""
    base = (28 * zeta(3) - 31 * zeta(5)) / np.pi ** 4
    return base / 48 if kind == SCALAR else base / 96


def hs_large_mass_limit(kind):
    """Limits of ``M^2`` times the Hilbert-Schmidt sum as ``M`` grows."""
    if kind == SCALAR:
        return 1.0 / (90 * np.pi ** 2)
    return 7.0 / (45 * np.pi ** 2) - 1.0 / 64
