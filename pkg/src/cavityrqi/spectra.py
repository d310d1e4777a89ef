"""Mode spectra of scalar and Dirac fields in a rigid (1+1)-dimensional cavity.

Frequencies are returned in units of ``1/L``.  Scalar modes carry labels
``n >= 1``.  Dirac modes carry signed labels: ``n >= 0`` are positive
frequency (particle) modes and ``n < 0`` negative frequency (antiparticle)
modes, with the mirror relation ``k_{-n-1} = -k_n``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels

SCALAR = "scalar"
DIRAC = "dirac"


class InvalidModeError(ValueError):
    """Raised for mode labels outside the admissible range."""


class AccelerationRangeError(ValueError):
    """Raised when ``h`` lies outside ``0 < |h| < 2``."""


@dataclass(frozen=True)
class CavityConfig:
    """Field and cavity parameters shared by every module.

    Parameters
    ----------
    field_kind : {"scalar", "dirac"}
        Which field is confined in the cavity.
    M : float
        Dimensionless mass ``m L``.
    L : float
        Proper length of the cavity.
    n_max : int
        Size of the mode window.  Scalar windows hold labels ``1..n_max``;
        Dirac windows hold ``-n_max..n_max-1``.
    transverse : tuple of float
        Optional transverse momenta (units of ``1/L``).  They are folded into
        the effective mass ``sqrt(M**2 + sum(k_perp**2 L**2))``.
    """

    field_kind: str = SCALAR
    M: float = 0.0
    L: float = 1.0
    n_max: int = 20
    transverse: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.field_kind not in (SCALAR, DIRAC):
            raise ValueError(f"unknown field kind {self.field_kind!r}")
        if self.M < 0:
            raise ValueError("mass parameter M must be non-negative")
        if self.L <= 0:
            raise ValueError("cavity length L must be positive")
        if int(self.n_max) < 2:
            raise ValueError("n_max must be at least 2")

    @property
    def mass(self):
        """Effective dimensionless mass including transverse momenta."""
        kperp = np.asarray(self.transverse, dtype=float) * self.L
        return float(np.sqrt(self.M ** 2 + np.sum(kperp ** 2)))

    def labels(self):
        """Mode labels of the window, in storage order."""
        if self.field_kind == SCALAR:
            return np.arange(1, self.n_max + 1)
        return np.arange(-self.n_max, self.n_max)

    def index(self, label):
        """Storage index of a mode label inside the window."""
        label = int(label)
        if self.field_kind == SCALAR:
            if not 1 <= label <= self.n_max:
                raise InvalidModeError(f"scalar mode {label} outside 1..{self.n_max}")
            return label - 1
        if not -self.n_max <= label < self.n_max:
            raise InvalidModeError(
                f"Dirac mode {label} outside {-self.n_max}..{self.n_max - 1}")
        return label + self.n_max

    def with_window(self, n_max):
        """Copy of the configuration with a different window size."""
        return CavityConfig(self.field_kind, self.M, self.L, int(n_max), self.transverse)


def _check_h(h):
    h = float(h)
    if not 0.0 < abs(h) < 2.0:
        raise AccelerationRangeError(f"|h| must lie in (0, 2), got {h}")
    return h


def wall_positions(h, L=1.0):
    """Rindler positions ``(chi_L, chi_R)`` of the two cavity walls.

    The centre of the cavity has proper acceleration ``h / L``.  For
    negative ``h`` the same expressions are used; both positions are then
    negative, which describes the mirrored (leftward) configuration.
    """
    h = _check_h(h)
    return (1.0 / h - 0.5) * L, (1.0 / h + 0.5) * L


def log_ratio(h):
    """``ln(chi_R / chi_L) = 2 artanh(h/2)`` for the rigid cavity."""
    h = _check_h(h)
    return 2.0 * np.arctanh(h / 2.0)


def scalar_frequency(n, cfg):
    """Inertial frequency ``sqrt(M^2 + (pi n)^2) / L`` of scalar mode ``n``.

    Examples
    --------
    >>> round(scalar_frequency(1, CavityConfig()), 12) == round(np.pi, 12)
    True
    """
    n_arr = np.asarray(n)
    if np.any(n_arr < 1):
        raise InvalidModeError("scalar mode labels start at 1")
    return np.sqrt(cfg.mass ** 2 + (np.pi * n_arr) ** 2) / cfg.L


def scalar_rindler_frequency(n, h, L=1.0):
    """Massless Rindler frequency of scalar mode ``n`` and its proper value.

    Returns
    -------
    omega_rindler : float or ndarray
        Dimensionless ``Omega_n = n pi / (2 artanh(h/2))``.
    omega_proper : float or ndarray
        Frequency ``h Omega_n / L`` measured at the cavity centre.
    """
    n_arr = np.asarray(n)
    if np.any(n_arr < 1):
        raise InvalidModeError("scalar mode labels start at 1")
    big_omega = n_arr * np.pi / log_ratio(h)
    return big_omega, h * big_omega / L


def dirac_momenta(cfg, labels=None):
    """Momenta ``k_n`` (units ``1/L``) for signed Dirac labels.

    For ``M = 0`` these are ``(n + 1/2) pi / L``.  Otherwise ``k_n L`` is the
    root of ``tan(x)/x = -1/M`` inside ``((n + 1/2) pi, (n + 1) pi)``, found by
    bisection.

    Parameters
    ----------
    cfg : CavityConfig
    labels : array_like of int, optional
        Defaults to the window of ``cfg``.

    Returns
    -------
    numpy.ndarray
    """
    if labels is None:
        labels = cfg.labels()
    labels = np.asarray(labels, dtype=int)
    branch = np.where(labels >= 0, labels, -labels - 1)
    sign = np.where(labels >= 0, 1.0, -1.0)
    if cfg.mass == 0.0:
        x = (branch + 0.5) * np.pi
    else:
        uniq, inverse = np.unique(branch, return_inverse=True)
        x = kernels.dirac_roots(uniq.astype(np.int64), cfg.mass)[inverse]
    return sign * x / cfg.L


def dirac_frequency(k, cfg):
    """Signed frequency ``sgn(k) sqrt(m^2 + k^2)``."""
    k = np.asarray(k, dtype=float)
    if np.any(k == 0):
        raise InvalidModeError("the Dirac cavity has no zero mode")
    m = cfg.mass / cfg.L
    return np.sign(k) * np.sqrt(m ** 2 + k ** 2)


def dirac_rindler_frequency(n, h):
    """Massless Rindler frequency ``(n + 1/2) pi / (2 artanh(h/2))``."""
    return (np.asarray(n) + 0.5) * np.pi / log_ratio(h)


def frequencies(cfg, labels=None):
    """Inertial frequencies of the window (either field), units ``1/L``."""
    if cfg.field_kind == SCALAR:
        return scalar_frequency(cfg.labels() if labels is None else labels, cfg)
    return dirac_frequency(dirac_momenta(cfg, labels), cfg)
