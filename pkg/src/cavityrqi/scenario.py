"""Perturbative Bogoliubov transformations for generic travel scenarios.

A travel scenario is an ordered list of segments that start and end in
inertial motion: periods of uniform acceleration (building blocks), inertial
coasting, and smoothly varying acceleration.  To first order in the reference
acceleration ``h`` every segment contributes a term proportional to the
one-way Minkowski to Rindler coefficients dressed by free phases
``G0_n(tau) = exp(i w_n tau)``.

Segments are composed in the doubled (alpha, beta) representation for bosons
and as a single unitary for fermions, later segments acting from the left.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bogo import first_order, regime_warnings
from .spectra import DIRAC, SCALAR, CavityConfig, frequencies


# --------------------------------------------------------------------------
# segments

@dataclass(frozen=True)
class UniformAccel:
    """Uniform proper acceleration ``eps * h / L`` at the cavity centre.

    Exactly one of ``u`` and ``tau`` fixes the duration.  ``tau`` is the
    proper time at the cavity centre.  ``u = h tau / (4 L artanh(h/2))`` is the
    dimensionless duration in which massless building blocks are periodic;
    to leading order it corresponds to ``tau = 2 u L``.
    """

    eps: float = 1.0
    u: Optional[float] = None
    tau: Optional[float] = None

    def __post_init__(self):
        if (self.u is None) == (self.tau is None):
            raise ValueError("give exactly one of u and tau")
        if (self.u if self.u is not None else self.tau) < 0:
            raise ValueError("durations must be non-negative")

    def leading_duration(self, L=1.0):
        """Proper time at the centre to leading order in ``h``."""
        return 2.0 * self.u * L if self.u is not None else float(self.tau)


@dataclass(frozen=True)
class Coast:
    """Inertial coasting for proper time ``tau``."""

    tau: float

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("durations must be non-negative")

    def leading_duration(self, L=1.0):
        return float(self.tau)


@dataclass(frozen=True)
class Smooth:
    """Smoothly varying acceleration ``h(t) = h * profile(t)`` for ``0 <= t <= duration``.

    Without a ``profile`` the sinusoid ``a0 * sin(omega_c t)`` is used and its
    Fourier integral is evaluated in closed form.
    """

    duration: float
    profile: Optional[Callable] = None
    a0: float = 1.0
    omega_c: Optional[float] = None

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("durations must be non-negative")
        if self.profile is None and self.omega_c is None:
            raise ValueError("smooth segment needs a profile or omega_c")

    def leading_duration(self, L=1.0):
        return float(self.duration)


@dataclass
class TravelScenario:
    """Ordered segments sharing the reference acceleration ``h``.

    The first segment acts first.  Each accelerated segment carries
    ``h_i = eps_i * h``.
    """

    segments: list
    h: float = 0.01

    def accelerations(self):
        """Signed accelerations ``h_i`` of the uniformly accelerated segments."""
        return [s.eps * self.h for s in self.segments if isinstance(s, UniformAccel)]

    def total_proper_time(self, L=1.0):
        """Total proper time at the centre to leading order in ``h``."""
        return sum(s.leading_duration(L) for s in self.segments)

    def validate(self):
        for hi in self.accelerations():
            if not abs(hi) < 2:
                raise ValueError(f"|h_i| = {abs(hi)} must be below 2")
        return True

    def guard_messages(self, cfg):
        """Perturbative-regime warnings for every accelerated segment."""
        out = []
        for hi in self.accelerations():
            out += regime_warnings(hi, cfg.mass, emit=False)
        return sorted(set(out))


def building_block(u=None, tau=None, eps=1.0, h=0.01):
    """Scenario of a single building block."""
    return TravelScenario([UniformAccel(eps, u=u, tau=tau)], h)


def alpha_centauri(tau_tilde, tau_coast, h=0.01):
    """Two opposite building blocks separated by inertial coasting."""
    return TravelScenario([UniformAccel(1.0, tau=tau_tilde), Coast(tau_coast),
                           UniformAccel(-1.0, tau=tau_tilde)], h)


def repeated_blocks(n_blocks, u, h=0.01, L=1.0):
    """``n_blocks`` identical blocks of duration ``u/2`` separated by coasts.

    Every block has dimensionless duration ``u / 2`` and every coast lasts the
    same proper time ``u L`` (the block duration to leading order), so one
    repetition spans ``tau = 2 u L``.
    """
    segs = []
    for i in range(n_blocks):
        if i:
            segs.append(Coast(u * L))
        segs.append(UniformAccel(1.0, u=u / 2.0))
    return TravelScenario(segs, h)


# --------------------------------------------------------------------------
# composed first order

@dataclass
class ComposedFirstOrder:
    """Zero- and first-order data of a composed transformation.

    ``G0`` holds the free phases over the full scenario; ``alpha1``/``beta1``
    (scalar) or ``A1`` (Dirac) are the first-order matrices in units of the
    reference acceleration ``h_ref``.
    """

    kind: str
    cfg: CavityConfig
    G0: np.ndarray
    h_ref: float
    alpha1: np.ndarray = None
    beta1: np.ndarray = None
    A1: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def matrices(self):
        if self.kind == SCALAR:
            return self.alpha1, self.beta1
        return (self.A1,)

    def index(self, label):
        return self.cfg.index(label)


def phases(cfg, tau, labels=None):
    """Free phases ``G0_n(tau) = exp(i w_n tau)`` with the field's spectrum."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    return np.exp(1j * frequencies(cfg, labels) * tau)


def _block_phase_time(seg, cfg):
    return seg.leading_duration(cfg.L)


def building_block_first_order(h, tau_tilde, cfg, one_way=None):
    """First order of a single block of duration ``tau_tilde``.

    ``alpha1_mn = a_mn (G_m - G_n)``, ``beta1_mn = b_mn (G_m - G_n^*)`` and
    ``A1_mn = A_mn (G_m - G_n)`` with the one-way coefficients ``a, b, A``.
    The sign of ``h`` selects the direction of acceleration; the result is
    expressed per unit ``|h|``.
    """
    sc = TravelScenario([UniformAccel(1.0 if h > 0 else -1.0, tau=tau_tilde)], abs(h))
    return compose(sc, cfg, one_way=one_way)


def _segment_first_order(seg, cfg, one_way):
    """Zero-order phases and doubled/unitary first order of one segment."""
    w = frequencies(cfg)
    n = len(w)
    if isinstance(seg, Coast):
        return np.exp(1j * w * seg.tau), None
    if isinstance(seg, UniformAccel):
        g = np.exp(1j * w * _block_phase_time(seg, cfg))
        if cfg.field_kind == SCALAR:
            a, b = one_way.alpha1, one_way.beta1
            a1 = seg.eps * a * (g[:, None] - g[None, :])
            b1 = seg.eps * b * (g[:, None] - g.conj()[None, :])
            return g, (a1, b1)
        A1 = seg.eps * one_way.A1 * (g[:, None] - g[None, :])
        return g, (A1,)
    if isinstance(seg, Smooth):
        T = seg.duration
        g = np.exp(1j * w * T)
        diff = w[:, None] - w[None, :]
        if cfg.field_kind == SCALAR:
            summ = w[:, None] + w[None, :]
            a1 = 1j * diff * one_way.alpha1 * g[:, None] * _fourier(seg, diff)
            b1 = 1j * summ * one_way.beta1 * g[:, None] * _fourier(seg, summ)
            np.fill_diagonal(a1, 0.0)
            return g, (a1, b1)
        A1 = 1j * diff * one_way.A1 * g[:, None] * _fourier(seg, diff)
        np.fill_diagonal(A1, 0.0)
        return g, (A1,)
    raise TypeError(f"unknown segment {seg!r}")


def _fourier(seg, kappa):
    """``int_0^T exp(-i kappa t) profile(t) dt`` elementwise over ``kappa``."""
    T = seg.duration
    kappa = np.asarray(kappa, dtype=float)
    if seg.profile is None:
        wc = seg.omega_c

        def expint(k):
            # int_0^T exp(i k t) dt
            small = np.abs(k * T) < 1e-8
            ksafe = np.where(small, 1.0, k)
            return np.where(small, T + 0.5j * k * T * T, (np.exp(1j * ksafe * T) - 1) / (1j * ksafe))

        # sin(wc t) = (e^{i wc t} - e^{-i wc t}) / 2i
        return seg.a0 * (expint(wc - kappa) - expint(-wc - kappa)) / 2j
    # Gauss-Legendre panels resolving the fastest oscillation
    kmax = float(np.max(np.abs(kappa))) if kappa.size else 0.0
    n_panels = max(8, int(math.ceil(kmax * T / math.pi)) + 8)
    t, wts = np.polynomial.legendre.leggauss(24)
    edges = np.linspace(0.0, T, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    tt = (mid[:, None] + half[:, None] * t).ravel()
    ww = (half[:, None] * wts).ravel() * np.array([seg.profile(x) for x in tt])
    flat = kappa.ravel()
    vals = np.exp(-1j * np.outer(flat, tt)) @ ww
    return vals.reshape(kappa.shape)


def compose(scenario, cfg, one_way=None):
    """First-order Bogoliubov matrices of a travel scenario.

    Parameters
    ----------
    scenario : TravelScenario
    cfg : CavityConfig
        Field, mass and mode window.
    one_way : BogoFirstOrder, optional
        Precomputed one-way coefficients for ``cfg``.

    Returns
    -------
    ComposedFirstOrder
        First-order matrices per unit reference acceleration ``scenario.h``.
    """
    scenario.validate()
    if one_way is None:
        one_way = first_order(cfg)
    n = len(cfg.labels())
    g_tot = np.ones(n, dtype=complex)
    if cfg.field_kind == SCALAR:
        a1 = np.zeros((n, n), dtype=complex)
        b1 = np.zeros((n, n), dtype=complex)
        for seg in scenario.segments:
            g, first = _segment_first_order(seg, cfg, one_way)
            # (S0, S1) o (T0, T1) = (S0 T0, S0 T1 + S1 T0) in doubled form
            a1 = g[:, None] * a1
            b1 = g[:, None] * b1
            if first is not None:
                sa, sb = first
                a1 = a1 + sa * g_tot[None, :]
                b1 = b1 + sb * g_tot.conj()[None, :]
            g_tot = g * g_tot
        return ComposedFirstOrder(SCALAR, cfg, g_tot, scenario.h, alpha1=a1, beta1=b1,
                                  meta={"guards": scenario.guard_messages(cfg)})
    A1 = np.zeros((n, n), dtype=complex)
    for seg in scenario.segments:
        g, first = _segment_first_order(seg, cfg, one_way)
        A1 = g[:, None] * A1
        if first is not None:
            A1 = A1 + first[0] * g_tot[None, :]
        g_tot = g * g_tot
    return ComposedFirstOrder(DIRAC, cfg, g_tot, scenario.h, A1=A1,
                              meta={"guards": scenario.guard_messages(cfg)})


def smooth_first_order(profile, tau0, tau, cfg, one_way=None, h_ref=1.0):
    """First order for a smoothly varying acceleration on ``[tau0, tau]``.

    ``profile`` is either a callable returning ``h(t) / h_ref`` or a mapping
    with keys ``a0`` and ``omega_c`` describing ``a0 sin(omega_c t)``.
    """
    if callable(profile):
        seg = Smooth(tau - tau0, profile=lambda t: profile(t + tau0))
    else:
        a0 = profile.get("a0", 1.0)
        wc = profile["omega_c"]
        if tau0:
            seg = Smooth(tau - tau0, profile=lambda t: a0 * np.sin(wc * (t + tau0)))
        else:
            seg = Smooth(tau - tau0, a0=a0, omega_c=wc)
    return compose(TravelScenario([seg], h_ref), cfg, one_way=one_way)


def identity_residuals(c):
    """Largest violation of the first-order Bogoliubov identities.

    Bosons: ``G*_m a_mn + G_n a*_nm = 0`` and ``G*_m b_mn - G*_n b_nm = 0``.
    Fermions: ``G*_m A_mn + G_n A*_nm = 0``.
    """
    g = c.G0
    if c.kind == SCALAR:
        ra = g.conj()[:, None] * c.alpha1 + (g[:, None] * c.alpha1.conj()).T
        rb = g.conj()[:, None] * c.beta1 - (g.conj()[:, None] * c.beta1).T
        return float(max(np.max(np.abs(ra)), np.max(np.abs(rb))))
    ra = g.conj()[:, None] * c.A1 + (g[:, None] * c.A1.conj()).T
    return float(np.max(np.abs(ra)))


def second_order_identity_rhs(c, m, n):
    """Right-hand sides of the second-order Bogoliubov identities.

    Returns
    -------
    tuple
        Bosons: ``(-sum_l (a*_lm a_ln - b_lm b*_ln), -sum_l (a*_lm b_ln - b_lm a*_ln), None)``.
        Fermions: ``(None, None, -sum_l A*_lm A_ln)``.
    """
    i, j = c.index(m), c.index(n)
    if c.kind == SCALAR:
        a, b = c.alpha1, c.beta1
        ra = -np.sum(a[:, i].conj() * a[:, j] - b[:, i] * b[:, j].conj())
        rb = -np.sum(a[:, i].conj() * b[:, j] - b[:, i] * a[:, j].conj())
        return complex(ra), complex(rb), None
    A = c.A1
    return None, None, complex(-np.sum(A[:, i].conj() * A[:, j]))


# --------------------------------------------------------------------------
# text format

def parse_scenario(text):
    """Parse a scenario description in TOML.

    Each segment is an entry of the array of tables ``[[segment]]`` with keys
    ``type`` (``accel``, ``coast`` or ``smooth``), ``h`` (signed, accelerated
    segments), ``duration_u`` or ``duration_tau``, and for smooth segments
    ``profile = "sin"``, ``a0`` and ``omega_c``.  The reference acceleration
    is the largest ``|h|``; segment accelerations become ``eps * h``.

    Returns
    -------
    TravelScenario
    """
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    data = tomllib.loads(text)
    raw = data.get("segment", [])
    if not raw:
        raise ValueError("scenario has no [[segment]] entries")
    hs = [abs(float(s["h"])) for s in raw if s.get("type") in ("accel", "smooth") and "h" in s]
    h_ref = max(hs) if hs else float(data.get("h", 0.01))
    segs = []
    for s in raw:
        kind = s.get("type")
        if kind == "accel":
            eps = float(s["h"]) / h_ref
            if "duration_u" in s:
                segs.append(UniformAccel(eps, u=float(s["duration_u"])))
            else:
                segs.append(UniformAccel(eps, tau=float(s["duration_tau"])))
        elif kind == "coast":
            segs.append(Coast(float(s["duration_tau"])))
        elif kind == "smooth":
            if s.get("profile", "sin") != "sin":
                raise ValueError("only the 'sin' profile is available in text scenarios")
            amp = float(s.get("a0", s.get("h", h_ref))) / h_ref
            segs.append(Smooth(float(s["duration_tau"]), a0=amp, omega_c=float(s["omega_c"])))
        else:
            raise ValueError(f"unknown segment type {kind!r}")
    return TravelScenario(segs, h_ref)
