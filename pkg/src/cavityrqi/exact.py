"""Exact Minkowski to Rindler Bogoliubov matrices for massless fields.

For a massless field the Rindler modes of a uniformly accelerated rigid
cavity are elementary functions of ``ln(x / chi_L)``, so the inner products
with the inertial modes reduce to one-dimensional integrals over the cavity
on the matching slice ``t = eta = 0``.  These integrals are evaluated with
composite Gauss-Legendre rules.  Negative ``h`` is handled by analytic
continuation of the same expressions (both wall positions become negative),
which describes a cavity accelerating towards decreasing ``x``.

The results serve as a nonperturbative oracle for the closed-form first-order
coefficients and as the numeric channel for second-order coefficients.
"""

from dataclasses import dataclass, field

import numpy as np

from .spectra import DIRAC, SCALAR, log_ratio, wall_positions


@dataclass
class ExactBogoMatrix:
    """Exact Bogoliubov matrices on a mode window.

    For the scalar field ``alpha`` and ``beta`` are indexed by labels
    ``1..n_max``; the Dirac matrix ``A`` is indexed by ``-n_max..n_max-1``.
    ``quad_error`` is the largest entry change between two quadrature rules.
    """

    kind: str
    h: float
    n_max: int
    alpha: np.ndarray = None
    beta: np.ndarray = None
    A: np.ndarray = None
    quad_error: float = 0.0
    meta: dict = field(default_factory=dict)

    def matrices(self):
        if self.kind == SCALAR:
            return self.alpha, self.beta
        return (self.A,)

    def crop(self, n_max):
        """Restrict to a smaller window."""
        if self.kind == SCALAR:
            return ExactBogoMatrix(SCALAR, self.h, n_max, self.alpha[:n_max, :n_max],
                                   self.beta[:n_max, :n_max], quad_error=self.quad_error,
                                   meta=dict(self.meta))
        off = self.n_max - n_max
        sl = slice(off, off + 2 * n_max)
        return ExactBogoMatrix(DIRAC, self.h, n_max, A=self.A[sl, sl],
                               quad_error=self.quad_error, meta=dict(self.meta))


def _nodes(h, L, n_panels, order):
    """Composite Gauss-Legendre nodes on the cavity ``[chi_L, chi_R]``."""
    chi_l, _ = wall_positions(h, L)
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, L, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    y = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    wy = (half[:, None] * w[None, :]).ravel()
    return chi_l + y, y, wy


def _scalar_integrals(h, n_max, L, n_panels, order):
    x, y, w = _nodes(h, L, n_panels, order)
    chi_l, _ = wall_positions(h, L)
    lr = log_ratio(h)
    n = np.arange(1, n_max + 1)
    omega = n * np.pi / L
    big_omega = n * np.pi / lr
    s_mink = np.sin(np.outer(n * np.pi / L, y)) / np.sqrt(omega * L)[:, None]
    xi = np.log(x / chi_l)
    s_rind = np.sin(np.outer(big_omega, xi)) / np.sqrt(n * np.pi)[:, None]
    rw = s_rind * w[None, :]
    first = rw @ (s_mink * omega[:, None]).T
    second = (rw * (1.0 / x)[None, :] * big_omega[:, None]) @ s_mink.T
    return first + second, first - second


def _dirac_integral(h, n_max, L, n_panels, order):
    x, y, w = _nodes(h, L, n_panels, order)
    chi_l, _ = wall_positions(h, L)
    lr = log_ratio(h)
    labels = np.arange(-n_max, n_max)
    omega = (labels + 0.5) * np.pi / L
    big_omega = (labels + 0.5) * np.pi / lr
    xi = np.log(x / chi_l)
    weight = w / np.sqrt(L * x * lr)
    ph_r = np.outer(big_omega, xi)
    ph_m = np.outer(omega, y)
    cr, sr = np.cos(ph_r) * weight[None, :], np.sin(ph_r) * weight[None, :]
    # cos(a - b) = cos a cos b + sin a sin b
    return cr @ np.cos(ph_m).T + sr @ np.sin(ph_m).T


def _panels(n_max, n_panels):
    return max(16, 2 * n_max) if n_panels is None else int(n_panels)


def exact_scalar_bogo(h, n_max, L=1.0, n_panels=None, order=24):
    """Exact one-way coefficients of the massless scalar field.

    ``alpha_mn = (phi~_m, phi_n)`` and ``beta_mn = -(phi~_m, phi_n^*)`` where
    ``phi~_m`` are the massless Rindler cavity modes and ``phi_n`` the
    inertial ones.  On the matching slice ``d/dt`` acts on Rindler modes as
    ``(1/x) d/deta``.

    Parameters
    ----------
    h : float
        Signed acceleration parameter, ``0 < |h| < 2``.
    n_max : int
        Window ``1..n_max``.
    L : float
    n_panels, order : int, optional
        Composite rule: ``n_panels`` panels with ``order`` nodes each.

    Returns
    -------
    ExactBogoMatrix
    """
    p = _panels(n_max, n_panels)
    a, b = _scalar_integrals(h, n_max, L, p, order)
    a2, b2 = _scalar_integrals(h, n_max, L, p, order // 2)
    err = float(max(np.max(np.abs(a - a2)), np.max(np.abs(b - b2))))
    return ExactBogoMatrix(SCALAR, float(h), int(n_max), alpha=a, beta=b, quad_error=err)


def exact_dirac_bogo(h, n_max, L=1.0, n_panels=None, order=24):
    """Exact one-way matrix ``A_mn = (psi_n, psi~_m)`` of the massless Dirac field.

    Labels run over ``-n_max..n_max-1``; the integrand reduces to
    ``cos(Omega_m ln(x/chi_L) - omega_n (x - chi_L)) / sqrt(L x ln(chi_R/chi_L))``.
    """
    p = _panels(n_max, n_panels)
    A = _dirac_integral(h, n_max, L, p, order)
    A2 = _dirac_integral(h, n_max, L, p, order // 2)
    return ExactBogoMatrix(DIRAC, float(h), int(n_max), A=A,
                           quad_error=float(np.max(np.abs(A - A2))))


def exact_bogo(kind, h, n_max, L=1.0, **kw):
    """Dispatch to :func:`exact_scalar_bogo` or :func:`exact_dirac_bogo`."""
    if kind == SCALAR:
        return exact_scalar_bogo(h, n_max, L, **kw)
    return exact_dirac_bogo(h, n_max, L, **kw)


# --------------------------------------------------------------------------
# identities

def bosonic_identity_residual(alpha, beta):
    """Largest violation of the bosonic Bogoliubov identities.

    Checks ``alpha alpha^dag - beta beta^dag = 1`` and
    ``alpha beta^T - beta alpha^T = 0`` on the supplied window.
    """
    n = alpha.shape[0]
    r1 = alpha @ alpha.conj().T - beta @ beta.conj().T - np.eye(n)
    r2 = alpha @ beta.T - beta @ alpha.T
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))


def fermionic_identity_residual(A):
    """Largest entry of ``A^dag A - 1``."""
    return float(np.max(np.abs(A.conj().T @ A - np.eye(A.shape[0]))))


def block_identity_residual(ex, n_block):
    """Identity residual of the rows of a leading mode block.

    The rows of the labels ``1..n_block`` (scalar) or
    ``-n_block..n_block-1`` (Dirac) are checked with the inner sums running
    over the whole window of ``ex``, so that a block well inside the window
    is free of truncation at its edge.
    """
    if ex.kind == SCALAR:
        a, b = ex.alpha[:n_block], ex.beta[:n_block]
        r1 = a @ a.conj().T - b @ b.conj().T - np.eye(n_block)
        r2 = a @ b.T - b @ a.T
        return float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))
    off = ex.n_max - n_block
    rows = ex.A[off:off + 2 * n_block]
    return float(np.max(np.abs(rows @ rows.conj().T - np.eye(2 * n_block))))


def symplectic_inverse(alpha, beta):
    """Inverse of the doubled bosonic matrix ``[[alpha, beta], [beta*, alpha*]]``.

    Returns the blocks ``(alpha^dag, -beta^T)`` of the inverse, i.e. the
    inverse is ``[[alpha^dag, -beta^T], [-beta^dag, alpha^T]]``.
    """
    return alpha.conj().T, -beta.T


def doubled(alpha, beta):
    """Doubled bosonic matrix ``[[alpha, beta], [beta*, alpha*]]``."""
    return np.block([[alpha, beta], [beta.conj(), alpha.conj()]])


def undouble(B):
    """Split a doubled matrix into ``(alpha, beta)``."""
    n = B.shape[0] // 2
    return B[:n, :n], B[:n, n:]


# --------------------------------------------------------------------------
# series extraction

@dataclass
class SeriesEstimate:
    """Numeric h-series coefficients with step-halving error estimates."""

    first: tuple
    second: tuple
    first_error: tuple
    second_error: tuple
    h: float

    def unstable(self, threshold=0.1):
        """Whether any error estimate exceeds ``threshold`` of the value scale."""
        for vals, errs in ((self.first, self.first_error), (self.second, self.second_error)):
            for v, e in zip(vals, errs):
                scale = np.max(np.abs(v))
                if scale > 0 and np.max(e) > threshold * scale:
                    return True
        return False


def extract_series(func, h, zero_order):
    """Richardson extraction of first and second h-series coefficients.

    Parameters
    ----------
    func : callable
        ``func(h)`` returns a tuple of matrices (for example
        ``(alpha, beta)``) evaluated exactly at signed ``h``.
    h : float
        Largest step; evaluations happen at ``+-h`` and ``+-h/2``.
    zero_order : tuple of ndarray
        The ``h -> 0`` limits of the matrices.

    Returns
    -------
    SeriesEstimate
        ``first[i]`` approximates ``d/dh`` and ``second[i]`` the
        ``h^2`` coefficient of the i-th matrix.
    """
    vals = {s: func(s) for s in (h, -h, h / 2, -h / 2)}
    first, second, e1, e2 = [], [], [], []
    for i, x0 in enumerate(zero_order):
        odd_h = (vals[h][i] - vals[-h][i]) / (2 * h)
        odd_half = (vals[h / 2][i] - vals[-h / 2][i]) / h
        even_h = ((vals[h][i] + vals[-h][i]) / 2 - x0) / h ** 2
        even_half = ((vals[h / 2][i] + vals[-h / 2][i]) / 2 - x0) / (h / 2) ** 2
        x1 = (4 * odd_half - odd_h) / 3
        x2 = (4 * even_half - even_h) / 3
        first.append(x1)
        second.append(x2)
        e1.append(np.abs(x1 - odd_half))
        e2.append(np.abs(x2 - even_half))
    return SeriesEstimate(tuple(first), tuple(second), tuple(e1), tuple(e2), float(h))


# --------------------------------------------------------------------------
# composed scenarios

def _rindler_phases(kind, h, seg, n_int, L):
    """Exact Rindler phases accumulated during one accelerated segment."""
    lr = log_ratio(abs(h))
    if seg.u is not None:
        eta = 2.0 * seg.u * lr
    else:
        eta = abs(h) * seg.tau / L
    if kind == SCALAR:
        big_omega = np.arange(1, n_int + 1) * np.pi / lr
    else:
        big_omega = (np.arange(-n_int, n_int) + 0.5) * np.pi / lr
    return np.exp(1j * big_omega * eta)


def _inertial_phases(kind, tau, n_int, L):
    if kind == SCALAR:
        w = np.arange(1, n_int + 1) * np.pi / L
    else:
        w = (np.arange(-n_int, n_int) + 0.5) * np.pi / L
    return np.exp(1j * w * tau)


def exact_compose(kind, scenario, n_max, n_int=None, h=None, L=1.0, **quad):
    """Exact Bogoliubov matrices of a massless travel scenario.

    Each accelerated segment contributes ``B^-1 G~ B`` built from the exact
    one-way matrix ``B`` (doubled for bosons, unitary ``A`` for fermions)
    and the Rindler phases ``G~``; coasting contributes the inertial phases.
    The product is taken on an internal window ``n_int`` and cropped to
    ``n_max`` so that truncation effects stay away from the reported block.

    Parameters
    ----------
    kind : {"scalar", "dirac"}
    scenario : TravelScenario
        Only uniform acceleration and coasting segments are supported.
    n_max : int
        Reported window.
    n_int : int, optional
        Internal window, default ``4 * n_max``.
    h : float, optional
        Overrides ``scenario.h`` (used for numeric series extraction).

    Returns
    -------
    ExactBogoMatrix
    """
    from .scenario import Coast, UniformAccel

    h_ref = scenario.h if h is None else float(h)
    n_int = 4 * n_max if n_int is None else int(n_int)
    size = n_int if kind == SCALAR else 2 * n_int
    cache = {}
    worst = 0.0
    if kind == SCALAR:
        total = np.eye(2 * size, dtype=complex)
    else:
        total = np.eye(size, dtype=complex)
    for seg in scenario.segments:
        if isinstance(seg, Coast):
            g = _inertial_phases(kind, seg.tau, n_int, L)
            step = np.diag(np.concatenate([g, g.conj()])) if kind == SCALAR else np.diag(g)
        elif isinstance(seg, UniformAccel):
            hi = seg.eps * h_ref
            if hi not in cache:
                cache[hi] = exact_bogo(kind, hi, n_int, L, **quad)
            ex = cache[hi]
            worst = max(worst, ex.quad_error)
            g = _rindler_phases(kind, hi, seg, n_int, L)
            if kind == SCALAR:
                fwd = doubled(ex.alpha, ex.beta)
                inv = doubled(*symplectic_inverse(ex.alpha, ex.beta))
                step = inv @ (np.concatenate([g, g.conj()])[:, None] * fwd)
            else:
                step = ex.A.conj().T @ (g[:, None] * ex.A)
        else:
            raise TypeError(f"exact composition does not support {type(seg).__name__}")
        total = step @ total
    if kind == SCALAR:
        a, b = undouble(total)
        out = ExactBogoMatrix(SCALAR, h_ref, n_int, alpha=a, beta=b, quad_error=worst)
    else:
        out = ExactBogoMatrix(DIRAC, h_ref, n_int, A=total, quad_error=worst)
    out.meta["n_int"] = n_int
    return out.crop(n_max)


def composed_series(kind, scenario, n_max, h=None, n_int=None, **quad):
    """Numeric first- and second-order coefficients of a composed scenario.

    Exact compositions at ``+-h`` and ``+-h/2`` are combined by
    :func:`extract_series`.  The zero-order matrices are the free phases.
    """
    h = scenario.h if h is None else float(h)
    g = _inertial_phases(kind, scenario.total_proper_time(), n_max, 1.0)
    if kind == SCALAR:
        zero = (np.diag(g), np.zeros((n_max, n_max), dtype=complex))
    else:
        zero = (np.diag(g),)

    def func(x):
        return exact_compose(kind, scenario, n_max, n_int=n_int, h=x, **quad).matrices()

    return extract_series(func, h, zero)
