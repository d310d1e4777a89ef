"""Degenerate perturbation theory for matrices expanded in a small parameter.

Given ``rho = rho0 + h rho1 + h^2 rho2`` the unperturbed eigenvalues are
grouped into degenerate blocks.  Inside each block the first-order
corrections are the eigenvalues of ``rho1`` restricted to the block, and the
second-order corrections come from the effective operator

    W = P rho2 P + sum_{q outside} P rho1 |q><q| rho1 P / (lambda0 - lambda_q)

restricted to each first-order sub-block.  When ``rho1`` vanishes on a block
this reduces to diagonalising ``P rho2 P`` plus the coupling term, which is
what partial transposes of perturbed density matrices need.  Diagonalisable
non-Hermitian inputs (symplectic generators) are handled with biorthogonal
left and right eigenvectors.
"""

import warnings
from dataclasses import dataclass

import numpy as np


class IllConditionedWarning(UserWarning):
    """Unperturbed eigenvalues are closer than ten times the tolerance."""


@dataclass
class PerturbedMatrix:
    """Coefficients of ``rho0 + h rho1 + h^2 rho2``."""

    rho0: np.ndarray
    rho1: np.ndarray
    rho2: np.ndarray = None
    h: float = None

    def __post_init__(self):
        self.rho0 = np.asarray(self.rho0, dtype=complex)
        self.rho1 = np.asarray(self.rho1, dtype=complex)
        if self.rho2 is None:
            self.rho2 = np.zeros_like(self.rho0)
        self.rho2 = np.asarray(self.rho2, dtype=complex)
        shapes = {self.rho0.shape, self.rho1.shape, self.rho2.shape}
        if len(shapes) != 1 or self.rho0.ndim != 2 or self.rho0.shape[0] != self.rho0.shape[1]:
            raise ValueError("rho0, rho1 and rho2 must be square and of equal size")

    def evaluate(self, h=None):
        """The full matrix at ``h`` (defaults to the stored value)."""
        h = self.h if h is None else h
        return self.rho0 + h * self.rho1 + h * h * self.rho2


@dataclass
class EigenCorrection:
    """One perturbed eigenvalue ``lambda0 + h lambda1 + h^2 lambda2``."""

    lambda0: float
    lambda1: complex
    lambda2: complex

    def value(self, h):
        return self.lambda0 + h * self.lambda1 + h * h * self.lambda2


def _is_hermitian(a):
    return np.allclose(a, a.conj().T, atol=1e-13, rtol=0)


def _eigensystem(a):
    """Eigenvalues with right and left (biorthogonal) eigenvectors."""
    if _is_hermitian(a):
        vals, right = np.linalg.eigh(a)
        return vals.astype(complex), right, right.conj().T
    vals, right = np.linalg.eig(a)
    order = np.lexsort((vals.imag, vals.real))
    vals, right = vals[order], right[:, order]
    return vals, right, np.linalg.inv(right)


def _groups(vals, tol):
    """Consecutive groups of (sorted) eigenvalues closer than ``tol``."""
    groups = [[0]] if len(vals) else []
    for i in range(1, len(vals)):
        if abs(vals[i] - vals[groups[-1][0]]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _check_conditioning(vals, groups, tol):
    reps = [vals[g[0]] for g in groups]
    for a, b in zip(reps, reps[1:]):
        if abs(b - a) < 10 * tol:
            warnings.warn(f"unperturbed eigenvalues {a.real:.3g} and {b.real:.3g} are nearly "
                          "degenerate", IllConditionedWarning, stacklevel=3)


def eigen_corrections(pm, tol=1e-10):
    """First- and second-order eigenvalue corrections.

    Parameters
    ----------
    pm : PerturbedMatrix
    tol : float
        Absolute tolerance grouping unperturbed eigenvalues (and first-order
        corrections within a block) into degenerate sets.

    Returns
    -------
    list of EigenCorrection
        Sorted by ``lambda0`` and then by ``lambda1``.  For Hermitian input
        all corrections are real up to rounding.
    """
    vals, right, left = _eigensystem(pm.rho0)
    groups = _groups(vals, tol)
    _check_conditioning(vals, groups, tol)
    r1 = left @ pm.rho1 @ right
    r2 = left @ pm.rho2 @ right
    out = []
    for g in groups:
        lam0 = vals[g].mean()
        rest = np.array([i for i in range(len(vals)) if i not in g], dtype=int)
        denom = lam0 - vals[rest]
        w = r2[np.ix_(g, g)] + (r1[np.ix_(g, rest)] / denom[None, :]) @ r1[np.ix_(rest, g)]
        block1 = r1[np.ix_(g, g)]
        e1, u1, w1 = _eigensystem(block1)
        for sub in _groups(e1, tol):
            proj = w1[sub] @ w @ u1[:, sub]
            e2 = np.linalg.eigvals(proj)
            e2 = e2[np.lexsort((e2.imag, e2.real))]
            for val2 in e2:
                out.append(EigenCorrection(_real(lam0), _real(e1[sub].mean()), _real(val2)))
    out.sort(key=lambda c: (np.real(c.lambda0), np.real(c.lambda1), np.real(c.lambda2)))
    return out


def _real(z, tol=1e-12):
    z = complex(z)
    return z.real if abs(z.imag) <= tol * max(1.0, abs(z.real)) else z


def corrected_spectrum(pm, h=None, tol=1e-10):
    """Eigenvalues ``lambda0 + h lambda1 + h^2 lambda2`` at ``h``."""
    h = pm.h if h is None else h
    return np.array([c.value(h) for c in eigen_corrections(pm, tol)])


def vacuum_style_second_order(pm, tol=1e-10):
    """Spectrum of a perturbed pure state via the diagonalising-unitary ansatz.

    ``rho0`` must be ``diag(1, 0, ..., 0)`` and ``rho1`` must couple the first
    basis state to the rest only.  With ``v1 = rho1[1:, 0]`` the unitary
    ``U = 1 + h K1 + h^2 K2`` (anti-Hermitian ``K1`` built from ``v1``) brings
    the matrix to block-diagonal form to second order.

    Returns
    -------
    numpy.ndarray
        ``[lambda_1, lambda_2, ...]`` as second-order coefficients: the first
        entry is the ``h^2`` coefficient of the correction to the eigenvalue 1,
        the remaining entries are the ``h^2`` coefficients of the eigenvalues
        that vanish at ``h = 0``.
    """
    n = pm.rho0.shape[0]
    target = np.zeros((n, n))
    target[0, 0] = 1.0
    if not np.allclose(pm.rho0, target, atol=tol):
        raise ValueError("rho0 must be the projector onto the first basis state")
    if np.max(np.abs(pm.rho1[0, 0])) > tol or np.max(np.abs(pm.rho1[1:, 1:])) > tol:
        raise ValueError("rho1 must only couple the first basis state to the rest")
    v1 = pm.rho1[1:, 0]
    v2 = pm.rho2[1:, 0]
    K1 = np.zeros((n, n), dtype=complex)
    K1[0, 1:] = v1.conj()
    K1[1:, 0] = -v1
    K2 = np.zeros((n, n), dtype=complex)
    K2[0, 0] = -0.5 * np.vdot(v1, v1)
    K2[0, 1:] = v2.conj()
    K2[1:, 0] = -v2
    K2[1:, 1:] = -0.5 * np.outer(v1, v1.conj())
    # second-order coefficient of U rho U^dag with U = 1 + h K1 + h^2 K2
    r0, r1, r2 = pm.rho0, pm.rho1, pm.rho2
    second = (r2 + K1 @ r1 + r1 @ K1.conj().T + K2 @ r0 + r0 @ K2.conj().T
              + K1 @ r0 @ K1.conj().T)
    first = r1 + K1 @ r0 + r0 @ K1.conj().T
    if np.max(np.abs(first)) > 1e-12 * max(1.0, np.max(np.abs(r1))):
        raise ArithmeticError("ansatz failed to remove first-order terms")
    lam1 = second[0, 0].real
    rest = np.linalg.eigvalsh(0.5 * (second[1:, 1:] + second[1:, 1:].conj().T))
    return np.concatenate([[lam1], rest[::-1]])
