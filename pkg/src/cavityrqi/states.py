"""Small density-matrix helpers shared by the bosonic and fermionic modules."""

from dataclasses import dataclass

import numpy as np

from .perturb import PerturbedMatrix, eigen_corrections


def partial_transpose(rho, dims, sys=1):
    """Partial transpose of a bipartite matrix with subsystem sizes ``dims``."""
    da, db = dims
    r = np.asarray(rho).reshape(da, db, da, db)
    if sys == 1:
        r = r.transpose(0, 3, 2, 1)
    else:
        r = r.transpose(2, 1, 0, 3)
    return r.reshape(da * db, da * db)


def negativity(rho, dims):
    """Sum of the moduli of the negative eigenvalues of the partial transpose."""
    ev = np.linalg.eigvalsh(_herm(partial_transpose(rho, dims)))
    return float(-np.sum(ev[ev < 0]))


def linear_entropy(rho):
    """``1 - Tr(rho^2)``."""
    rho = np.asarray(rho)
    return float(1.0 - np.real(np.trace(rho @ rho)))


def _herm(a):
    return 0.5 * (a + a.conj().T)


@dataclass
class SeriesValue:
    """Quantity ``c0 + h c1 + h^2 c2`` known to second order."""

    c0: float
    c1: float
    c2: float

    def value(self, h):
        return self.c0 + h * self.c1 + h * h * self.c2

    def leading(self, tol=1e-12):
        """``(order, coefficient)`` of the first non-vanishing term."""
        for order, c in enumerate((self.c0, self.c1, self.c2)):
            if abs(c) > tol:
                return order, c
        return 2, self.c2


def series_negativity(pm, tol=1e-10):
    """Negativity of a perturbed partial transpose as a power series.

    Each corrected eigenvalue is classified by the sign of its first
    non-vanishing order; negative ones contribute their series with the sign
    flipped.  Returns a :class:`SeriesValue`.
    """
    total = np.zeros(3)
    for c in eigen_corrections(pm, tol):
        coeffs = np.real([c.lambda0, c.lambda1, c.lambda2])
        lead = next((x for x in coeffs if abs(x) > tol), 0.0)
        if lead < 0:
            total -= coeffs
    return SeriesValue(*total)


@dataclass
class PerturbedState:
    """Reduced density matrix ``rho0 + h rho1 + h^2 rho2`` on ``dims``.

    ``first_order_only`` marks states built without second-order Bogoliubov
    coefficients; their ``h^2`` coherences that depend on those coefficients
    are absent.
    """

    rho0: np.ndarray
    rho1: np.ndarray
    rho2: np.ndarray
    dims: tuple
    first_order_only: bool = False
    labels: tuple = ()

    def matrix(self, h):
        return self.rho0 + h * self.rho1 + h * h * self.rho2

    def perturbed(self):
        return PerturbedMatrix(self.rho0, self.rho1, self.rho2)

    def partial_transpose(self):
        """Perturbed partial transpose with respect to the second subsystem."""
        return PerturbedMatrix(*(partial_transpose(r, self.dims) for r in
                                 (self.rho0, self.rho1, self.rho2)))

    def negativity_series(self, tol=1e-10):
        return series_negativity(self.partial_transpose(), tol)

    def dense_negativity(self, h):
        return negativity(self.matrix(h), self.dims)

    def trace(self):
        return SeriesValue(*(float(np.real(np.trace(r))) for r in (self.rho0, self.rho1, self.rho2)))

    def linear_entropy_series(self):
        """``1 - Tr(rho^2)`` expanded to second order."""
        r0, r1, r2 = self.rho0, self.rho1, self.rho2
        t0 = np.trace(r0 @ r0)
        t1 = 2 * np.trace(r0 @ r1)
        t2 = np.trace(r1 @ r1) + 2 * np.trace(r0 @ r2)
        return SeriesValue(float(1 - t0.real), float(-t1.real), float(-t2.real))
