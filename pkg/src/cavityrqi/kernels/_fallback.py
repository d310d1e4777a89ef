"""Pure numpy implementations of the hot kernels.

These mirror the compiled routines in ``_core.pyx`` one for one and are used
whenever the extension module is not available.
"""

import numpy as np


def dirac_roots(branches, M, rtol=1e-12, max_iter=200):
    """Positive roots ``x`` of ``x cos x + M sin x = 0`` on given branches.

    Branch ``b`` brackets the root inside ``((b + 1/2) pi, (b + 1) pi)``.
    """
    b = np.asarray(branches, dtype=float)
    lo = (b + 0.5) * np.pi
    hi = (b + 1.0) * np.pi
    f_lo = lo * np.cos(lo) + M * np.sin(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = mid * np.cos(mid) + M * np.sin(mid)
        same = np.sign(f_mid) == np.sign(f_lo)
        lo = np.where(same, mid, lo)
        f_lo = np.where(same, f_mid, f_lo)
        hi = np.where(same, hi, mid)
        if np.all(hi - lo <= rtol * lo):
            break
    else:
        raise RuntimeError("Dirac root bisection did not converge")
    return 0.5 * (lo + hi)


def scalar_beta_antidiagonals(M, s_max):
    """Anti-diagonal sums ``D[s] = sum_{m+n=s} beta1_mn^2`` for ``L = 1``."""
    out = np.zeros(s_max + 1)
    for s in range(3, s_max + 1, 2):
        m = np.arange(1, s, dtype=float)
        n = s - m
        wm = np.sqrt(M * M + (np.pi * m) ** 2)
        wn = np.sqrt(M * M + (np.pi * n) ** 2)
        beta = 2.0 * np.pi ** 2 * m * n / (np.sqrt(wm * wn) * (wm + wn) ** 3)
        out[s] = np.sum(beta * beta)
    return out


def dirac_beta_antidiagonals(M, x):
    """Anti-diagonal sums of ``|A1_pq|^2`` over ``p >= 0`` and ``q < 0``.

    ``x[b]`` is the dimensionless momentum of branch ``b``.  Label ``p`` uses
    branch ``p`` and label ``q = -j - 1`` uses branch ``j``; the anti-diagonal
    index is ``s = p + j + 1`` and runs up to ``len(x)``.
    """
    x = np.asarray(x, dtype=float)
    s_max = len(x)
    out = np.zeros(s_max + 1)
    M2 = M * M
    for s in range(1, s_max + 1, 2):
        # p + q = p - j - 1 is odd on odd anti-diagonals only
        p = np.arange(0, s)
        j = s - 1 - p
        kp = x[p]
        kq = -x[j]
        wp = np.sqrt(M2 + kp * kp)
        wq = -np.sqrt(M2 + kq * kq)
        cp = kp + wp
        cq = kq + wq
        num = 2.0 * 2.0 * np.abs(kp * kq) * cp ** 2 * cq ** 2 * (cp + cq) * (cp * cq + M2)
        den = (np.sqrt(wp ** 2 + M) * np.sqrt(wq ** 2 + M)
               * (cp - cq) ** 3 * (cp * cq - M2) ** 3)
        a = num / den
        out[s] = np.sum(a * a)
    return out
