"""Hot numeric kernels with numba and pure-numpy implementations.

The backend is chosen once at import time. Set ``SSTRAFFIC_NO_NUMBA=1`` to
force the numpy path (useful for debugging or platforms without numba).
Both paths are importable by name so they can be compared directly.
"""
from __future__ import annotations

import os

import numpy as np
from scipy.signal import lfilter

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("SSTRAFFIC_NO_NUMBA", "") not in ("1", "true", "yes")
BACKEND = "numba" if USE_NUMBA else "numpy"

__all__ = [
    "BACKEND",
    "ar1_filter",
    "dfa_mean_square",
    "rs_mean",
    "ar1_filter_numpy",
    "dfa_mean_square_numpy",
    "rs_mean_numpy",
]


# -- numpy ------------------------------------------------------------------


def ar1_filter_numpy(eps: np.ndarray, phi: float) -> np.ndarray:
    """x[0] = eps[0], x[t] = phi * x[t-1] + eps[t]."""
    return lfilter([1.0], [1.0, -phi], eps)


def dfa_mean_square_numpy(profile: np.ndarray, basis: np.ndarray) -> float:
    """Mean squared detrending residual over non-overlapping windows.

    ``basis`` is an orthonormal (n, order+1) basis of polynomials on the
    window grid; the window length n is ``basis.shape[0]``.
    """
    n = basis.shape[0]
    nwin = profile.shape[0] // n
    seg = profile[: nwin * n].reshape(nwin, n)
    coef = seg @ basis
    resid = seg - coef @ basis.T
    return float(np.mean(resid * resid))


def rs_mean_numpy(x: np.ndarray, n: int) -> tuple[float, int]:
    """Average R/S over the floor(N/n) blocks of length n.

    Constant blocks (zero standard deviation) are skipped. Returns (mean, count);
    count 0 means every block was degenerate.
    """
    nblk = x.shape[0] // n
    blk = x[: nblk * n].reshape(nblk, n)
    dev = blk - blk.mean(axis=1, keepdims=True)
    z = np.cumsum(dev, axis=1)
    r = z.max(axis=1) - z.min(axis=1)
    s = np.sqrt(np.mean(dev * dev, axis=1))
    ok = blk.max(axis=1) > blk.min(axis=1)
    cnt = int(ok.sum())
    if cnt == 0:
        return 0.0, 0
    return float(np.mean(r[ok] / s[ok])), cnt


# -- numba ------------------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True)
    def ar1_filter_numba(eps, phi):
        out = np.empty_like(eps)
        acc = 0.0
        for t in range(eps.shape[0]):
            acc = phi * acc + eps[t]
            out[t] = acc
        return out

    @njit(cache=True)
    def _dfa_ms_rows(profile, basis_t):
        # basis_t is (order+1, n), row-contiguous
        p, n = basis_t.shape
        nwin = profile.shape[0] // n
        coef = np.empty(p)
        total = 0.0
        for w in range(nwin):
            seg = profile[w * n : (w + 1) * n]
            for j in range(p):
                c = 0.0
                for i in range(n):
                    c += seg[i] * basis_t[j, i]
                coef[j] = c
            for i in range(n):
                r = seg[i]
                for j in range(p):
                    r -= coef[j] * basis_t[j, i]
                total += r * r
        return total / (nwin * n)

    def dfa_mean_square_numba(profile, basis):
        return _dfa_ms_rows(profile, np.ascontiguousarray(basis.T))

    @njit(cache=True)
    def rs_mean_numba(x, n):
        nblk = x.shape[0] // n
        acc = 0.0
        cnt = 0
        for b in range(nblk):
            off = b * n
            m = 0.0
            lo = x[off]
            hi = x[off]
            for i in range(n):
                v = x[off + i]
                m += v
                if v < lo:
                    lo = v
                if v > hi:
                    hi = v
            if hi == lo:
                continue
            m /= n
            z = 0.0
            zmax = 0.0
            zmin = 0.0
            ss = 0.0
            for i in range(n):
                d = x[off + i] - m
                ss += d * d
                z += d
                if i == 0 or z > zmax:
                    zmax = z
                if i == 0 or z < zmin:
                    zmin = z
            acc += (zmax - zmin) / np.sqrt(ss / n)
            cnt += 1
        if cnt == 0:
            return 0.0, 0
        return acc / cnt, cnt


if USE_NUMBA:
    ar1_filter = ar1_filter_numba
    dfa_mean_square = dfa_mean_square_numba
    rs_mean = rs_mean_numba
else:
    ar1_filter = ar1_filter_numpy
    dfa_mean_square = dfa_mean_square_numpy
    rs_mean = rs_mean_numpy
