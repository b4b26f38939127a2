"""Forming processes: fractional Gaussian noise, white noise and AR(1).

Every generator returns a :class:`GaussianSeries` standardized to zero
sample mean and unit (population) sample variance, so a single (b, k)
calibration of the exponential traffic model applies to all of them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import DomainError, EmbeddingError

__all__ = [
    "FgnParams",
    "Ar1Params",
    "GaussianSeries",
    "fgn_autocovariance",
    "circulant_spectrum",
    "circulant_fgn",
    "generate_fgn",
    "generate_white",
    "generate_ar1",
    "make_rng",
    "DEFAULT_PHI",
]

DEFAULT_PHI = 0.5
EIGEN_TOLERANCE = 1e-8
_SEED_MAX = 2**64 - 1


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= _SEED_MAX:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _check_hurst(hurst: float) -> float:
    hurst = float(hurst)
    if not 0.0 < hurst < 1.0:
        raise DomainError(f"Hurst exponent must lie in (0, 1), got {hurst}")
    return hurst


def _check_length(length: int) -> int:
    if int(length) != length or length < 2:
        raise DomainError(f"length must be an integer >= 2, got {length}")
    return int(length)


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; stable across platforms for a given numpy major."""
    return np.random.Generator(np.random.PCG64(_check_seed(seed)))


@dataclass(frozen=True)
class FgnParams:
    hurst: float
    length: int
    seed: int = 0

    def __post_init__(self) -> None:
        _check_hurst(self.hurst)
        _check_length(self.length)
        _check_seed(self.seed)


@dataclass(frozen=True)
class Ar1Params:
    phi: float = DEFAULT_PHI
    length: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if not abs(self.phi) < 1.0:
            raise DomainError(f"AR(1) coefficient must satisfy |phi| < 1, got {self.phi}")
        _check_length(self.length)
        _check_seed(self.seed)


@dataclass(frozen=True, eq=False)
class GaussianSeries:
    """Standardized forming-process realization.

    ``kind`` is one of ``"fgn"``, ``"white"`` or ``"ar1"``; ``param`` holds
    the Hurst exponent for fGn, phi for AR(1) and ``None`` for white noise.
    """

    values: np.ndarray = field(repr=False)
    kind: str
    param: float | None
    seed: int

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def label(self) -> str:
        if self.kind == "fgn":
            return f"fgn(hurst={self.param:g})"
        if self.kind == "ar1":
            return f"ar1(phi={self.param:g})"
        return "white"


def _standardize(x: np.ndarray) -> np.ndarray:
    x = x - x.mean()
    sd = math.sqrt(float(np.mean(x * x)))
    if sd == 0.0:
        raise DomainError("cannot standardize a constant series")
    x = x / sd
    # a second pass trims the residual rounding in mean and variance
    x -= x.mean()
    x /= math.sqrt(float(np.mean(x * x)))
    x.setflags(write=False)
    return x


def _series(x: np.ndarray, kind: str, param: float | None, seed: int) -> GaussianSeries:
    return GaussianSeries(_standardize(x), kind, param, seed)


def fgn_autocovariance(hurst: float, lag) -> float | np.ndarray:
    """Autocovariance of unit-variance fGn at integer ``lag`` (scalar or array)."""
    h2 = 2.0 * _check_hurst(hurst)
    k = np.abs(np.asarray(lag, dtype=float))
    out = 0.5 * (np.abs(k + 1.0) ** h2 - 2.0 * k**h2 + np.abs(k - 1.0) ** h2)
    return float(out) if out.ndim == 0 else out


def circulant_spectrum(hurst: float, length: int) -> np.ndarray:
    """Eigenvalues of the 2(length-1) circulant embedding of the fGn covariance.

    Values are real; rounding noise down to -1e-8 is clamped to zero and
    anything more negative raises :class:`EmbeddingError`.
    """
    _check_hurst(hurst)
    n = _check_length(length)
    gamma = fgn_autocovariance(hurst, np.arange(n))
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    lam = np.fft.rfft(row).real
    lam = np.concatenate([lam, lam[-2:0:-1]])
    low = lam.min()
    if low < -EIGEN_TOLERANCE:
        raise EmbeddingError(
            f"circulant embedding has negative eigenvalue {low:.3e} (H={hurst}, length={n})"
        )
    return np.maximum(lam, 0.0)


def _embedding_points(length: int) -> int:
    # smallest power of two m with m + 1 >= length; embedding size is 2m
    m = 1
    while m + 1 < length:
        m *= 2
    return m + 1


def circulant_fgn(hurst: float, length: int, rng: np.random.Generator) -> np.ndarray:
    """Exact zero-mean, unit-variance fGn sample (not standardized).

    Uses the real part of the DFT of a complex Gaussian vector scaled by the
    square-root circulant spectrum.
    """
    npts = _embedding_points(_check_length(length))
    lam = circulant_spectrum(hurst, npts)
    size = lam.shape[0]
    w = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    z = np.fft.fft(np.sqrt(lam / size) * w)
    return z.real[:length].copy()


def generate_fgn(params: FgnParams) -> GaussianSeries:
    rng = make_rng(params.seed)
    x = circulant_fgn(params.hurst, params.length, rng)
    return _series(x, "fgn", float(params.hurst), params.seed)


def _white_driver(length: int, seed: int) -> np.ndarray:
    return make_rng(seed).standard_normal(length)


def generate_white(length: int, seed: int = 0) -> GaussianSeries:
    """Standardized i.i.d. N(0, 1) sequence."""
    n = _check_length(length)
    return _series(_white_driver(n, _check_seed(seed)), "white", None, int(seed))


def ar1_burn_in(phi: float) -> int:
    """Discarded warm-up: ten correlation lengths, at least 100 samples."""
    return max(100, 10 * math.ceil(1.0 / (1.0 - abs(phi))))


def generate_ar1(params: Ar1Params) -> GaussianSeries:
    """Stationary AR(1) ``x[t] = phi * x[t-1] + e[t]`` with burn-in discarded.

    The driver is the same white sequence :func:`generate_white` would draw
    for ``length + burn_in`` samples, so phi = 0 reproduces white noise from
    that stream.
    """
    burn = ar1_burn_in(params.phi)
    eps = _white_driver(params.length + burn, params.seed)
    x = _accel.ar1_filter(eps, float(params.phi))[burn:]
    return _series(np.ascontiguousarray(x), "ar1", float(params.phi), params.seed)
