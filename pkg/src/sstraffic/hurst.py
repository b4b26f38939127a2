"""Hurst exponent estimators: rescaled range, DFA and aggregated variance.

All three compute a scale-dependent statistic on a geometric grid of
scales and read H off an ordinary least-squares fit in log10-log10 space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _accel
from .errors import DomainError, NonEstimableError
from .traffic_model import TrafficTrace

__all__ = [
    "Method",
    "ScaleGrid",
    "HurstEstimate",
    "loglog_fit",
    "estimate_rs",
    "estimate_dfa",
    "estimate_aggvar",
    "estimate",
    "DEFAULT_GRID",
]

MIN_POINTS = 4


class Method(str, Enum):
    RS = "rs"
    DFA = "dfa"
    AGGVAR = "aggvar"


@dataclass(frozen=True)
class ScaleGrid:
    min_scale: int = 8
    max_scale_fraction: float = 0.25
    points_per_decade: int = 8

    def __post_init__(self) -> None:
        if int(self.min_scale) != self.min_scale or self.min_scale < 4:
            raise DomainError(f"min_scale must be an integer >= 4, got {self.min_scale}")
        if not 0.0 < self.max_scale_fraction <= 1.0:
            raise DomainError(
                f"max_scale_fraction must lie in (0, 1], got {self.max_scale_fraction}"
            )
        if int(self.points_per_decade) != self.points_per_decade or self.points_per_decade < 1:
            raise DomainError("points_per_decade must be a positive integer")

    def scales(self, length: int) -> np.ndarray:
        """Distinct integer scales, ascending. Raises if fewer than 4 fit."""
        lo = int(self.min_scale)
        hi = int(math.floor(self.max_scale_fraction * length))
        if hi <= lo:
            raise NonEstimableError(
                f"series of length {length} leaves no scales in [{lo}, {hi}]"
            )
        npts = int(math.ceil(math.log10(hi / lo) * self.points_per_decade)) + 1
        grid = np.unique(np.round(np.logspace(math.log10(lo), math.log10(hi), npts)).astype(int))
        grid = grid[(grid >= lo) & (grid <= hi)]
        if grid.size < MIN_POINTS:
            raise NonEstimableError(
                f"only {grid.size} distinct scales fit a series of length {length}; need {MIN_POINTS}"
            )
        return grid


DEFAULT_GRID = ScaleGrid()


@dataclass(frozen=True)
class HurstEstimate:
    hurst: float
    method: Method
    slope: float
    intercept: float
    r_squared: float
    scales_used: int

    def to_dict(self) -> dict:
        return {
            "hurst": self.hurst,
            "method": self.method.value,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "scales_used": self.scales_used,
        }


def loglog_fit(points) -> tuple[float, float, float]:
    """OLS of log10(statistic) on log10(scale); returns (slope, intercept, r^2)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DomainError("points must be a sequence of (scale, statistic) pairs")
    if pts.shape[0] < MIN_POINTS:
        raise NonEstimableError(f"need at least {MIN_POINTS} points, got {pts.shape[0]}")
    if not np.all(pts > 0.0):
        raise DomainError("scales and statistics must be strictly positive")
    x = np.log10(pts[:, 0])
    y = np.log10(pts[:, 1])
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise NonEstimableError("all scales are identical")
    slope = float(xc @ yc) / sxx
    intercept = float(y.mean() - slope * x.mean())
    syy = float(yc @ yc)
    if syy == 0.0:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, slope * slope * sxx / syy))
    return slope, intercept, r2


def _prepare(trace: TrafficTrace | np.ndarray, grid: ScaleGrid) -> tuple[np.ndarray, np.ndarray]:
    x = np.ascontiguousarray(
        trace.values if isinstance(trace, TrafficTrace) else np.asarray(trace), dtype=float
    )
    if x.ndim != 1:
        raise DomainError("trace must be one-dimensional")
    if x.shape[0] < 4 * grid.min_scale:
        raise NonEstimableError(
            f"trace length {x.shape[0]} is below 4 * min_scale = {4 * grid.min_scale}"
        )
    if not np.ptp(x) > 0.0:
        raise NonEstimableError("trace is constant")
    return x, grid.scales(x.shape[0])


def _finish(method: Method, scales, stats, to_hurst) -> HurstEstimate:
    if len(scales) < MIN_POINTS:
        raise NonEstimableError(
            f"{len(scales)} usable scales remain after dropping degenerate ones; need {MIN_POINTS}"
        )
    slope, intercept, r2 = loglog_fit(np.column_stack([scales, stats]))
    return HurstEstimate(to_hurst(slope), method, slope, intercept, r2, len(scales))


def estimate_rs(trace, grid: ScaleGrid = DEFAULT_GRID) -> HurstEstimate:
    """Classical R/S: H is the log-log slope of block-averaged R/S versus block size."""
    x, scales = _prepare(trace, grid)
    used, stats = [], []
    for n in scales:
        val, cnt = _accel.rs_mean(x, int(n))
        if cnt > 0 and val > 0.0:
            used.append(n)
            stats.append(val)
    return _finish(Method.RS, used, stats, lambda s: s)


def _poly_basis(n: int, order: int) -> np.ndarray:
    t = np.linspace(-1.0, 1.0, n)
    q, _ = np.linalg.qr(np.vander(t, order + 1, increasing=True))
    return np.ascontiguousarray(q)


def estimate_dfa(trace, grid: ScaleGrid = DEFAULT_GRID, order: int = 1) -> HurstEstimate:
    """Detrended fluctuation analysis of the given polynomial order.

    The profile is the cumulative sum of the mean-centred trace; in every
    non-overlapping window of size n a least-squares polynomial is removed
    and F(n) is the RMS residual.
    """
    if int(order) != order or order < 1:
        raise DomainError(f"DFA order must be a positive integer, got {order}")
    x, scales = _prepare(trace, grid)
    scales = scales[scales > order + 1]
    profile = np.cumsum(x - x.mean())
    used, stats = [], []
    for n in scales:
        ms = _accel.dfa_mean_square(profile, _poly_basis(int(n), int(order)))
        if ms > 0.0:
            used.append(n)
            stats.append(math.sqrt(ms))
    return _finish(Method.DFA, used, stats, lambda s: s)


def estimate_aggvar(trace, grid: ScaleGrid = DEFAULT_GRID) -> HurstEstimate:
    """Aggregated variance: Var of block means decays as m^(2H-2).

    Block-mean variance uses ddof=1; with only a handful of blocks at the
    largest scales the ddof=0 variance drags the slope down noticeably.
    """
    x, scales = _prepare(trace, grid)
    used, stats = [], []
    for m in scales:
        nblk = x.shape[0] // m
        means = x[: nblk * m].reshape(nblk, m).mean(axis=1)
        v = float(np.var(means, ddof=1))
        if v > 0.0:
            used.append(m)
            stats.append(v)
    return _finish(Method.AGGVAR, used, stats, lambda s: 1.0 + 0.5 * s)


_ESTIMATORS = {
    Method.RS: estimate_rs,
    Method.DFA: estimate_dfa,
    Method.AGGVAR: estimate_aggvar,
}


def estimate(trace, method: Method | str = Method.DFA, grid: ScaleGrid = DEFAULT_GRID) -> HurstEstimate:
    return _ESTIMATORS[Method(method)](trace, grid)
