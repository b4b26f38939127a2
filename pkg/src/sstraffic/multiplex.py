"""Statistical multiplexing of traffic streams and burstiness ratios."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DomainError, LengthMismatchError
from .hurst import DEFAULT_GRID, HurstEstimate, Method, ScaleGrid, estimate
from .traffic_model import SumOrigin, TrafficTrace

__all__ = [
    "MuxReport",
    "TiedMaximumWarning",
    "coefficient_of_variation",
    "sum_streams",
    "ratio_r1",
    "ratio_r2",
    "max_hurst_index",
    "mux_report",
]


class TiedMaximumWarning(UserWarning):
    """Several streams share the largest Hurst exponent."""


def _values(trace) -> np.ndarray:
    return trace.values if isinstance(trace, TrafficTrace) else np.asarray(trace, dtype=float)


def coefficient_of_variation(trace) -> float:
    """Population standard deviation over the mean."""
    x = _values(trace)
    if x.size == 0:
        raise DomainError("empty trace")
    mean = float(np.mean(x))
    if not mean > 0.0:
        raise DomainError(f"coefficient of variation needs a positive mean, got {mean}")
    return float(np.std(x)) / mean


def sum_streams(traces: Sequence[TrafficTrace]) -> TrafficTrace:
    if len(traces) < 2:
        raise DomainError("multiplexing needs at least two streams")
    lengths = {len(t) for t in traces}
    if len(lengths) != 1:
        raise LengthMismatchError(f"streams have different lengths: {sorted(lengths)}")
    # sum in a canonical order so permutations of the inputs give identical bits
    rows = sorted((np.asarray(t.values) for t in traces), key=lambda v: v.tobytes())
    total = reduce(np.add, rows[1:], rows[0].copy())
    return TrafficTrace(total, SumOrigin(len(traces)))


def ratio_r1(self_similar, other) -> float:
    """CV of the larger-H stream over CV of the other stream."""
    denom = coefficient_of_variation(other)
    if denom == 0.0:
        raise DomainError("R1 is undefined: the second stream has zero CV")
    return coefficient_of_variation(self_similar) / denom


def max_hurst_index(hursts: Sequence[float]) -> tuple[int, bool]:
    """Index of the largest Hurst exponent (lowest index on ties) and a tie flag."""
    h = np.asarray(hursts, dtype=float)
    idx = int(np.argmax(h))
    return idx, bool(np.count_nonzero(h == h[idx]) > 1)


def ratio_r2(traces: Sequence, hursts: Sequence[float]) -> float:
    """CV of the max-H stream over the mean CV of the remaining streams.

    Emits :class:`TiedMaximumWarning` when the maximum is not unique; the
    lowest index is used.
    """
    if len(traces) < 2:
        raise DomainError("R2 needs at least two streams")
    if len(hursts) != len(traces):
        raise DomainError("hursts must be parallel to traces")
    idx, tied = max_hurst_index(hursts)
    if tied:
        warnings.warn(
            f"maximum Hurst exponent {hursts[idx]} is shared; using stream {idx}",
            TiedMaximumWarning,
            stacklevel=2,
        )
    cvs = [coefficient_of_variation(t) for t in traces]
    rest = cvs[:idx] + cvs[idx + 1 :]
    denom = math.fsum(rest) / len(rest)
    if denom == 0.0:
        raise DomainError("R2 is undefined: the non-maximal streams have zero CV")
    return cvs[idx] / denom


@dataclass(frozen=True)
class MuxReport:
    component_hursts: tuple[HurstEstimate, ...]
    component_cvs: tuple[float, ...]
    ratio: float
    total_hurst: HurstEstimate
    total_cv: float
    max_index: int
    tied_maximum: bool = False

    def to_dict(self) -> dict:
        return {
            "component_hursts": [h.to_dict() for h in self.component_hursts],
            "component_cvs": list(self.component_cvs),
            "ratio_kind": "R1" if len(self.component_cvs) == 2 else "R2",
            "ratio": self.ratio,
            "max_index": self.max_index,
            "tied_maximum": self.tied_maximum,
            "total_hurst": self.total_hurst.to_dict(),
            "total_cv": self.total_cv,
        }


def mux_report(
    traces: Sequence[TrafficTrace],
    hursts: Sequence[float] | None = None,
    method: Method | str = Method.DFA,
    grid: ScaleGrid = DEFAULT_GRID,
) -> MuxReport:
    """Estimate every component, multiplex, and estimate the total stream.

    ``hursts`` are known component exponents used only to pick the max-H
    stream for the ratio; when omitted the estimates are used instead.
    """
    total = sum_streams(traces)
    comp = tuple(estimate(t, method, grid) for t in traces)
    cvs = tuple(coefficient_of_variation(t) for t in traces)
    ranking = list(hursts) if hursts is not None else [h.hurst for h in comp]
    if len(ranking) != len(traces):
        raise DomainError("hursts must be parallel to traces")
    idx, tied = max_hurst_index(ranking)
    rest = cvs[:idx] + cvs[idx + 1 :]
    denom = math.fsum(rest) / len(rest)
    if denom == 0.0:
        raise DomainError("ratio is undefined: the non-maximal streams have zero CV")
    return MuxReport(
        component_hursts=comp,
        component_cvs=cvs,
        ratio=cvs[idx] / denom,
        total_hurst=estimate(total, method, grid),
        total_cv=coefficient_of_variation(total),
        max_index=idx,
        tied_maximum=tied,
    )
