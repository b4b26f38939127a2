"""Exponential-transform traffic model ``Y(t) = b * exp(k * X(t))``.

With X standardized to unit variance, Y is lognormal, so (b, k) follow in
closed form from a target mean intensity and coefficient of variation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, TransformRangeError
from .synthesis import GaussianSeries

__all__ = [
    "ModelCoefficients",
    "ModelOrigin",
    "SumOrigin",
    "ExternalOrigin",
    "TrafficTrace",
    "calibrate",
    "theoretical_moments",
    "transform",
]

# log(DBL_MAX) is ~709.78
_MAX_EXPONENT = 709.0


@dataclass(frozen=True)
class ModelCoefficients:
    b: float
    k: float
    target_mean: float
    target_cv: float

    def __post_init__(self) -> None:
        if not self.b > 0.0:
            raise DomainError(f"b must be positive, got {self.b}")
        if not self.k >= 0.0:
            raise DomainError(f"k must be nonnegative, got {self.k}")


@dataclass(frozen=True)
class ModelOrigin:
    coeffs: ModelCoefficients
    forming: str


@dataclass(frozen=True)
class SumOrigin:
    count: int


@dataclass(frozen=True)
class ExternalOrigin:
    source: str = ""


@dataclass(frozen=True, eq=False)
class TrafficTrace:
    """Traffic intensity per time slot."""

    values: np.ndarray = field(repr=False)
    origin: ModelOrigin | SumOrigin | ExternalOrigin = ExternalOrigin()

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise DomainError("a trace must be a nonempty one-dimensional series")
        if not np.all(np.isfinite(v)):
            raise DomainError("trace values must be finite")
        if isinstance(self.origin, ExternalOrigin):
            if np.any(v < 0.0):
                raise DomainError("trace values must be nonnegative")
        elif np.any(v <= 0.0):
            raise DomainError("model and sum traces must be strictly positive")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.shape[0]


def calibrate(target_mean: float, target_cv: float) -> ModelCoefficients:
    """Invert the lognormal moments: k = sqrt(ln(1 + cv^2)), b = mean * exp(-k^2 / 2)."""
    target_mean = float(target_mean)
    target_cv = float(target_cv)
    if not target_mean > 0.0:
        raise DomainError(f"target mean must be positive, got {target_mean}")
    if not target_cv >= 0.0:
        raise DomainError(f"target CV must be nonnegative, got {target_cv}")
    k2 = math.log1p(target_cv * target_cv)
    return ModelCoefficients(
        b=target_mean * math.exp(-0.5 * k2),
        k=math.sqrt(k2),
        target_mean=target_mean,
        target_cv=target_cv,
    )


def theoretical_moments(coeffs: ModelCoefficients) -> tuple[float, float, float]:
    """(mean, variance, cv) of b * exp(k * X) for X ~ N(0, 1)."""
    k2 = coeffs.k * coeffs.k
    em1 = math.expm1(k2)
    mean = coeffs.b * math.exp(0.5 * k2)
    variance = coeffs.b * coeffs.b * math.exp(k2) * em1
    return mean, variance, math.sqrt(em1)


def transform(forming: GaussianSeries, coeffs: ModelCoefficients) -> TrafficTrace:
    x = np.asarray(forming.values, dtype=float)
    if coeffs.k > 0.0 and coeffs.k * float(np.max(np.abs(x))) > _MAX_EXPONENT - math.log(coeffs.b) - 1.0:
        raise TransformRangeError(
            f"k * max|X| = {coeffs.k * float(np.max(np.abs(x))):.1f} exceeds the exponent range"
        )
    y = coeffs.b * np.exp(coeffs.k * x)
    return TrafficTrace(y, ModelOrigin(coeffs, forming.label))
