"""Monte Carlo campaigns: Hurst exponent of a multiplexed stream versus R1/R2.

Each cell of the ratio grid is an independent batch of replications.
Replication ``r`` is seeded from ``base_seed + r``; per-cell and per-stream
seeds are spawned from it with :class:`numpy.random.SeedSequence`, so
every realization is fresh and results do not depend on execution order.
"""
from __future__ import annotations

import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DomainError, EmbeddingError, NonEstimableError, TransformRangeError
from .hurst import DEFAULT_GRID, Method, ScaleGrid, estimate
from .multiplex import coefficient_of_variation, max_hurst_index, sum_streams
from .synthesis import DEFAULT_PHI, Ar1Params, FgnParams, generate_ar1, generate_fgn, generate_white
from .tableio import dumps_json
from .traffic_model import calibrate, transform

__all__ = [
    "Scenario",
    "ExperimentConfig",
    "TableRow",
    "ExperimentTable",
    "StreamSpec",
    "realize_ratio",
    "stream_specs",
    "run_streams",
    "run_pairwise",
    "run_multi_stream",
    "run_experiment",
    "export_table",
    "import_table",
    "DEFAULT_RATIO_GRID",
]

log = logging.getLogger(__name__)

DEFAULT_RATIO_GRID = (1.0, 0.85, 0.65, 0.5, 0.35)
MEAN_INTENSITY = 1.0
FAILURE_FLAG_FRACTION = 0.05
_RECOVERABLE = (NonEstimableError, EmbeddingError, TransformRangeError, DomainError)


class Scenario(str, Enum):
    SELF_PLUS_WHITE = "self_plus_white"
    SELF_PLUS_AR1 = "self_plus_ar1"
    SELF_PLUS_SELF = "self_plus_self"
    MULTI_STREAM = "multi_stream"

    @classmethod
    def parse(cls, value: "Scenario | str") -> "Scenario":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower().replace("-", "_"))


_DEFAULT_H = {
    Scenario.SELF_PLUS_WHITE: (0.8, 0.5),
    Scenario.SELF_PLUS_AR1: (0.8, 0.5),
    Scenario.SELF_PLUS_SELF: (0.8, 0.6),
    Scenario.MULTI_STREAM: (0.8, 0.6, 0.6, 0.6),
}


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    h_values: tuple[float, ...] = ()
    base_cv: float = 1.2
    ratio_grid: tuple[float, ...] = DEFAULT_RATIO_GRID
    length: int = 1000
    replications: int = 100
    base_seed: int = 0
    estimator: Method = Method.DFA
    ar_phi: float = DEFAULT_PHI

    def __post_init__(self) -> None:
        scenario = Scenario.parse(self.scenario)
        object.__setattr__(self, "scenario", scenario)
        object.__setattr__(self, "estimator", Method(self.estimator))
        h = tuple(float(v) for v in (self.h_values or _DEFAULT_H[scenario]))
        object.__setattr__(self, "h_values", h)
        object.__setattr__(self, "ratio_grid", tuple(float(r) for r in self.ratio_grid))

        if scenario is Scenario.MULTI_STREAM:
            if len(h) < 3:
                raise DomainError("multi_stream needs at least three h_values")
        elif len(h) != 2:
            raise DomainError(f"{scenario.value} needs exactly two h_values")
        if any(not 0.0 < v < 1.0 for v in h):
            raise DomainError(f"h_values must lie in (0, 1), got {h}")
        if scenario in (Scenario.SELF_PLUS_WHITE, Scenario.SELF_PLUS_AR1):
            if h[1] != 0.5:
                raise DomainError(f"{scenario.value}: the second stream is not self-similar, its H is 0.5")
            if not h[0] > 0.5:
                raise DomainError(f"{scenario.value}: the first stream must have H > 0.5")
        if any(not 0.0 < r <= 2.0 for r in self.ratio_grid):
            raise DomainError(f"ratio_grid values must lie in (0, 2], got {self.ratio_grid}")
        if not self.base_cv > 0.0:
            raise DomainError("base_cv must be positive")
        if int(self.replications) != self.replications or self.replications < 1:
            raise DomainError("replications must be a positive integer")
        if int(self.length) != self.length or self.length < 2:
            raise DomainError("length must be an integer >= 2")
        if not 0 <= int(self.base_seed) < 2**64:
            raise DomainError("base_seed must be a 64-bit unsigned integer")
        if not abs(self.ar_phi) < 1.0:
            raise DomainError("ar_phi must satisfy |phi| < 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["scenario"] = self.scenario.value
        d["estimator"] = self.estimator.value
        d["h_values"] = list(self.h_values)
        d["ratio_grid"] = list(self.ratio_grid)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        if "scenario" not in data:
            raise DomainError("config needs a 'scenario'")
        kwargs = dict(data)
        for key in ("h_values", "ratio_grid"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


@dataclass(frozen=True)
class StreamSpec:
    """One component stream: forming kind plus its nominal Hurst exponent."""

    kind: str  # "fgn", "white" or "ar1"
    hurst: float
    phi: float = DEFAULT_PHI


@dataclass(frozen=True)
class TableRow:
    ratio: float
    mean_h: tuple[float, ...]
    mean_h_total: float
    sd_h_total: float
    reps: int
    failed: int = 0
    flagged: bool = False
    mean_cv: tuple[float, ...] = ()
    mean_achieved_ratio: float = float("nan")


@dataclass(frozen=True)
class ExperimentTable:
    config: ExperimentConfig
    rows: tuple[TableRow, ...] = field(default_factory=tuple)

    @property
    def n_streams(self) -> int:
        return len(self.config.h_values)


def realize_ratio(base_cv: float, ratio: float) -> tuple[float, float]:
    """(cv of the max-H stream, cv of every other stream) so the ratio equals ``ratio``."""
    if not ratio > 0.0:
        raise DomainError(f"ratio must be positive, got {ratio}")
    return float(base_cv), float(base_cv) / float(ratio)


def stream_specs(config: ExperimentConfig) -> list[StreamSpec]:
    h = config.h_values
    if config.scenario is Scenario.SELF_PLUS_WHITE:
        return [StreamSpec("fgn", h[0]), StreamSpec("white", 0.5)]
    if config.scenario is Scenario.SELF_PLUS_AR1:
        return [StreamSpec("fgn", h[0]), StreamSpec("ar1", 0.5, config.ar_phi)]
    return [StreamSpec("fgn", v) for v in h]


def _stream_seeds(base_seed: int, rep: int, cell: int, count: int) -> list[int]:
    ss = np.random.SeedSequence([int(base_seed) + rep, cell])
    return [int(c.generate_state(1, np.uint64)[0]) for c in ss.spawn(count)]


def _forming(spec: StreamSpec, length: int, seed: int):
    if spec.kind == "white":
        return generate_white(length, seed)
    if spec.kind == "ar1":
        return generate_ar1(Ar1Params(spec.phi, length, seed))
    return generate_fgn(FgnParams(spec.hurst, length, seed))


def _replicate(args) -> tuple[int, np.ndarray | None]:
    """One replication -> [h_1..h_n, h_total, cv_1..cv_n, achieved ratio]."""
    specs, cvs, idx, length, seeds, method, grid, rep = args
    try:
        traces = [
            transform(_forming(s, length, seed), calibrate(MEAN_INTENSITY, cv))
            for s, seed, cv in zip(specs, seeds, cvs)
        ]
        total = sum_streams(traces)
        hs = [estimate(t, method, grid).hurst for t in traces]
        h_total = estimate(total, method, grid).hurst
        got = [coefficient_of_variation(t) for t in traces]
    except _RECOVERABLE as exc:
        log.warning("replication %d failed: %s", rep, exc)
        return rep, None
    rest = got[:idx] + got[idx + 1 :]
    achieved = got[idx] / (math.fsum(rest) / len(rest))
    return rep, np.array(hs + [h_total] + got + [achieved])


def run_streams(
    specs: Sequence[StreamSpec],
    config: ExperimentConfig,
    grid: ScaleGrid = DEFAULT_GRID,
    workers: int = 1,
) -> ExperimentTable:
    """Shared engine behind :func:`run_pairwise` and :func:`run_multi_stream`."""
    n = len(specs)
    idx, tied = max_hurst_index([s.hurst for s in specs])
    if tied:
        raise DomainError("the maximum Hurst exponent must be unique")
    rows = []
    # cell index follows the configured grid order, rows are sorted afterwards
    for cell, ratio in enumerate(config.ratio_grid):
        fixed, other = realize_ratio(config.base_cv, ratio)
        cvs = [fixed if i == idx else other for i in range(n)]
        jobs = [
            (
                list(specs), cvs, idx, config.length,
                _stream_seeds(config.base_seed, r, cell, n),
                config.estimator, grid, r,
            )
            for r in range(config.replications)
        ]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_replicate, jobs))
        else:
            results = [_replicate(j) for j in jobs]
        results.sort(key=lambda item: item[0])
        ok = np.array([v for _, v in results if v is not None])
        failed = config.replications - ok.shape[0]
        flagged = failed > FAILURE_FLAG_FRACTION * config.replications
        if flagged:
            log.warning("ratio %g: %d of %d replications failed", ratio, failed, config.replications)
        if ok.shape[0] == 0:
            nan = float("nan")
            rows.append(TableRow(ratio, (nan,) * n, nan, nan, 0, failed, True, (nan,) * n, nan))
            continue
        means = ok.mean(axis=0)
        sd = float(np.std(ok[:, n], ddof=1)) if ok.shape[0] > 1 else 0.0
        rows.append(
            TableRow(
                ratio=float(ratio),
                mean_h=tuple(float(v) for v in means[:n]),
                mean_h_total=float(means[n]),
                sd_h_total=sd,
                reps=int(ok.shape[0]),
                failed=int(failed),
                flagged=bool(flagged),
                mean_cv=tuple(float(v) for v in means[n + 1 : 2 * n + 1]),
                mean_achieved_ratio=float(means[2 * n + 1]),
            )
        )
    rows.sort(key=lambda row: -row.ratio)
    return ExperimentTable(config, tuple(rows))


def run_pairwise(config: ExperimentConfig, grid: ScaleGrid = DEFAULT_GRID, workers: int = 1) -> ExperimentTable:
    if config.scenario is Scenario.MULTI_STREAM:
        raise DomainError("run_pairwise handles the two-stream scenarios only")
    return run_streams(stream_specs(config), config, grid, workers)


def run_multi_stream(config: ExperimentConfig, grid: ScaleGrid = DEFAULT_GRID, workers: int = 1) -> ExperimentTable:
    if config.scenario is not Scenario.MULTI_STREAM:
        raise DomainError("run_multi_stream needs the multi_stream scenario")
    return run_streams(stream_specs(config), config, grid, workers)


def run_experiment(config: ExperimentConfig, grid: ScaleGrid = DEFAULT_GRID, workers: int = 1) -> ExperimentTable:
    if config.scenario is Scenario.MULTI_STREAM:
        return run_multi_stream(config, grid, workers)
    return run_pairwise(config, grid, workers)


# -- persistence --------------------------------------------------------------


def _g6(v: float) -> str:
    return format(v, ".6g")


def export_table(table: ExperimentTable, fmt: str = "csv") -> bytes:
    fmt = fmt.lower()
    if fmt == "json":
        return dumps_json(
            {
                "config": table.config.to_dict(),
                "rows": [
                    {
                        "ratio": r.ratio,
                        "mean_h": list(r.mean_h),
                        "mean_h_total": r.mean_h_total,
                        "sd_h_total": r.sd_h_total,
                        "reps": r.reps,
                        "failed": r.failed,
                        "flagged": r.flagged,
                        "mean_cv": list(r.mean_cv),
                        "mean_achieved_ratio": r.mean_achieved_ratio,
                    }
                    for r in table.rows
                ],
            }
        )
    if fmt != "csv":
        raise DomainError(f"unknown table format {fmt!r}")
    n = table.n_streams
    buf = io.StringIO()
    header = ["ratio"] + [f"mean_h_{i + 1}" for i in range(n)] + ["mean_h_total", "sd_h_total", "reps"]
    buf.write(",".join(header) + "\n")
    for r in table.rows:
        cells = [_g6(r.ratio)] + [_g6(v) for v in r.mean_h] + [_g6(r.mean_h_total), _g6(r.sd_h_total), str(r.reps)]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue().encode("ascii")


def import_table(data: bytes | str) -> ExperimentTable:
    """Inverse of ``export_table(..., "json")``."""
    doc = json.loads(data)
    config = ExperimentConfig.from_dict(doc["config"])
    rows = tuple(
        TableRow(
            ratio=r["ratio"],
            mean_h=tuple(r["mean_h"]),
            mean_h_total=r["mean_h_total"],
            sd_h_total=r["sd_h_total"],
            reps=r["reps"],
            failed=r.get("failed", 0),
            flagged=r.get("flagged", False),
            mean_cv=tuple(r.get("mean_cv", ())),
            mean_achieved_ratio=r.get("mean_achieved_ratio", float("nan")),
        )
        for r in doc["rows"]
    )
    return ExperimentTable(config, rows)

