"""CSV/JSON persistence for traces and experiment tables."""
from __future__ import annotations

import io
import json
import math

import numpy as np

from .errors import TraceFormatError
from .traffic_model import ExternalOrigin, TrafficTrace

__all__ = ["export_trace", "import_trace"]

TRACE_HEADER = "value"


def export_trace(trace: TrafficTrace) -> bytes:
    """Single-column CSV, 12 significant digits."""
    buf = io.StringIO()
    buf.write(TRACE_HEADER + "\n")
    for v in np.asarray(trace.values, dtype=float):
        buf.write(format(float(v), ".12g") + "\n")
    return buf.getvalue().encode("ascii")


def import_trace(data: bytes | str, source: str = "") -> TrafficTrace:
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    lines = text.splitlines()
    if not lines or lines[0].strip().lstrip("﻿") != TRACE_HEADER:
        raise TraceFormatError(f"expected header '{TRACE_HEADER}'", line=1)
    values = []
    for lineno, raw in enumerate(lines[1:], start=2):
        field = raw.strip()
        if not field:
            continue
        try:
            v = float(field)
        except ValueError:
            raise TraceFormatError(f"cannot parse {field!r} as a number", line=lineno) from None
        if not math.isfinite(v):
            raise TraceFormatError(f"non-finite value {field!r}", line=lineno)
        if v < 0.0:
            raise TraceFormatError(f"negative value {field}", line=lineno)
        values.append(v)
    if not values:
        raise TraceFormatError("trace has no values")
    return TrafficTrace(np.array(values), ExternalOrigin(source))


def dumps_json(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=False) + "\n").encode("utf-8")
