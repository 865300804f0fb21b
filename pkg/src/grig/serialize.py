"""Strict-JSON helpers shared by the artifact writers.

Non-finite floats are mapped to the strings "inf", "-inf", "nan" so every
file parses under json.loads with allow_nan disabled; numpy scalars are
unwrapped to their Python equivalents.
"""

from __future__ import annotations

import json
import math

import numpy as np


def json_sanitize(obj):
    """Recursively convert a payload into strict-JSON-safe values."""
    if isinstance(obj, dict):
        return {k: json_sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [json_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path, payload) -> None:
    """Deterministic strict-JSON file: sorted keys, trailing newline."""
    with open(path, "w") as fh:
        json.dump(json_sanitize(payload), fh, sort_keys=True, indent=2, allow_nan=False)
        fh.write("\n")
