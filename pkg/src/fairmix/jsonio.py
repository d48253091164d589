"""Deterministic JSON output: sorted keys, 12-significant-digit floats.

Reports are regression fixtures: diffing two runs must show real
changes only. The emitter is hand-rolled because the stdlib encoder
does not let callers pin float formatting; everything else matches
``json.dumps(..., sort_keys=True, indent=2)``. Numpy scalars/arrays and
enums are converted, and non-finite numbers are rejected (they have no
JSON representation and would silently degrade downstream).
"""

from __future__ import annotations

import enum
import json
import math
from typing import IO

import numpy as np

FLOAT_FORMAT = ".12g"
_INDENT = "  "


def _normalize(value):
    if isinstance(value, enum.Enum):
        return _normalize(value.value)
    if isinstance(value, np.ndarray):
        return [_normalize(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return _normalize(float(value))
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r} is not representable")
        return value
    if isinstance(value, dict):
        out = {}
        for k, v in value.items():
            if not isinstance(k, str):
                k = str(_normalize(k))
            out[k] = _normalize(v)
        return out
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    if value is None or isinstance(value, (str, bool, int)):
        return value
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _emit(value, parts: list[str], depth: int) -> None:
    pad = _INDENT * depth
    inner = _INDENT * (depth + 1)
    if value is None:
        parts.append("null")
    elif value is True:
        parts.append("true")
    elif value is False:
        parts.append("false")
    elif isinstance(value, str):
        parts.append(json.dumps(value))
    elif isinstance(value, int):
        parts.append(str(value))
    elif isinstance(value, float):
        parts.append(format(value, FLOAT_FORMAT))
    elif isinstance(value, dict):
        if not value:
            parts.append("{}")
            return
        parts.append("{\n")
        for i, key in enumerate(sorted(value)):
            parts.append(f"{inner}{json.dumps(key)}: ")
            _emit(value[key], parts, depth + 1)
            parts.append(",\n" if i < len(value) - 1 else "\n")
        parts.append(pad + "}")
    else:  # list
        if not value:
            parts.append("[]")
            return
        parts.append("[\n")
        for i, item in enumerate(value):
            parts.append(inner)
            _emit(item, parts, depth + 1)
            parts.append(",\n" if i < len(value) - 1 else "\n")
        parts.append(pad + "]")


def dumps(obj) -> str:
    """Canonical JSON text with a trailing newline."""
    parts: list[str] = []
    _emit(_normalize(obj), parts, 0)
    parts.append("\n")
    return "".join(parts)


def dump(obj, fh: IO[str]) -> None:
    fh.write(dumps(obj))


def dump_path(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        dump(obj, fh)
