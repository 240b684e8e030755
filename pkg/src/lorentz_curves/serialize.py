"""Deterministic JSON output: fixed field order, floats with 17 significant digits."""

from __future__ import annotations

import enum
import json
import math

import numpy as np


def _plain(obj):
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return obj


def _float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if not any(c in text for c in ".eEn"):
        text += ".0"
    return text


def _encode(obj, indent, level, out):
    obj = _plain(obj)
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ", " if indent is None else ","
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            out.append((sep if i else "") + pad + json.dumps(str(k)) + ": ")
            _encode(v, indent, level + 1, out)
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        if all(_plain(v) is None or isinstance(_plain(v), (int, float)) for v in obj):
            # scalar arrays stay on one line
            out.append("[")
            for i, v in enumerate(obj):
                out.append(", " if i else "")
                _encode(v, indent, level + 1, out)
            out.append("]")
            return
        out.append("[")
        for i, v in enumerate(obj):
            out.append((sep if i else "") + pad)
            _encode(v, indent, level + 1, out)
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int | None = 2) -> str:
    """Serialize ``obj`` to JSON text.

    Dict order is preserved, floats are printed with ``.17g`` (so they
    round-trip exactly) and non-finite floats become ``null``.  Objects with a
    ``to_dict`` method, numpy scalars/arrays and enums are converted first.
    """
    out: list[str] = []
    _encode(obj, indent, 0, out)
    return "".join(out)
