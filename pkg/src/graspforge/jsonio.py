"""Deterministic JSON text with floats written to 17 significant digits."""
from __future__ import annotations

import hashlib
import json
import math

import numpy as np


def _float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    s = format(x, ".17g")
    # keep floats recognizable as floats when read back
    if not any(ch in s for ch in ".eEn"):
        s += ".0"
    return s


def dumps(obj, indent: int = None) -> str:
    """Serialize ``obj``; key order is preserved, floats use 17 significant digits."""
    return _dump(obj, indent, 0)


def _dump(obj, indent, level) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _dump(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        items = [(json.dumps(str(k), ensure_ascii=False), v) for k, v in obj.items()]
        if not items:
            return "{}"
        if indent is None:
            return "{" + ",".join(f"{k}:{_dump(v, None, 0)}" for k, v in items) + "}"
        pad = " " * (indent * (level + 1))
        inner = ",\n".join(f"{pad}{k}: {_dump(v, indent, level + 1)}" for k, v in items)
        return "{\n" + inner + "\n" + " " * (indent * level) + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if indent is None:
            return "[" + ",".join(_dump(v, None, 0) for v in obj) + "]"
        pad = " " * (indent * (level + 1))
        inner = ",\n".join(pad + _dump(v, indent, level + 1) for v in obj)
        return "[\n" + inner + "\n" + " " * (indent * level) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def sha256_hex(data) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def content_hash(obj, length: int = 16) -> str:
    """Short stable hash of the canonical compact serialization."""
    return sha256_hex(dumps(obj))[:length]
