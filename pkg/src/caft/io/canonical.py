"""Canonical JSON: sorted keys, 17 significant digits, fixed layout.

Two equal structures always serialise to the same bytes, which is what makes
golden-file comparisons exact.
"""

from __future__ import annotations

import json
import math

FORMAT_VERSION = 1


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x!r}")
    s = f"{x:.17g}"
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int | None = 2) -> str:
    """Serialise ``obj``; ``indent=None`` gives a single compact line."""
    return _encode(obj, indent, 0)


def _encode(obj, indent, level) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(int(obj))
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if hasattr(obj, "item") and not isinstance(obj, (list, tuple, dict)):
        return _encode(obj.item(), indent, level)
    if isinstance(obj, dict):
        items = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            items.append(json.dumps(key, ensure_ascii=True) + ": " + _encode(obj[key], indent, level + 1))
        return _wrap("{", "}", items, indent, level)
    if isinstance(obj, (list, tuple)):
        return _wrap("[", "]", [_encode(v, indent, level + 1) for v in obj], indent, level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _wrap(open_, close, items, indent, level) -> str:
    if not items:
        return open_ + close
    if indent is None:
        return open_ + ", ".join(items) + close
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    return open_ + "\n" + ",\n".join(pad + it for it in items) + "\n" + end + close


def write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj) + "\n")
