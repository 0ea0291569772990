"""JSON-lines dataset manifests and probability files."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import FormatError
from ..pseudolabel import SIMPLEX_TOLERANCE, PredictionRecord
from .canonical import dumps


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    path: str
    label: int | None = None


def _json_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"malformed JSON: {exc.msg}", path, lineno) from None
            if not isinstance(obj, dict):
                raise FormatError("each line must be a JSON object", path, lineno)
            yield lineno, obj


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def read_manifest(path, num_classes: int | None = None, require_labels: bool = False,
                  resolve: bool = False) -> list[ManifestEntry]:
    """Parse a manifest, one ``{"id", "path", "label"?}`` object per line.

    With ``resolve=True`` relative image paths are joined to the manifest's
    directory.
    """
    base = Path(path).parent
    entries = []
    seen: dict[str, int] = {}
    for lineno, obj in _json_lines(path):
        sid, spath, label = obj.get("id"), obj.get("path"), obj.get("label")
        if not isinstance(sid, str) or not sid:
            raise FormatError("missing or non-string 'id'", path, lineno)
        if not isinstance(spath, str) or not spath:
            raise FormatError(f"sample {sid!r}: missing or non-string 'path'", path, lineno)
        if sid in seen:
            raise FormatError(f"duplicate id {sid!r} (first seen on line {seen[sid]})", path, lineno)
        if label is not None:
            if not _is_int(label) or label < 0:
                raise FormatError(f"sample {sid!r}: label must be a non-negative integer", path, lineno)
            if num_classes is not None and label >= num_classes:
                raise FormatError(f"sample {sid!r}: label {label} outside {num_classes} classes", path, lineno)
        elif require_labels:
            raise FormatError(f"sample {sid!r}: label required", path, lineno)
        seen[sid] = lineno
        if resolve and not os.path.isabs(spath):
            spath = str(base / spath)
        entries.append(ManifestEntry(sid, spath, label))
    return entries


def write_manifest(entries, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for e in entries:
            obj = {"id": e.id, "path": str(e.path)}
            if e.label is not None:
                obj["label"] = e.label
            fh.write(dumps(obj, indent=None) + "\n")


def read_probs(path):
    """Parse ``{"id", "probs"}`` lines into prediction records.

    Vectors whose sum is off by at most 1e-6 are renormalised; anything
    further from the simplex is rejected.
    """
    records = []
    seen: dict[str, int] = {}
    k = None
    for lineno, obj in _json_lines(path):
        sid, probs = obj.get("id"), obj.get("probs")
        if not isinstance(sid, str) or not sid:
            raise FormatError("missing or non-string 'id'", path, lineno)
        if sid in seen:
            raise FormatError(f"duplicate id {sid!r} (first seen on line {seen[sid]})", path, lineno)
        if not isinstance(probs, list) or not all(
                isinstance(p, (int, float)) and not isinstance(p, bool) for p in probs):
            raise FormatError(f"sample {sid!r}: 'probs' must be a list of numbers", path, lineno)
        vec = np.asarray(probs, dtype=np.float64)
        if vec.size < 2:
            raise FormatError(f"sample {sid!r}: need at least 2 class probabilities", path, lineno)
        if k is None:
            k = vec.size
        elif vec.size != k:
            raise FormatError(f"sample {sid!r}: {vec.size} classes, earlier rows have {k}", path, lineno)
        if not np.all(np.isfinite(vec)) or np.any(vec < 0) or np.any(vec > 1):
            raise FormatError(f"sample {sid!r}: probabilities must lie in [0, 1]", path, lineno)
        total = float(vec.sum())
        if abs(total - 1.0) > SIMPLEX_TOLERANCE:
            raise FormatError(f"sample {sid!r}: probabilities sum to {total:.9g}, not 1", path, lineno)
        if total != 1.0:
            vec = vec / total
        seen[sid] = lineno
        records.append(PredictionRecord(sid, vec))
    return records


def write_probs(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(dumps({"id": r.id, "probs": [float(p) for p in r.probs]}, indent=None) + "\n")
