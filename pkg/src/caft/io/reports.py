"""Partition reports and provenance logs as canonical JSON."""

from __future__ import annotations

import json

from ..errors import FormatError
from ..pseudolabel import GmmParams, PartitionEntry, PartitionReport, build_dictionary, clean_component
from .canonical import FORMAT_VERSION, write_json


def partition_report_to_dict(report: PartitionReport) -> dict:
    p = report.params
    return {
        "format_version": FORMAT_VERSION,
        "method": report.method,
        "degenerate": p.degenerate,
        "clean_component": clean_component(report.method),
        "params": {
            "xi": list(p.xi),
            "mu": list(p.mu),
            "sigma2": list(p.sigma2),
            "loglik": None if p.degenerate else p.loglik,
            "iters": p.iters,
        },
        "entries": [
            {
                "id": e.id,
                "pseudo_label": e.pseudo_label,
                "adt2p": e.adt2p,
                "score": e.score,
                "posterior_clean": e.posterior_clean,
                "verdict": e.verdict,
            }
            for e in report.entries
        ],
        "clean": report.clean_ids,
        "noisy": report.noisy_ids,
        "dictionary": {str(k): v for k, v in build_dictionary(report).items()},
    }


def write_partition_report(report: PartitionReport, path) -> None:
    write_json(partition_report_to_dict(report), path)


def _need(obj, key, kind, path):
    if key not in obj:
        raise FormatError(f"missing field {key!r}", path)
    value = obj[key]
    if kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise FormatError(f"field {key!r} has the wrong type", path)
    return value


def read_partition_report(path) -> PartitionReport:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc.msg}", path, exc.lineno) from None
    if not isinstance(obj, dict):
        raise FormatError("partition report must be a JSON object", path)
    version = obj.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {version!r}", path)
    method = _need(obj, "method", str, path)
    if method not in ("adt2p", "entropy"):
        raise FormatError(f"unknown method {method!r}", path)
    degenerate = _need(obj, "degenerate", bool, path)
    raw = _need(obj, "params", dict, path)
    pairs = {}
    for key in ("xi", "mu", "sigma2"):
        v = _need(raw, key, list, path)
        if len(v) != 2 or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v):
            raise FormatError(f"params.{key} must hold two numbers", path)
        pairs[key] = (float(v[0]), float(v[1]))
    loglik = raw.get("loglik")
    params = GmmParams(pairs["xi"], pairs["mu"], pairs["sigma2"],
                       float("nan") if loglik is None else float(loglik),
                       _need(raw, "iters", int, path), degenerate)
    entries = []
    seen = set()
    for i, e in enumerate(_need(obj, "entries", list, path)):
        if not isinstance(e, dict):
            raise FormatError(f"entry {i} is not an object", path)
        sid = _need(e, "id", str, path)
        if sid in seen:
            raise FormatError(f"duplicate id {sid!r} in entries", path)
        seen.add(sid)
        verdict = _need(e, "verdict", str, path)
        if verdict not in ("clean", "noisy"):
            raise FormatError(f"entry {sid!r}: verdict must be 'clean' or 'noisy'", path)
        label = _need(e, "pseudo_label", int, path)
        if label < 0:
            raise FormatError(f"entry {sid!r}: negative pseudo label", path)
        entries.append(PartitionEntry(
            id=sid,
            pseudo_label=label,
            adt2p=float(_need(e, "adt2p", float, path)),
            score=float(_need(e, "score", float, path)),
            posterior_clean=float(_need(e, "posterior_clean", float, path)),
            verdict=verdict,
        ))
    return PartitionReport(params, tuple(entries), method)


def write_provenance_log(log: dict, path) -> None:
    write_json({"format_version": FORMAT_VERSION, **log}, path)
