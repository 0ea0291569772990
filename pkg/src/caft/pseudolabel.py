"""Clean/noisy pseudo-label partitioning.

Every target prediction is reduced to one confidence score (by default the
gap between its two largest class probabilities), a two-component 1-D
Gaussian mixture is fitted to the scores by EM, and a sample is kept as
clean when the component on the confident side owns it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Mapping, Sequence

import numpy as np

from .errors import ValidationError

Method = Literal["adt2p", "entropy"]

VARIANCE_FLOOR = 1e-8
LOGLIK_TOL = 1e-6
MAX_ITER = 200
SIMPLEX_TOLERANCE = 1e-6


@dataclass(frozen=True)
class PredictionRecord:
    id: str
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size < 2:
            raise ValidationError(f"{self.id}: need a vector of at least 2 probabilities")
        if np.any(probs < 0) or np.any(probs > 1) or abs(probs.sum() - 1.0) > SIMPLEX_TOLERANCE:
            raise ValidationError(f"{self.id}: probabilities are not a distribution")
        object.__setattr__(self, "probs", probs)


@dataclass(frozen=True)
class GmmParams:
    """Fitted mixture, components ordered by ascending mean."""

    xi: tuple[float, float]
    mu: tuple[float, float]
    sigma2: tuple[float, float]
    loglik: float
    iters: int
    degenerate: bool = False
    history: tuple[float, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class PartitionEntry:
    id: str
    pseudo_label: int
    adt2p: float
    score: float
    posterior_clean: float
    verdict: Literal["clean", "noisy"]


@dataclass(frozen=True)
class PartitionReport:
    params: GmmParams
    entries: tuple[PartitionEntry, ...]
    method: Method = "adt2p"

    @property
    def degenerate(self) -> bool:
        return self.params.degenerate

    @property
    def clean_ids(self) -> list[str]:
        return [e.id for e in self.entries if e.verdict == "clean"]

    @property
    def noisy_ids(self) -> list[str]:
        return [e.id for e in self.entries if e.verdict == "noisy"]


def adt2p(probs) -> float:
    """Absolute difference between the two largest probabilities."""
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise ValidationError("adt2p needs at least two class probabilities")
    top2 = np.partition(p, p.size - 2)[-2:]
    return float(abs(top2[1] - top2[0]))


def entropy_score(probs) -> float:
    """Shannon entropy in nats, with 0 * ln 0 taken as 0."""
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or p.size < 1:
        raise ValidationError("entropy needs at least one class probability")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz))) + 0.0


def pseudo_label(probs) -> int:
    # np.argmax returns the first maximum, i.e. the lowest class index on ties
    return int(np.argmax(np.asarray(probs)))


def _log_weighted(x: np.ndarray, xi, mu, sigma2) -> np.ndarray:
    xi, mu, sigma2 = (np.asarray(v, dtype=np.float64) for v in (xi, mu, sigma2))
    with np.errstate(divide="ignore"):
        log_xi = np.log(xi)
    d = x[:, None] - mu[None, :]
    return log_xi - 0.5 * (np.log(2 * np.pi * sigma2) + d * d / sigma2)


def _logsumexp(a: np.ndarray) -> np.ndarray:
    m = np.max(a, axis=1, keepdims=True)
    return (m + np.log(np.sum(np.exp(a - m), axis=1, keepdims=True)))[:, 0]


def fit_gmm2(scores, tol: float = LOGLIK_TOL, max_iter: int = MAX_ITER,
             floor: float = VARIANCE_FLOOR) -> GmmParams:
    """Fit a two-component 1-D Gaussian mixture by EM.

    Starts from means at the 25th/75th percentiles, both variances at the
    (floored) sample variance and equal weights. Stops once the
    log-likelihood gains less than ``tol`` or after ``max_iter`` updates.
    Identical scores give a flagged degenerate fit with both components at
    the common value.
    """
    x = np.sort(np.asarray(scores, dtype=np.float64).ravel())
    n = x.size
    if n < 4:
        raise ValidationError(f"need at least 4 scores to fit the mixture, got {n}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("scores must be finite")
    if x[0] == x[-1]:
        v = float(x[0])
        return GmmParams((0.5, 0.5), (v, v), (floor, floor), math.nan, 0, degenerate=True)

    mu = np.percentile(x, [25, 75])
    if mu[0] == mu[1]:
        mu = np.array([x[0], x[-1]])
    sigma2 = np.full(2, max(float(np.var(x)), floor))
    xi = np.array([0.5, 0.5])

    history = []
    iters = 0
    while True:
        log_w = _log_weighted(x, xi, mu, sigma2)
        lse = _logsumexp(log_w)
        ll = float(np.sum(lse))
        if history:
            prev = history[-1]
            assert ll >= prev - 1e-9 * max(1.0, abs(prev)), "EM log-likelihood decreased"
        history.append(ll)
        if len(history) > 1 and ll - history[-2] < tol:
            break
        if iters >= max_iter:
            break
        resp = np.exp(log_w - lse[:, None])
        nk = resp.sum(axis=0)
        for j in range(2):
            if nk[j] <= 0:
                # an emptied component keeps its shape and drops out via xi = 0
                xi[j] = 0.0
                continue
            xi[j] = nk[j] / n
            mu[j] = np.sum(resp[:, j] * x) / nk[j]
            d = x - mu[j]
            sigma2[j] = max(float(np.sum(resp[:, j] * d * d) / nk[j]), floor)
        xi = xi / xi.sum()
        iters += 1

    order = np.argsort(mu, kind="stable")
    return GmmParams(
        xi=tuple(float(v) for v in xi[order]),
        mu=tuple(float(v) for v in mu[order]),
        sigma2=tuple(float(v) for v in sigma2[order]),
        loglik=ll,
        iters=iters,
        history=tuple(history),
    )


def posterior(params: GmmParams, scores) -> np.ndarray:
    """Per-sample component responsibilities, shape ``(n, 2)``."""
    x = np.atleast_1d(np.asarray(scores, dtype=np.float64))
    if params.degenerate:
        return np.full((x.size, 2), 0.5)
    log_w = _log_weighted(x, params.xi, params.mu, params.sigma2)
    return np.exp(log_w - _logsumexp(log_w)[:, None])


def clean_component(method: Method) -> int:
    """Index of the component holding clean samples for a score type.

    A wide top-2 gap means confidence, so the high-mean component is clean
    for ADT2P; low entropy means confidence, so the low-mean one is clean.
    """
    if method == "adt2p":
        return 1
    if method == "entropy":
        return 0
    raise ValidationError(f"unknown method {method!r}")


def partition(records: Sequence[PredictionRecord], method: Method = "adt2p") -> PartitionReport:
    if len(records) < 4:
        raise ValidationError(f"need at least 4 records, got {len(records)}")
    idx = clean_component(method)
    gaps = np.array([adt2p(r.probs) for r in records])
    scores = gaps if method == "adt2p" else np.array([entropy_score(r.probs) for r in records])
    params = fit_gmm2(scores)
    if params.degenerate:
        post = np.ones(len(records))
    else:
        post = posterior(params, scores)[:, idx]
    entries = tuple(
        PartitionEntry(
            id=r.id,
            pseudo_label=pseudo_label(r.probs),
            adt2p=float(g),
            score=float(s),
            posterior_clean=float(pc),
            verdict="clean" if pc > 0.5 else "noisy",
        )
        for r, g, s, pc in zip(records, gaps, scores, post)
    )
    return PartitionReport(params, entries, method)


def build_dictionary(report: PartitionReport) -> dict[int, list[str]]:
    """Group clean sample ids by pseudo label; noisy samples are dropped."""
    groups: dict[int, list[str]] = {}
    for e in report.entries:
        if e.verdict == "clean":
            groups.setdefault(e.pseudo_label, []).append(e.id)
    return {k: groups[k] for k in sorted(groups)}


def evaluate(report: PartitionReport, truth: Mapping[str, int]) -> dict:
    """Precision and recall of the clean set against ground-truth labels.

    A ratio with a zero denominator is reported as ``None``.
    """
    missing = [e.id for e in report.entries if e.id not in truth]
    if missing:
        raise ValidationError(f"no ground truth for {len(missing)} sample(s), e.g. {missing[0]!r}")
    correct = [e.pseudo_label == truth[e.id] for e in report.entries]
    clean = [e.verdict == "clean" for e in report.entries]
    n_clean = sum(clean)
    n_correct = sum(correct)
    n_clean_correct = sum(c and k for c, k in zip(clean, correct))
    n = len(report.entries)
    return {
        "precision": n_clean_correct / n_clean if n_clean else None,
        "recall": n_clean_correct / n_correct if n_correct else None,
        "pseudo_accuracy": n_correct / n if n else None,
        "clean": n_clean,
        "correct": n_correct,
        "clean_correct": n_clean_correct,
    }
