"""Closed-form trainer quantities: pseudo-label cross-entropy and LR decay."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError

LOG_FLOOR = 1e-12
DEFAULT_MU0 = 0.01
DEFAULT_BETA = 0.75


@dataclass(frozen=True)
class ScheduleParams:
    mu0: float = DEFAULT_MU0
    beta: float = DEFAULT_BETA
    total_epochs: int = 1

    def __post_init__(self):
        for name in ("mu0", "beta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be finite and positive, got {v}")
        if isinstance(self.total_epochs, bool) or int(self.total_epochs) != self.total_epochs \
                or self.total_epochs < 1:
            raise ValidationError(f"total_epochs must be a positive integer, got {self.total_epochs}")


def lr_at(params: ScheduleParams, epoch: float) -> float:
    """``mu0 / (1 + 10 p) ** beta`` with progress ``p = epoch / total_epochs``.

    ``epoch`` may be fractional, e.g. an iteration count scaled to epochs.
    """
    if not 0 <= epoch <= params.total_epochs:
        raise ValidationError(f"epoch {epoch} outside [0, {params.total_epochs}]")
    p = epoch / params.total_epochs
    return params.mu0 / (1.0 + 10.0 * p) ** params.beta


def pseudo_ce_diagnostics(probs: Sequence[Sequence[float]], labels: Sequence[int]) -> tuple[float, int]:
    """Mean negative log-probability of each sample's pseudo label.

    Also returns how many samples hit the 1e-12 probability floor.
    """
    p = np.asarray(probs, dtype=np.float64)
    y = np.asarray(labels)
    if p.ndim != 2 or p.shape[0] == 0:
        raise ValidationError("probs must be a non-empty list of K-vectors")
    if y.shape != (p.shape[0],):
        raise ValidationError(f"{p.shape[0]} probability vectors but {y.size} labels")
    if not np.issubdtype(y.dtype, np.integer) or np.any(y < 0) or np.any(y >= p.shape[1]):
        raise ValidationError(f"labels must be integers in [0, {p.shape[1]})")
    picked = p[np.arange(p.shape[0]), y]
    clipped = int(np.count_nonzero(picked < LOG_FLOOR))
    loss = -float(np.mean(np.log(np.maximum(picked, LOG_FLOOR))))
    return loss + 0.0, clipped


def pseudo_ce(probs: Sequence[Sequence[float]], labels: Sequence[int]) -> float:
    return pseudo_ce_diagnostics(probs, labels)[0]
