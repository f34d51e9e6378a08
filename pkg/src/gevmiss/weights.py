"""Block records and censoring weights.

A block's censoring status says whether its observed maximum is known to
be the true block maximum (complete), known not to be (censored), or
unknown because observations are missing. The weight of a block is the
estimated probability that its observed maximum is the true one; the
three estimators here differ in what they condition on.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .gev import GevParams

__all__ = [
    "CensorStatus",
    "BlockRecord",
    "WeightedSample",
    "weight_unconditional",
    "weight_conditional_empirical",
    "weight_em",
]


class CensorStatus(IntEnum):
    """Tri-state censoring indicator for a block maximum."""

    CENSORED = 0   # observed max known to undershoot the true max
    COMPLETE = 1   # observed max known to equal the true max
    UNKNOWN = -1   # block has missing observations, status unobserved


@dataclass(frozen=True)
class BlockRecord:
    """One block: observed maximum, observed/missing counts, status.

    ``max`` is None when every observation in the block is missing
    (n_obs = 0). A block without missing observations is necessarily
    complete; passing status=None infers COMPLETE/UNKNOWN from n_miss.
    ``year`` is an optional provenance label used by the CSV interfaces.
    """

    max: float | None
    n_obs: int
    n_miss: int
    status: CensorStatus | None = None
    year: int | None = None

    def __post_init__(self) -> None:
        if self.n_obs < 0 or self.n_miss < 0:
            raise ValueError("counts must be non-negative")
        if self.n_obs == 0 and self.max is not None:
            raise ValueError("a block with no observations has no maximum")
        if self.n_obs > 0:
            if self.max is None or not np.isfinite(self.max):
                raise ValueError("observed block maximum must be finite")
        if self.status is None:
            inferred = CensorStatus.COMPLETE if self.n_miss == 0 else CensorStatus.UNKNOWN
            object.__setattr__(self, "status", inferred)
        elif self.n_miss == 0 and self.status != CensorStatus.COMPLETE:
            raise ValueError("a block without missing observations is complete")


@dataclass(frozen=True)
class WeightedSample:
    """Block maxima paired with censoring weights in [0, 1]."""

    maxima: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        maxima = np.ascontiguousarray(self.maxima, dtype=float)
        weights = np.ascontiguousarray(self.weights, dtype=float)
        if maxima.ndim != 1 or maxima.shape != weights.shape:
            raise ValueError("maxima and weights must be 1-d arrays of equal length")
        if maxima.size == 0:
            raise ValueError("sample is empty")
        if not np.all(np.isfinite(maxima)):
            raise ValueError("maxima must be finite")
        if np.any(weights < 0.0) or np.any(weights > 1.0):
            raise ValueError("weights must lie in [0, 1]")
        object.__setattr__(self, "maxima", maxima)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return int(self.maxima.size)


def _pinned(block: BlockRecord) -> float | None:
    # labeled blocks keep weight exactly 1 or 0 under every scheme
    if block.status == CensorStatus.COMPLETE:
        return 1.0
    if block.status == CensorStatus.CENSORED:
        return 0.0
    return None


def weight_unconditional(block: BlockRecord) -> float:
    """Proportion of non-missing observations within the block.

    Unconditionally, the true maximum of a block falls among the
    observed entries with probability n_obs/(n_obs + n_miss).
    """
    total = block.n_obs + block.n_miss
    if total <= 0:
        raise ValueError("empty block")
    pinned = _pinned(block)
    if pinned is not None:
        return pinned
    return block.n_obs / total


def weight_conditional_empirical(
    block: BlockRecord, all_observed, *, assume_sorted: bool = False
) -> float:
    """Empirical probability that no missing draw beat the observed max.

    Uses the pooled empirical CDF of every observed series value across
    all blocks (ties counted with <=, so the pooled maximum gets F=1),
    raised to the number of missing observations in the block.
    """
    pool = np.asarray(all_observed, dtype=float)
    if pool.size == 0:
        raise ValueError("empty observation pool")
    if block.max is None:
        raise ValueError("block has no observed maximum")
    pinned = _pinned(block)
    if pinned is not None:
        return pinned
    if not assume_sorted:
        pool = np.sort(pool)
    f_hat = np.searchsorted(pool, block.max, side="right") / pool.size
    return float(f_hat**block.n_miss)


def weight_em(block: BlockRecord, theta: GevParams) -> float:
    """Fitted-model probability that the observed maximum is the true one,
    evaluated as the GEV CDF at the observed maximum. Applied to unknown
    blocks only; labeled blocks keep their 1/0 weight."""
    if block.max is None:
        raise ValueError("block has no observed maximum")
    pinned = _pinned(block)
    if pinned is not None:
        return pinned
    return float(theta.cdf(block.max))
