"""Nonparametric bootstrap for fitted GEV parameters and return levels.

The resampling unit is the whole block record, so a maximum travels with
its observed/missing counts and censoring status; with every block
complete this reduces to plain resampling of the maxima. For the softc
method the pooled empirical CDF from the original full series is reused
across resamples (the series itself is not resampled, only the block
records are), so each record keeps the weight implied by the original
pool.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import FitError, fit
from .formatting import fmt6

__all__ = ["BootSummary", "bootstrap_fit", "boot_summary_to_csv"]


@dataclass(frozen=True)
class BootSummary:
    """Bootstrap standard errors and percentile intervals.

    ``quantities`` names each column: the three parameters followed by
    one return level per requested period. ``flagged`` is set when more
    than 10% of resamples failed to converge.
    """

    method: str
    B: int
    alpha: float
    quantities: tuple[str, ...]
    estimate: tuple[float, ...]
    se: tuple[float, ...]
    ci_lo: tuple[float, ...]
    ci_hi: tuple[float, ...]
    failures: int
    flagged: bool


def bootstrap_fit(
    method: str,
    blocks,
    series_pool=None,
    B: int = 1000,
    alpha: float = 0.05,
    seed: int = 0,
    periods=(20.0, 50.0, 100.0),
) -> BootSummary:
    """Resample block records with replacement, refit, and summarize.

    Deterministic given the seed; resample index draws are generated up
    front in resample order, so aggregation is independent of execution
    order. Resamples whose fit fails or does not converge are dropped
    and counted in ``failures``.
    """
    if B < 100:
        raise ValueError("B must be at least 100")
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0, 1)")
    blocks = list(blocks)
    periods = [float(p) for p in periods]
    point = fit(method, blocks, series_pool=series_pool)

    quantities = ("loc", "scale", "shape") + tuple(f"rl_{fmt6(p)}" for p in periods)
    est = [point.params.loc, point.params.scale, point.params.shape]
    est += [float(point.params.return_level(p)) for p in periods]

    k = len(blocks)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, k, size=(B, k))
    values = np.full((B, len(quantities)), np.nan)
    failures = 0
    for b in range(B):
        resampled = [blocks[i] for i in idx[b]]
        try:
            res = fit(method, resampled, series_pool=series_pool)
        except (FitError, ValueError):
            res = None
        if res is None or not res.converged:
            failures += 1
            continue
        row = [res.params.loc, res.params.scale, res.params.shape]
        row += [float(res.params.return_level(p)) for p in periods]
        values[b] = row
    good = values[~np.isnan(values[:, 0])]
    if good.shape[0] < 2:
        raise FitError(f"only {good.shape[0]} of {B} bootstrap resamples converged")
    se = good.std(axis=0, ddof=1)
    lo = np.percentile(good, 100.0 * alpha / 2.0, axis=0)
    hi = np.percentile(good, 100.0 * (1.0 - alpha / 2.0), axis=0)
    return BootSummary(
        method=str(method).lower(),
        B=B,
        alpha=alpha,
        quantities=quantities,
        estimate=tuple(float(v) for v in est),
        se=tuple(float(v) for v in se),
        ci_lo=tuple(float(v) for v in lo),
        ci_hi=tuple(float(v) for v in hi),
        failures=failures,
        flagged=(B - failures) < 0.9 * B,
    )


def boot_summary_to_csv(summary: BootSummary) -> str:
    """Render the summary as CSV rows, one line per quantity."""
    lines = ["method,quantity,estimate,se,ci_lo,ci_hi,B,failures"]
    for i, q in enumerate(summary.quantities):
        lines.append(
            ",".join(
                [
                    summary.method,
                    q,
                    fmt6(summary.estimate[i]),
                    fmt6(summary.se[i]),
                    fmt6(summary.ci_lo[i]),
                    fmt6(summary.ci_hi[i]),
                    str(summary.B),
                    str(summary.failures),
                ]
            )
        )
    return "\n".join(lines) + "\n"
