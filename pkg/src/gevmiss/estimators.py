"""GEV fitting from block maxima under missing observations.

Five procedures share one weighted negative log-likelihood
``-sum_j [w_j log g(m_j) + (1-w_j) log Gbar(m_j)]``:

- ``obs``     every block weighted 1 (missingness ignored),
- ``hard``    weight 1 for known-complete blocks, 0 otherwise,
- ``softuc``  weight = within-block proportion of observed values,
- ``softc``   weight = pooled empirical CDF at the block max, raised to
              the block's missing count,
- ``em``      weights re-estimated each iteration from the fitted CDF.

Optimization is Nelder-Mead over (loc, log scale, shape) with
deterministic perturbed restarts; the log-scale transform removes the
positivity constraint and the off-support likelihood acts as a barrier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gev import GevParams
from .kernels import em_kernel, fit_weighted_kernel, weighted_nll_arr
from .weights import (
    BlockRecord,
    CensorStatus,
    WeightedSample,
    weight_conditional_empirical,
    weight_unconditional,
)

__all__ = [
    "METHODS",
    "FitError",
    "HessianError",
    "FitResult",
    "weighted_nll",
    "init_params",
    "fit_weighted",
    "fit",
    "fit_em",
    "fisher_se",
]

METHODS = ("obs", "hard", "softuc", "softc", "em")

_NM_TOL = 1e-8
_NM_MAX_EVALS = 4000
_NM_MAX_RESTARTS = 3


class FitError(RuntimeError):
    """Optimization failed outright (not mere nonconvergence)."""


class HessianError(RuntimeError):
    """Standard-error diagnostics failed; bootstrap instead."""


@dataclass
class FitResult:
    """Outcome of one fit: parameters, convergence diagnostics, and the
    final objective value. ``iterations`` counts EM outer loops for the
    em method and is 1 otherwise."""

    params: GevParams
    method: str
    converged: bool
    iterations: int
    final_nll: float
    dropped_blocks: int = 0
    se: tuple[float, float, float] | None = None


def weighted_nll(theta: GevParams, sample: WeightedSample) -> float:
    """Weighted censored negative log-likelihood.

    Weights of exactly 0 or 1 nullify the branch they do not use
    (0*(-inf) = 0); any active -inf term makes the result +inf.
    """
    return float(
        weighted_nll_arr(sample.maxima, sample.weights, theta.loc, theta.scale, theta.shape)
    )


def init_params(maxima) -> GevParams:
    """Gumbel moment-matching start: scale from the sample standard
    deviation, location from the mean, shape 0.1."""
    arr = np.asarray(maxima, dtype=float)
    if arr.ndim != 1:
        arr = arr.ravel()
    if np.unique(arr).size < 3:
        raise ValueError("need at least 3 distinct maxima to initialize")
    scale0 = float(np.std(arr, ddof=1)) * math.sqrt(6.0) / math.pi
    loc0 = float(np.mean(arr)) - 0.5772 * scale0
    return GevParams(loc0, scale0, 0.1)


def _steps_for(start: GevParams) -> np.ndarray:
    # initial simplex steps: location step scales with the data so the
    # optimizer trajectory is equivariant under affine data maps
    return np.array([0.1 * start.scale, 0.1, 0.05])


def fit_weighted(
    sample: WeightedSample,
    start: GevParams,
    *,
    tol: float = _NM_TOL,
    max_evals: int = _NM_MAX_EVALS,
    max_restarts: int = _NM_MAX_RESTARTS,
) -> FitResult:
    """Minimize the weighted NLL from ``start``.

    converged=True requires both the simplex diameter and the objective
    spread to fall below ``tol`` relative tolerance; otherwise the best
    point found is reported with converged=False. A start from which no
    finite objective value is ever seen raises FitError.
    """
    x0 = np.array([start.loc, math.log(start.scale), start.shape])
    x, f, conv, _evals, _att = fit_weighted_kernel(
        sample.maxima, sample.weights, x0, _steps_for(start), tol, max_evals, max_restarts
    )
    if not math.isfinite(f):
        raise FitError("objective is infinite at every evaluated point")
    params = GevParams(float(x[0]), math.exp(float(x[1])), float(x[2]))
    return FitResult(
        params=params,
        method="weighted",
        converged=bool(conv),
        iterations=1,
        final_nll=float(f),
    )


def _usable(blocks) -> tuple[list[BlockRecord], int]:
    usable = [b for b in blocks if b.n_obs > 0]
    dropped = len(blocks) - len(usable)
    if len(usable) < 3:
        raise ValueError("need at least 3 blocks with an observed maximum")
    return usable, dropped


def _build_weights(method: str, usable: list[BlockRecord], series_pool) -> np.ndarray:
    k = len(usable)
    w = np.ones(k)
    if method == "obs":
        return w
    if method == "hard":
        for i, b in enumerate(usable):
            w[i] = 1.0 if b.status == CensorStatus.COMPLETE else 0.0
        return w
    if method == "softuc":
        for i, b in enumerate(usable):
            w[i] = weight_unconditional(b)
        return w
    if method == "softc":
        if series_pool is None:
            raise ValueError("method 'softc' requires the pooled observed series")
        pool = np.sort(np.asarray(series_pool, dtype=float))
        for i, b in enumerate(usable):
            w[i] = weight_conditional_empirical(b, pool, assume_sorted=True)
        return w
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def fit(method: str, blocks, series_pool=None) -> FitResult:
    """Fit GEV parameters to block records with the chosen procedure.

    Blocks with no observed values are dropped and counted in
    ``dropped_blocks``. ``series_pool`` (every observed series value) is
    required by softc and ignored by the other methods.
    """
    method = str(method).lower()
    if method == "em":
        return fit_em(blocks)
    usable, dropped = _usable(blocks)
    maxima = np.array([b.max for b in usable])
    weights = _build_weights(method, usable, series_pool)
    sample = WeightedSample(maxima, weights)
    result = fit_weighted(sample, init_params(maxima))
    result.method = method
    result.dropped_blocks = dropped
    return result


def fit_em(blocks, eps: float = 1e-6, max_iter: int = 500) -> FitResult:
    """EM fit: start at the observed-likelihood optimum, then alternate
    reweighting unlabeled blocks by the fitted CDF at their maximum with
    refitting the weighted likelihood, until the parameter change drops
    below ``eps`` (max-norm) or ``max_iter`` outer loops.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    usable, dropped = _usable(blocks)
    maxima = np.array([b.max for b in usable])
    obs_fit = fit_weighted(WeightedSample(maxima, np.ones(len(usable))), init_params(maxima))

    w_fixed = np.ones(len(usable))
    unknown = np.zeros(len(usable), dtype=bool)
    for i, b in enumerate(usable):
        if b.status == CensorStatus.CENSORED:
            w_fixed[i] = 0.0
        elif b.status == CensorStatus.UNKNOWN:
            unknown[i] = True

    start = obs_fit.params
    x0 = np.array([start.loc, math.log(start.scale), start.shape])
    x, f, _w, outer, conv, failed_iter = em_kernel(
        maxima,
        w_fixed,
        unknown,
        x0,
        _steps_for(start),
        _NM_TOL,
        _NM_MAX_EVALS,
        _NM_MAX_RESTARTS,
        eps,
        max_iter,
    )
    if failed_iter >= 0:
        raise FitError(f"M-step failed to converge at EM iteration {failed_iter}")
    params = GevParams(float(x[0]), math.exp(float(x[1])), float(x[2]))
    return FitResult(
        params=params,
        method="em",
        converged=bool(conv),
        iterations=int(outer),
        final_nll=float(f),
        dropped_blocks=dropped,
    )


def fisher_se(theta: GevParams, maxima) -> tuple[float, float, float]:
    """Standard errors from the observed Fisher information.

    Central-difference Hessian (relative step 1e-4) of the all-weights-1
    negative log-likelihood at ``theta``, inverted; raises HessianError
    when the Hessian is not positive definite, in which case bootstrap
    standard errors should be used instead.
    """
    arr = np.ascontiguousarray(maxima, dtype=float)
    ones = np.ones(arr.size)

    def nll(p: np.ndarray) -> float:
        if p[1] <= 0:
            return math.inf
        return float(weighted_nll_arr(arr, ones, p[0], p[1], p[2]))

    p0 = np.array([theta.loc, theta.scale, theta.shape])
    if not math.isfinite(nll(p0)):
        raise HessianError("likelihood not finite at theta; use bootstrap standard errors")
    h = 1e-4 * np.maximum(np.abs(p0), 1.0)
    hess = np.empty((3, 3))
    for i in range(3):
        ei = np.zeros(3)
        ei[i] = h[i]
        hess[i, i] = (nll(p0 + ei) - 2.0 * nll(p0) + nll(p0 - ei)) / h[i] ** 2
        for j in range(i + 1, 3):
            ej = np.zeros(3)
            ej[j] = h[j]
            hess[i, j] = hess[j, i] = (
                nll(p0 + ei + ej) - nll(p0 + ei - ej) - nll(p0 - ei + ej) + nll(p0 - ei - ej)
            ) / (4.0 * h[i] * h[j])
    if not np.all(np.isfinite(hess)):
        raise HessianError("Hessian not finite near theta; use bootstrap standard errors")
    try:
        np.linalg.cholesky(hess)
        cov = np.linalg.inv(hess)
    except np.linalg.LinAlgError as exc:
        raise HessianError(
            "observed information is not positive definite; use bootstrap standard errors"
        ) from exc
    diag = np.diag(cov)
    if np.any(diag <= 0):
        raise HessianError(
            "observed information is not positive definite; use bootstrap standard errors"
        )
    se = np.sqrt(diag)
    return float(se[0]), float(se[1]), float(se[2])
