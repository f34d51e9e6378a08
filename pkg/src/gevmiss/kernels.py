"""Numerical kernels for GEV evaluation and weighted-likelihood fitting.

Everything in this module is written so that the same source runs either
compiled by numba (the default) or as plain numpy. Set the environment
variable ``GEVMISS_DISABLE_NUMBA=1`` before import to force the numpy
fallback; ``NUMBA_ENABLED`` records which path is active.

Kernels take plain floats and float64 arrays, never package objects, so
they stay compilable. The public modules wrap them.
"""

from __future__ import annotations

import math
import os

import numpy as np

DISABLE_ENV = "GEVMISS_DISABLE_NUMBA"

# Below this |shape| the Gumbel branch is used; the two branches agree to
# well under 1e-6 there, so the switch is invisible at the tested scale.
XI_ZERO_EPS = 1e-8

NUMBA_ENABLED = os.environ.get(DISABLE_ENV, "").strip().lower() not in ("1", "true", "yes")
if NUMBA_ENABLED:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    def _jit(fn):
        return _njit(cache=True)(fn)
else:
    def _jit(fn):
        return fn


@_jit
def gev_logpdf_arr(z, loc, scale, shape):
    # log g(z); -inf outside support. Stable near shape=0 via log1p.
    s = (z - loc) / scale
    if abs(shape) < XI_ZERO_EPS:
        return -math.log(scale) - s - np.exp(-s)
    u = shape * s
    ok = u > -1.0
    logt = np.log1p(np.where(ok, u, 0.0))
    val = -math.log(scale) - (1.0 + 1.0 / shape) * logt - np.exp(-logt / shape)
    return np.where(ok, val, -np.inf)


@_jit
def gev_cdf_arr(z, loc, scale, shape):
    s = (z - loc) / scale
    if abs(shape) < XI_ZERO_EPS:
        return np.exp(-np.exp(-s))
    u = shape * s
    ok = u > -1.0
    logt = np.log1p(np.where(ok, u, 0.0))
    g = np.exp(-np.exp(-logt / shape))
    # off-support: below the lower endpoint (shape>0) G=0, above the upper
    # endpoint (shape<0) G=1
    off = 0.0 if shape > 0.0 else 1.0
    return np.where(ok, g, off)


@_jit
def gev_sf_arr(z, loc, scale, shape):
    # survival 1-G via expm1 so precision survives G -> 1
    s = (z - loc) / scale
    if abs(shape) < XI_ZERO_EPS:
        return -np.expm1(-np.exp(-s))
    u = shape * s
    ok = u > -1.0
    logt = np.log1p(np.where(ok, u, 0.0))
    sf = -np.expm1(-np.exp(-logt / shape))
    off = 1.0 if shape > 0.0 else 0.0
    return np.where(ok, sf, off)


@_jit
def gev_logsf_arr(z, loc, scale, shape):
    s = (z - loc) / scale
    if abs(shape) < XI_ZERO_EPS:
        y = np.exp(-s)
    else:
        u = shape * s
        ok = u > -1.0
        logt = np.log1p(np.where(ok, u, 0.0))
        # off-support y: +inf gives sf=1 (log 0.0) below a shape>0 lower
        # endpoint, 0 gives sf=0 (log -> -inf) above a shape<0 upper endpoint
        off = np.inf if shape > 0.0 else 0.0
        y = np.where(ok, np.exp(-logt / shape), off)
    sf = -np.expm1(-y)
    pos = sf > 0.0
    return np.where(pos, np.log(np.where(pos, sf, 1.0)), -np.inf)


@_jit
def gev_quantile_arr(q, loc, scale, shape):
    # closed-form inverse of each branch; q validated by the caller
    y = -np.log(q)
    if abs(shape) < XI_ZERO_EPS:
        return loc - scale * np.log(y)
    return loc + scale * np.expm1(-shape * np.log(y)) / shape


@_jit
def weighted_nll_arr(maxima, weights, loc, scale, shape):
    # -sum_j [w_j log g(m_j) + (1-w_j) log Gbar(m_j)], with weights of
    # exactly 0 or 1 nullifying the branch they do not use; +inf when any
    # active term is -inf.
    lp = gev_logpdf_arr(maxima, loc, scale, shape)
    lsf = gev_logsf_arr(maxima, loc, scale, shape)
    wm = np.minimum(np.maximum(weights, 1e-12), 1.0 - 1e-12)
    mixed = wm * lp + (1.0 - wm) * lsf
    act = np.where(weights >= 1.0, lp, np.where(weights <= 0.0, lsf, mixed))
    total = np.sum(act)
    if not math.isfinite(total):
        return math.inf
    return -total


@_jit
def _nll_at(x, maxima, weights):
    # x = (loc, log scale, shape)
    return weighted_nll_arr(maxima, weights, x[0], math.exp(x[1]), x[2])


@_jit
def nelder_mead_nll(maxima, weights, x0, steps, tol, max_evals):
    """Minimize the weighted NLL over (loc, log scale, shape).

    Plain Nelder-Mead with relative convergence on both the simplex
    diameter and the objective spread. Returns (x, f, converged, evals).
    """
    n = 3
    verts = np.empty((n + 1, n))
    fvals = np.empty(n + 1)
    for i in range(n + 1):
        for d in range(n):
            verts[i, d] = x0[d]
        if i > 0:
            verts[i, i - 1] += steps[i - 1]
        fvals[i] = _nll_at(verts[i], maxima, weights)
    evals = n + 1
    if not math.isfinite(np.min(fvals)):
        # nowhere to descend from; let the caller restart elsewhere
        return verts[0], math.inf, False, evals
    while evals < max_evals:
        order = np.argsort(fvals)
        verts = verts[order]
        fvals = fvals[order]

        fspread = fvals[n] - fvals[0]
        xspread = 0.0
        xscale = 0.0
        for d in range(n):
            a = abs(verts[0, d])
            if a > xscale:
                xscale = a
            for i in range(1, n + 1):
                diff = abs(verts[i, d] - verts[0, d])
                if diff > xspread:
                    xspread = diff
        if (
            fspread <= tol * (1.0 + abs(fvals[0]))
            and xspread <= tol * (1.0 + xscale)
            and math.isfinite(fvals[n])
        ):
            return verts[0], fvals[0], True, evals

        cen = np.zeros(n)
        for i in range(n):
            cen += verts[i]
        cen /= n

        xr = cen + (cen - verts[n])
        fr = _nll_at(xr, maxima, weights)
        evals += 1
        if fr < fvals[0]:
            xe = cen + 2.0 * (cen - verts[n])
            fe = _nll_at(xe, maxima, weights)
            evals += 1
            if fe < fr:
                verts[n] = xe
                fvals[n] = fe
            else:
                verts[n] = xr
                fvals[n] = fr
        elif fr < fvals[n - 1]:
            verts[n] = xr
            fvals[n] = fr
        else:
            if fr < fvals[n]:
                # outside contraction; accept only if no worse than the
                # reflection so the worst vertex strictly improves
                xc = cen + 0.5 * (xr - cen)
                fc = _nll_at(xc, maxima, weights)
                evals += 1
                accept = fc <= fr
            else:
                xc = cen + 0.5 * (verts[n] - cen)
                fc = _nll_at(xc, maxima, weights)
                evals += 1
                accept = fc < fvals[n]
            if accept:
                verts[n] = xc
                fvals[n] = fc
            else:
                for i in range(1, n + 1):
                    verts[i] = verts[0] + 0.5 * (verts[i] - verts[0])
                    fvals[i] = _nll_at(verts[i], maxima, weights)
                    evals += 1
    order = np.argsort(fvals)
    return verts[order[0]], fvals[order[0]], False, evals


@_jit
def fit_weighted_kernel(maxima, weights, x0, steps, tol, max_evals, max_restarts):
    """Run Nelder-Mead with up to ``max_restarts`` perturbed restarts.

    Perturbations are deterministic (no RNG) so fits are pure functions of
    their inputs. Returns (x, f, converged, total_evals, attempts).
    """
    step_fac = (1.0, 0.3, 3.0, 0.1)
    start_off = (0.0, 0.5, -0.5, 1.5)
    best_x = x0.copy()
    best_f = math.inf
    total_evals = 0
    attempts = 0
    x = x0.copy()
    for attempt in range(max_restarts + 1):
        attempts = attempt + 1
        fac = step_fac[attempt % 4]
        off = start_off[attempt % 4]
        xs = x.copy()
        st = steps.copy()
        for d in range(3):
            st[d] = steps[d] * fac
            xs[d] = x[d] + steps[d] * off
        xr, fr, conv, ev = nelder_mead_nll(maxima, weights, xs, st, tol, max_evals)
        total_evals += ev
        if fr < best_f:
            best_x = xr
            best_f = fr
        if conv:
            return best_x, best_f, True, total_evals, attempts
        if not math.isfinite(best_f):
            # start was infeasible; a Gumbel start (shape=0) always has
            # full support, so the next attempt can evaluate the objective
            x = x0.copy()
            x[2] = 0.0
        else:
            x = best_x.copy()
    return best_x, best_f, False, total_evals, attempts


@_jit
def em_kernel(
    maxima,
    w_fixed,
    unknown_mask,
    x_start,
    steps,
    tol,
    max_evals,
    max_restarts,
    eps,
    max_outer,
):
    """EM loop: E-step reweights unlabeled blocks by the fitted CDF at the
    observed maximum, M-step refits the weighted likelihood warm-started
    at the current parameters. Stops when the max-norm change of
    (loc, scale, shape) drops below ``eps`` or after ``max_outer`` loops.

    Returns (x, f, w, outer_iters, converged, failed_iter); ``failed_iter``
    is -1 unless an M-step failed to converge, in which case it holds the
    1-based iteration index.
    """
    x = x_start.copy()
    w = w_fixed.copy()
    f = math.inf
    outer = 0
    converged = False
    failed_iter = -1
    for it in range(1, max_outer + 1):
        outer = it
        loc = x[0]
        scale = math.exp(x[1])
        shape = x[2]
        cdfv = gev_cdf_arr(maxima, loc, scale, shape)
        for i in range(maxima.shape[0]):
            if unknown_mask[i]:
                w[i] = cdfv[i]
        xn, fn, conv, ev, att = fit_weighted_kernel(
            maxima, w, x, steps, tol, max_evals, max_restarts
        )
        if not conv:
            failed_iter = it
            x = xn
            f = fn
            break
        d_loc = abs(xn[0] - x[0])
        d_scale = abs(math.exp(xn[1]) - math.exp(x[1]))
        d_shape = abs(xn[2] - x[2])
        x = xn
        f = fn
        if max(d_loc, max(d_scale, d_shape)) < eps:
            converged = True
            break
    return x, f, w, outer, converged, failed_iter
