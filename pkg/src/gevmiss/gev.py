"""Generalized extreme value distribution: density, CDF, quantiles,
return levels, and the analytic log-density gradient.

The distribution is parametrized by location, scale and shape. For
nonzero shape the support is the set of z with
``1 + shape*(z - loc)/scale > 0``; the Gumbel case (shape = 0) has full
support. Shapes with magnitude below ``XI_ZERO_EPS`` are evaluated on
the Gumbel branch, which agrees with the general branch continuously.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import (
    XI_ZERO_EPS,
    gev_cdf_arr,
    gev_logpdf_arr,
    gev_logsf_arr,
    gev_quantile_arr,
    gev_sf_arr,
)

__all__ = ["GevParams", "XI_ZERO_EPS"]


def _as_float_array(z, name: str) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return np.atleast_1d(arr), arr.ndim == 0


def _unwrap(out: np.ndarray, scalar: bool):
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class GevParams:
    """GEV parameter triple (location, scale, shape)."""

    loc: float
    scale: float
    shape: float = 0.0

    def __post_init__(self) -> None:
        for name in ("loc", "scale", "shape"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.scale <= 0:
            raise ValueError(f"scale must be positive, got {self.scale!r}")

    def support(self, z):
        """True where z lies strictly inside the support."""
        arr, scalar = _as_float_array(z, "z")
        if abs(self.shape) < XI_ZERO_EPS:
            out = np.ones(arr.shape, dtype=bool)
        else:
            out = 1.0 + self.shape * (arr - self.loc) / self.scale > 0.0
        return bool(out[0]) if scalar else out

    def logpdf(self, z):
        """Log density; negative infinity outside the support."""
        arr, scalar = _as_float_array(z, "z")
        return _unwrap(gev_logpdf_arr(arr, self.loc, self.scale, self.shape), scalar)

    def cdf(self, z):
        """Distribution function G(z); 0 below a shape>0 lower endpoint,
        1 above a shape<0 upper endpoint."""
        arr, scalar = _as_float_array(z, "z")
        return _unwrap(gev_cdf_arr(arr, self.loc, self.scale, self.shape), scalar)

    def sf(self, z):
        """Survival function 1 - G(z), computed without cancellation for
        G near 1."""
        arr, scalar = _as_float_array(z, "z")
        return _unwrap(gev_sf_arr(arr, self.loc, self.scale, self.shape), scalar)

    def logsf(self, z):
        """Log survival function."""
        arr, scalar = _as_float_array(z, "z")
        return _unwrap(gev_logsf_arr(arr, self.loc, self.scale, self.shape), scalar)

    def quantile(self, q):
        """Inverse of the CDF on (0, 1), by closed-form branch inversion."""
        arr, scalar = _as_float_array(q, "q")
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise ValueError("q must lie strictly inside (0, 1)")
        return _unwrap(gev_quantile_arr(arr, self.loc, self.scale, self.shape), scalar)

    def return_level(self, period):
        """Level exceeded once per ``period`` blocks on average: the
        (1 - 1/period) quantile."""
        arr, scalar = _as_float_array(period, "period")
        if np.any(arr <= 1.0):
            raise ValueError("period must exceed 1")
        return _unwrap(
            gev_quantile_arr(1.0 - 1.0 / arr, self.loc, self.scale, self.shape), scalar
        )

    def loggrad(self, z):
        """Partial derivatives of the log density in (loc, scale, shape).

        Requires z strictly inside the support; the shape derivative on
        the Gumbel branch is the analytic shape->0 limit.
        """
        arr, scalar = _as_float_array(z, "z")
        loc, scale, shape = self.loc, self.scale, self.shape
        s = (arr - loc) / scale
        if abs(shape) < XI_ZERO_EPS:
            e = np.exp(-s)
            d_loc = (1.0 - e) / scale
            d_scale = (s * (1.0 - e) - 1.0) / scale
            d_shape = 0.5 * s * s * (1.0 - e) - s
        else:
            u = 1.0 + shape * s
            if np.any(u <= 0.0):
                raise ValueError("z on or outside the support boundary")
            logu = np.log(u)
            a = np.exp(-logu / shape)
            dl_du = (-(1.0 + 1.0 / shape) + a / shape) / u
            d_loc = dl_du * (-shape / scale)
            d_scale = -1.0 / scale + dl_du * (-shape * s / scale)
            d_shape = logu / shape**2 * (1.0 - a) + dl_du * s
        out = np.stack([d_loc, d_scale, d_shape], axis=-1)
        return out[0] if scalar else out
