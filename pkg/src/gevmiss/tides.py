"""Hourly water-level ingestion, tidal decomposition, and annual surge
blocks.

The deterministic tide at hour t is modelled as
``T(t) = M(t) + sum_n A_n cos(pi (omega_n t - psi_n) / 180)`` with
frequencies omega_n in degrees per hour. M(t) is a centered moving
average standing in for a slowly-varying mean sea level; amplitudes and
phases come from least squares of the de-meaned levels on cos/sin pairs
at each constituent frequency. Subtracting the fitted tide leaves the
surge series whose annual maxima feed the GEV estimators.
"""

from __future__ import annotations

import calendar
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .formatting import fmt6
from .weights import BlockRecord

__all__ = [
    "DEFAULT_CONSTITUENTS",
    "HourlySeries",
    "TidalModel",
    "parse_hourly_csv",
    "write_hourly_csv",
    "fit_tidal",
    "detrend_surge",
    "annual_blocks",
    "write_blocks_csv",
    "read_blocks_csv",
]

log = logging.getLogger(__name__)

HOURS_PER_YEAR = 8760

# Principal tidal constituents, degrees per hour (standard astronomical
# constants: the two main semidiurnal lunar/solar terms, the larger lunar
# elliptic semidiurnal term, and the two main diurnal terms).
DEFAULT_CONSTITUENTS = (
    ("M2", 28.9841042),
    ("S2", 30.0),
    ("N2", 28.4397295),
    ("K1", 15.0410686),
    ("O1", 13.9430356),
)


@dataclass(frozen=True)
class HourlySeries:
    """An hourly level series on a complete grid; gaps are NaN levels."""

    timestamps: pd.DatetimeIndex
    levels: np.ndarray
    station_id: str = ""

    def __post_init__(self) -> None:
        levels = np.ascontiguousarray(self.levels, dtype=float)
        if len(self.timestamps) != levels.size:
            raise ValueError("timestamps and levels must have equal length")
        if levels.size == 0:
            raise ValueError("series is empty")
        if len(self.timestamps) > 1:
            diffs = np.diff(self.timestamps.asi8)
            if not np.all(diffs == 3_600_000_000_000):
                raise ValueError("timestamps must be strictly increasing hourly instants")
        object.__setattr__(self, "levels", levels)


@dataclass(frozen=True)
class TidalModel:
    """Fitted tide: smoothed mean level on the fitting grid plus
    constituent (name, frequency deg/h, amplitude, phase deg) rows."""

    timestamps: pd.DatetimeIndex
    mean_level: np.ndarray
    constituents: tuple[tuple[str, float, float, float], ...]

    def predict(self, timestamps: pd.DatetimeIndex) -> np.ndarray:
        """Tide level at hours inside the fitting grid."""
        pos = self.timestamps.get_indexer(timestamps)
        if np.any(pos < 0):
            raise ValueError("timestamps fall outside the fitted grid")
        t = pos.astype(float)
        tide = self.mean_level[pos].copy()
        for _name, omega, amp, phase in self.constituents:
            tide += amp * np.cos(np.deg2rad(omega * t - phase))
        return tide


def parse_hourly_csv(path_or_buf, station_id: str = "") -> HourlySeries:
    """Read a timestamp,level CSV into a normalized hourly series.

    Rows may arrive out of order; missing hours inside the covered range
    become NaN levels. Duplicate timestamps and off-grid (non-hourly)
    timestamps are rejected.
    """
    frame = pd.read_csv(path_or_buf, comment="#", skip_blank_lines=True)
    frame.columns = [str(c).strip().lower() for c in frame.columns]
    required = {"timestamp", "level"}
    if not required.issubset(frame.columns):
        raise ValueError(
            f"expected columns {sorted(required)}, found {list(frame.columns)}"
        )
    ts = pd.to_datetime(frame["timestamp"], format="ISO8601")
    levels = pd.to_numeric(frame["level"], errors="coerce")
    dup = ts.duplicated(keep=False)
    if dup.any():
        offenders = sorted(set(ts[dup].astype(str)))[:5]
        raise ValueError(f"duplicate timestamps: {', '.join(offenders)}")
    order = np.argsort(ts.values, kind="stable")
    ts = pd.DatetimeIndex(ts.values[order])
    levels = levels.to_numpy()[order]
    off_grid = (ts - ts.floor("h")) != pd.Timedelta(0)
    if off_grid.any():
        offenders = [str(t) for t in ts[off_grid][:5]]
        raise ValueError(f"non-hourly timestamps: {', '.join(offenders)}")
    grid = pd.date_range(ts[0], ts[-1], freq="h")
    full = pd.Series(levels, index=ts).reindex(grid)
    return HourlySeries(timestamps=grid, levels=full.to_numpy(), station_id=station_id)


def write_hourly_csv(series: HourlySeries, path=None, header_lines=()) -> str | None:
    """Write the normalized timestamp,level CSV (blank level = missing)."""
    lines = [f"# {h}" for h in header_lines]
    lines.append("timestamp,level")
    for ts, lv in zip(series.timestamps, series.levels):
        val = "" if np.isnan(lv) else fmt6(lv)
        lines.append(f"{ts.isoformat()},{val}")
    text = "\n".join(lines) + "\n"
    if path is None:
        return text
    with open(path, "w") as fh:
        fh.write(text)
    return None


def _moving_average(levels: np.ndarray, window: int) -> np.ndarray:
    # centered moving average over non-missing values, O(N) via cumsums;
    # truncated at the series ends
    n = levels.size
    half = window // 2
    finite = np.isfinite(levels)
    vals = np.where(finite, levels, 0.0)
    cum_v = np.concatenate(([0.0], np.cumsum(vals)))
    cum_c = np.concatenate(([0.0], np.cumsum(finite.astype(float))))
    t = np.arange(n)
    lo = np.clip(t - half, 0, n)
    hi = np.clip(t + half + 1, 0, n)
    count = cum_c[hi] - cum_c[lo]
    total = cum_v[hi] - cum_v[lo]
    with np.errstate(invalid="ignore"):
        out = np.where(count > 0, total / np.maximum(count, 1.0), np.nan)
    return out


def _normalize_constituents(constituents) -> list[tuple[str, float]]:
    if constituents is None:
        return [(name, freq) for name, freq in DEFAULT_CONSTITUENTS]
    out: list[tuple[str, float]] = []
    for i, c in enumerate(constituents):
        if isinstance(c, (tuple, list)) and len(c) == 2:
            name, freq = str(c[0]), float(c[1])
        else:
            freq = float(c)
            name = f"C{i + 1}"
        out.append((name, freq))
    if not out:
        raise ValueError("constituent list is empty")
    freqs = [f for _, f in out]
    if any(f <= 0 for f in freqs):
        raise ValueError("constituent frequencies must be positive")
    if len(set(freqs)) != len(freqs):
        raise ValueError("duplicate constituent frequencies make the regression rank-deficient")
    return out


def fit_tidal(
    series: HourlySeries,
    constituents=None,
    smooth_window_hours: int = 24 * 365,
) -> TidalModel:
    """Estimate the tidal model from an hourly series.

    The smoothed mean level is removed first; the residual is regressed
    on cos/sin pairs at each constituent frequency (missing hours are
    excluded from both steps), and each coefficient pair is converted to
    an amplitude and a phase in [0, 360) degrees.
    """
    consts = _normalize_constituents(constituents)
    n = series.levels.size
    if n < HOURS_PER_YEAR:
        raise ValueError("need at least one year of hourly data to fit the tide")
    mean_level = _moving_average(series.levels, smooth_window_hours)
    resid = series.levels - mean_level
    rows = np.isfinite(resid)
    t = np.arange(n, dtype=float)[rows]
    design = np.empty((t.size, 2 * len(consts)))
    for i, (_name, freq) in enumerate(consts):
        rad = np.deg2rad(freq * t)
        design[:, 2 * i] = np.cos(rad)
        design[:, 2 * i + 1] = np.sin(rad)
    coef, _res, rank, _sv = np.linalg.lstsq(design, resid[rows], rcond=None)
    if rank < design.shape[1]:
        raise ValueError("tidal regression is rank-deficient; check constituent frequencies")
    fitted = []
    for i, (name, freq) in enumerate(consts):
        a, b = coef[2 * i], coef[2 * i + 1]
        amp = float(np.hypot(a, b))
        phase = float(np.rad2deg(np.arctan2(b, a)) % 360.0)
        fitted.append((name, freq, amp, phase))
    return TidalModel(
        timestamps=series.timestamps,
        mean_level=mean_level,
        constituents=tuple(fitted),
    )


def detrend_surge(series: HourlySeries, model: TidalModel) -> HourlySeries:
    """Subtract the fitted tide; missing hours stay missing."""
    tide = model.predict(series.timestamps)
    return HourlySeries(
        timestamps=series.timestamps,
        levels=series.levels - tide,
        station_id=series.station_id,
    )


def annual_blocks(series: HourlySeries, include_partial: bool = False):
    """One BlockRecord per calendar year of surge values.

    The block size is the calendar hour count of the year (8784 in leap
    years); missing hours count toward n_miss. Years not fully covered
    by the series range are logged and excluded unless
    ``include_partial`` is set, in which case out-of-range hours also
    count as missing.
    """
    ts = series.timestamps
    years = np.unique(ts.year)
    records = []
    for year in years:
        expected = 8784 if calendar.isleap(int(year)) else HOURS_PER_YEAR
        start = pd.Timestamp(int(year), 1, 1)
        end = pd.Timestamp(int(year) + 1, 1, 1) - pd.Timedelta(hours=1)
        covered = ts[0] <= start and ts[-1] >= end
        if not covered and not include_partial:
            log.info("excluding partial year %d", int(year))
            continue
        in_year = ts.year == year
        vals = series.levels[in_year]
        n_obs = int(np.isfinite(vals).sum())
        n_miss = expected - n_obs
        m = float(np.nanmax(vals)) if n_obs > 0 else None
        records.append(BlockRecord(max=m, n_obs=n_obs, n_miss=n_miss, year=int(year)))
    if not records:
        raise ValueError("series does not cover a full calendar year")
    return records


def write_blocks_csv(records, path=None, header_lines=()) -> str | None:
    """Write block records as year,max_surge,n_obs,n_miss rows."""
    lines = [f"# {h}" for h in header_lines]
    lines.append("year,max_surge,n_obs,n_miss")
    for r in records:
        year = "" if r.year is None else str(r.year)
        m = "" if r.max is None else fmt6(r.max)
        lines.append(f"{year},{m},{r.n_obs},{r.n_miss}")
    text = "\n".join(lines) + "\n"
    if path is None:
        return text
    with open(path, "w") as fh:
        fh.write(text)
    return None


def read_blocks_csv(path_or_buf):
    """Read block records from the year,max_surge,n_obs,n_miss schema."""
    frame = pd.read_csv(path_or_buf, comment="#", skip_blank_lines=True)
    frame.columns = [str(c).strip().lower() for c in frame.columns]
    required = {"max_surge", "n_obs", "n_miss"}
    if not required.issubset(frame.columns):
        raise ValueError(
            f"expected columns {sorted(required)} (optional year), found {list(frame.columns)}"
        )
    records = []
    for _, row in frame.iterrows():
        m = row["max_surge"]
        m = None if pd.isna(m) else float(m)
        year = None
        if "year" in frame.columns and not pd.isna(row["year"]):
            year = int(row["year"])
        records.append(
            BlockRecord(
                max=m,
                n_obs=int(row["n_obs"]),
                n_miss=int(row["n_miss"]),
                year=year,
            )
        )
    return records
