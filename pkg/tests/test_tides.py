"""Hourly-series ingestion, constituent recovery, detrending, and the
annual block builder."""

import io

import numpy as np
import pandas as pd
import pytest

from gevmiss import (
    HourlySeries,
    annual_blocks,
    detrend_surge,
    fit_tidal,
    parse_hourly_csv,
    read_blocks_csv,
    write_blocks_csv,
    write_hourly_csv,
)
from gevmiss.tides import DEFAULT_CONSTITUENTS

M2 = 28.9841042


def make_series(n_hours, start="2001-01-01", level_fn=None, station="t"):
    ts = pd.date_range(start, periods=n_hours, freq="h")
    t = np.arange(n_hours, dtype=float)
    levels = level_fn(t) if level_fn else np.zeros(n_hours)
    return HourlySeries(timestamps=ts, levels=levels, station_id=station)


def tide(t, amp=2.0, phase=30.0, mean=5.0, freq=M2):
    return mean + amp * np.cos(np.deg2rad(freq * t - phase))


def test_parse_fills_gaps_and_sorts():
    text = (
        "timestamp,level\n"
        "2001-01-01T02:00:00,3.0\n"
        "2001-01-01T00:00:00,1.0\n"
        "2001-01-01T04:00:00,5.0\n"
    )
    s = parse_hourly_csv(io.StringIO(text))
    assert len(s.timestamps) == 5
    assert s.levels[0] == 1.0
    assert np.isnan(s.levels[1])
    assert s.levels[2] == 3.0
    assert np.isnan(s.levels[3])
    assert s.levels[4] == 5.0


def test_parse_blank_level_is_missing():
    text = "timestamp,level\n2001-01-01T00:00:00,1.0\n2001-01-01T01:00:00,\n2001-01-01T02:00:00,2.0\n"
    s = parse_hourly_csv(io.StringIO(text))
    assert np.isnan(s.levels[1])


def test_parse_rejects_duplicates_and_off_grid():
    dup = "timestamp,level\n2001-01-01T00:00:00,1\n2001-01-01T00:00:00,2\n"
    with pytest.raises(ValueError, match="duplicate"):
        parse_hourly_csv(io.StringIO(dup))
    off = "timestamp,level\n2001-01-01T00:00:00,1\n2001-01-01T00:30:00,2\n"
    with pytest.raises(ValueError, match="non-hourly"):
        parse_hourly_csv(io.StringIO(off))
    cols = "time,value\n2001-01-01T00:00:00,1\n"
    with pytest.raises(ValueError, match="columns"):
        parse_hourly_csv(io.StringIO(cols))


def test_roundtrip_is_byte_stable():
    rng = np.random.default_rng(1)
    s = make_series(100, level_fn=lambda t: rng.normal(size=t.size))
    levels = s.levels.copy()
    levels[10:20] = np.nan
    s = HourlySeries(s.timestamps, levels, s.station_id)
    text = write_hourly_csv(s)
    s2 = parse_hourly_csv(io.StringIO(text))
    assert write_hourly_csv(s2) == text


def test_hourly_series_validation():
    ts = pd.date_range("2001-01-01", periods=3, freq="2h")
    with pytest.raises(ValueError):
        HourlySeries(timestamps=ts, levels=np.zeros(3))
    ts = pd.date_range("2001-01-01", periods=3, freq="h")
    with pytest.raises(ValueError):
        HourlySeries(timestamps=ts, levels=np.zeros(4))


def test_single_constituent_recovery():
    rng = np.random.default_rng(3)
    n = 2 * 8760
    s = make_series(n, level_fn=lambda t: tide(t) + 0.01 * rng.standard_normal(t.size))
    model = fit_tidal(s, constituents=[("M2", M2)])
    name, freq, amp, phase = model.constituents[0]
    assert amp == pytest.approx(2.0, abs=0.01)
    assert abs((phase - 30.0 + 180) % 360 - 180) <= 0.5
    assert np.nanmean(model.mean_level) == pytest.approx(5.0, abs=0.01)


def test_phase_wraps_into_degrees_range():
    n = 8760 + 500
    s = make_series(n, level_fn=lambda t: tide(t, phase=350.0, mean=0.0))
    model = fit_tidal(s, constituents=[("M2", M2)])
    phase = model.constituents[0][3]
    assert 0.0 <= phase < 360.0
    assert abs((phase - 350.0 + 180) % 360 - 180) <= 0.5


def test_multi_constituent_recovery_with_gaps():
    rng = np.random.default_rng(5)
    n = 3 * 8760
    S2 = 30.0

    def fn(t):
        return (
            1.0
            + 1.2 * np.cos(np.deg2rad(M2 * t - 40.0))
            + 0.4 * np.cos(np.deg2rad(S2 * t - 310.0))
            + 0.01 * rng.standard_normal(t.size)
        )

    s = make_series(n, level_fn=fn)
    levels = s.levels.copy()
    levels[1000:1500] = np.nan  # a gap must not derail the regression
    s = HourlySeries(s.timestamps, levels, s.station_id)
    model = fit_tidal(s, constituents=[("M2", M2), ("S2", S2)])
    by_name = {c[0]: c for c in model.constituents}
    assert by_name["M2"][2] == pytest.approx(1.2, abs=0.01)
    assert abs((by_name["M2"][3] - 40.0 + 180) % 360 - 180) <= 0.5
    assert by_name["S2"][2] == pytest.approx(0.4, abs=0.01)
    assert abs((by_name["S2"][3] - 310.0 + 180) % 360 - 180) <= 0.5


def test_constant_series_has_no_tide():
    s = make_series(8760, level_fn=lambda t: np.full(t.size, 7.5))
    model = fit_tidal(s)
    for _name, _freq, amp, _phase in model.constituents:
        assert amp == pytest.approx(0.0, abs=1e-8)
    assert np.allclose(model.mean_level, 7.5)


def test_fit_tidal_validation():
    s = make_series(100)
    with pytest.raises(ValueError, match="year"):
        fit_tidal(s)
    s = make_series(8760)
    with pytest.raises(ValueError, match="duplicate"):
        fit_tidal(s, constituents=[("A", M2), ("B", M2)])
    with pytest.raises(ValueError):
        fit_tidal(s, constituents=[])
    with pytest.raises(ValueError):
        fit_tidal(s, constituents=[("Z", -1.0)])


def test_detrend_leaves_noise():
    rng = np.random.default_rng(7)
    noise = 0.05 * rng.standard_normal(2 * 8760)
    s = make_series(2 * 8760, level_fn=lambda t: tide(t) + noise)
    model = fit_tidal(s, constituents=[("M2", M2)])
    surge = detrend_surge(s, model)
    resid = surge.levels[~np.isnan(surge.levels)]
    assert np.std(resid) == pytest.approx(0.05, rel=0.1)
    assert abs(np.mean(resid)) < 0.01


def test_detrend_invariant_to_level_shift():
    rng = np.random.default_rng(9)
    noise = 0.05 * rng.standard_normal(2 * 8760)
    s1 = make_series(2 * 8760, level_fn=lambda t: tide(t) + noise)
    s2 = HourlySeries(s1.timestamps, s1.levels + 3.0, s1.station_id)
    m1 = fit_tidal(s1, constituents=[("M2", M2)])
    m2 = fit_tidal(s2, constituents=[("M2", M2)])
    d1 = detrend_surge(s1, m1).levels
    d2 = detrend_surge(s2, m2).levels
    assert np.nanmax(np.abs(d1 - d2)) <= 1e-9


def test_predict_requires_grid_membership():
    s = make_series(8760)
    model = fit_tidal(s)
    outside = pd.date_range("1999-01-01", periods=5, freq="h")
    with pytest.raises(ValueError):
        model.predict(outside)


def test_annual_blocks_full_and_partial_years():
    # series covering all of 2003-2004 plus a stub of 2005
    n = 8760 + 8784 + 100
    rng = np.random.default_rng(11)
    s = make_series(n, start="2003-01-01", level_fn=lambda t: rng.normal(size=t.size))
    records = annual_blocks(s)
    assert [r.year for r in records] == [2003, 2004]
    assert records[0].n_obs + records[0].n_miss == 8760
    assert records[1].n_obs + records[1].n_miss == 8784  # leap year
    assert records[0].n_miss == 0
    with_stub = annual_blocks(s, include_partial=True)
    assert [r.year for r in with_stub] == [2003, 2004, 2005]
    stub = with_stub[-1]
    assert stub.n_obs == 100
    assert stub.n_miss == 8760 - 100


def test_annual_blocks_counts_gaps_as_missing():
    n = 8760
    rng = np.random.default_rng(13)
    levels = rng.normal(size=n)
    levels[100:150] = np.nan
    ts = pd.date_range("2001-01-01", periods=n, freq="h")
    s = HourlySeries(ts, levels)
    (rec,) = annual_blocks(s)
    assert rec.n_miss == 50
    assert rec.max == pytest.approx(np.nanmax(levels))
    with pytest.raises(ValueError):
        annual_blocks(make_series(500, start="2001-06-01"))


def test_blocks_csv_roundtrip():
    recs = [
        dict(year=2001, max=1.25, n_obs=8700, n_miss=60),
        dict(year=2002, max=-0.5, n_obs=8760, n_miss=0),
    ]
    from gevmiss import BlockRecord

    records = [BlockRecord(max=r["max"], n_obs=r["n_obs"], n_miss=r["n_miss"], year=r["year"]) for r in recs]
    text = write_blocks_csv(records)
    back = read_blocks_csv(io.StringIO(text))
    assert [r.year for r in back] == [2001, 2002]
    assert back[0].max == pytest.approx(1.25)
    assert back[0].n_miss == 60
    assert write_blocks_csv(back) == text
    # header comment lines are ignored on read
    commented = "# run config\n" + text
    assert len(read_blocks_csv(io.StringIO(commented))) == 2
    with pytest.raises(ValueError, match="columns"):
        read_blocks_csv(io.StringIO("year,peak\n2001,2.0\n"))


def test_default_constituents_are_distinct():
    freqs = [f for _, f in DEFAULT_CONSTITUENTS]
    assert len(set(freqs)) == 5
    assert all(10.0 < f < 31.0 for f in freqs)
