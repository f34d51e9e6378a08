"""Censoring-weight estimators: frozen reference values, Monte Carlo
agreement with the exchangeability identities, and status pinning."""

import numpy as np
import pytest

from gevmiss import (
    BlockRecord,
    CensorStatus,
    GevParams,
    WeightedSample,
    weight_conditional_empirical,
    weight_em,
    weight_unconditional,
)


def test_unconditional_proportion():
    b = BlockRecord(max=1.0, n_obs=95, n_miss=5)
    assert weight_unconditional(b) == pytest.approx(0.95)
    assert weight_unconditional(BlockRecord(max=1.0, n_obs=100, n_miss=0)) == 1.0
    assert weight_unconditional(BlockRecord(max=2.0, n_obs=1, n_miss=3)) == pytest.approx(0.25)


def test_conditional_empirical_reference():
    # pool 1..100: F_hat(99) = 0.99, ten missing draws -> 0.99^10
    pool = np.arange(1.0, 101.0)
    b = BlockRecord(max=99.0, n_obs=90, n_miss=10)
    w = weight_conditional_empirical(b, pool)
    assert w == pytest.approx(0.90438207500880449001, rel=1e-14)


def test_conditional_empirical_edge_cases():
    pool = np.arange(1.0, 11.0)
    # pooled maximum gets F_hat = 1 (ties counted <=) regardless of n_miss
    top = BlockRecord(max=10.0, n_obs=5, n_miss=5)
    assert weight_conditional_empirical(top, pool) == 1.0
    # below the whole pool the weight vanishes
    low = BlockRecord(max=0.5, n_obs=5, n_miss=5)
    assert weight_conditional_empirical(low, pool) == 0.0
    # monotone in the observed maximum
    mids = [
        weight_conditional_empirical(BlockRecord(max=m, n_obs=5, n_miss=5), pool)
        for m in (3.0, 6.0, 9.0)
    ]
    assert mids[0] < mids[1] < mids[2]
    # sorted fast path agrees with the unsorted one
    shuffled = pool[::-1].copy()
    b = BlockRecord(max=6.5, n_obs=5, n_miss=5)
    assert weight_conditional_empirical(b, shuffled) == pytest.approx(
        weight_conditional_empirical(b, np.sort(shuffled), assume_sorted=True)
    )


def test_em_weight_reference():
    # Gumbel(0,1) CDF at 2: exp(-exp(-2))
    b = BlockRecord(max=2.0, n_obs=90, n_miss=10)
    w = weight_em(b, GevParams(0.0, 1.0, 0.0))
    assert w == pytest.approx(0.87342301849311664299, rel=1e-14)


def test_status_pins_override_estimates():
    theta = GevParams(0.0, 1.0, 0.1)
    pool = np.linspace(0.0, 5.0, 50)
    comp = BlockRecord(max=1.0, n_obs=50, n_miss=10, status=CensorStatus.COMPLETE)
    cens = BlockRecord(max=1.0, n_obs=50, n_miss=10, status=CensorStatus.CENSORED)
    for fn in (
        weight_unconditional,
        lambda b: weight_conditional_empirical(b, pool),
        lambda b: weight_em(b, theta),
    ):
        assert fn(comp) == 1.0
        assert fn(cens) == 0.0


def test_true_max_lands_in_missing_part_at_count_ratio():
    # for i.i.d. continuous values the true block maximum falls among the
    # missing n_miss entries with probability n_miss/(n_obs+n_miss)
    rng = np.random.default_rng(31)
    n_obs, n_miss = 80, 20
    trials = 40_000
    draws = rng.exponential(1.0, size=(trials, n_obs + n_miss))
    missed = draws[:, n_obs:].max(axis=1) > draws[:, :n_obs].max(axis=1)
    p_hat = missed.mean()
    p = n_miss / (n_obs + n_miss)
    se = np.sqrt(p * (1 - p) / trials)
    assert abs(p_hat - p) <= 3 * se


def test_survival_weight_matches_model_probability():
    # conditional on the observed max m, the chance no missing draw beats
    # it is F(m)^n_miss; check by simulation from a known parent
    rng = np.random.default_rng(77)
    n_obs, n_miss = 50, 15
    trials = 30_000
    draws = rng.exponential(1.0, size=(trials, n_obs + n_miss))
    m = draws[:, :n_obs].max(axis=1)
    kept = draws[:, n_obs:].max(axis=1) <= m
    predicted = np.mean((-np.expm1(-m)) ** n_miss)
    se = np.sqrt(np.var(kept) / trials)
    assert abs(kept.mean() - predicted) <= 3 * se + 1e-3


def test_block_record_validation():
    with pytest.raises(ValueError):
        BlockRecord(max=None, n_obs=5, n_miss=0)
    with pytest.raises(ValueError):
        BlockRecord(max=1.0, n_obs=0, n_miss=5)
    with pytest.raises(ValueError):
        BlockRecord(max=1.0, n_obs=-1, n_miss=0)
    with pytest.raises(ValueError):
        BlockRecord(max=np.inf, n_obs=5, n_miss=0)
    with pytest.raises(ValueError):
        BlockRecord(max=1.0, n_obs=5, n_miss=0, status=CensorStatus.CENSORED)
    # inference: no missing -> complete, missing -> unknown
    assert BlockRecord(max=1.0, n_obs=5, n_miss=0).status == CensorStatus.COMPLETE
    assert BlockRecord(max=1.0, n_obs=5, n_miss=2).status == CensorStatus.UNKNOWN
    assert BlockRecord(max=None, n_obs=0, n_miss=7).max is None


def test_weighted_sample_validation():
    with pytest.raises(ValueError):
        WeightedSample(np.array([1.0, 2.0]), np.array([0.5]))
    with pytest.raises(ValueError):
        WeightedSample(np.array([]), np.array([]))
    with pytest.raises(ValueError):
        WeightedSample(np.array([1.0, np.nan]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        WeightedSample(np.array([1.0, 2.0]), np.array([0.5, 1.5]))
    s = WeightedSample(np.array([1.0, 2.0]), np.array([0.0, 1.0]))
    assert len(s) == 2


def test_empty_block_errors():
    gone = BlockRecord(max=None, n_obs=0, n_miss=10)
    with pytest.raises(ValueError):
        weight_conditional_empirical(gone, np.arange(5.0))
    with pytest.raises(ValueError):
        weight_em(gone, GevParams(0.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        weight_conditional_empirical(
            BlockRecord(max=1.0, n_obs=2, n_miss=2), np.array([])
        )
