"""Distribution-core checks against independently computed reference
values (50-digit arithmetic, frozen below) plus structural properties."""

import numpy as np
import pytest
from scipy.integrate import quad

from gevmiss import GevParams

# reference values computed with 50-digit arithmetic
LOGPDF_CASES = [
    # (loc, scale, shape, z, expected)
    (0.0, 2.0, 0.2, 1.0, -1.8859295824450496441),
    (0.0, 1.0, 0.4, 1.5, -1.9538288801108927319),
    (0.0, 1.0, -0.4, 1.5, -1.4756289829366207364),
    (2.0, 3.0, 0.1, -1.0, -2.8076186072244616912),
    (0.0, 1.0, 0.0, 0.0, -1.0),
]

CDF_CASES = [
    (1.0, 0.5, -0.1, 0.8, 0.22758208672129419593),
    (0.0, 1.0, 0.4, 1.5, 0.73431574119168711371),
    (0.0, 1.0, -0.4, 1.5, 0.90375869446365814948),
    (2.0, 3.0, 0.1, -1.0, 0.056814029200146720412),
    (0.0, 1.0, 0.0, 0.0, 0.3678794411714423216),
]


@pytest.mark.parametrize("loc,scale,shape,z,expected", LOGPDF_CASES)
def test_logpdf_reference(loc, scale, shape, z, expected):
    assert GevParams(loc, scale, shape).logpdf(z) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("loc,scale,shape,z,expected", CDF_CASES)
def test_cdf_reference(loc, scale, shape, z, expected):
    assert GevParams(loc, scale, shape).cdf(z) == pytest.approx(expected, rel=1e-13)


def test_survival_deep_tail_reference():
    p = GevParams(0.0, 1.0, 0.2)
    assert p.sf(40.0) == pytest.approx(1.6934944410640232953e-5, rel=1e-12)
    assert p.logsf(40.0) == pytest.approx(-10.986131354213051246, rel=1e-12)


def test_quantile_reference():
    assert GevParams(0.0, 1.0, 0.3).quantile(0.98) == pytest.approx(
        7.4128902868063667084, rel=1e-13
    )
    # Gumbel return levels: -log(-log(1 - 1/T))
    g = GevParams(0.0, 1.0, 0.0)
    assert g.return_level(50.0) == pytest.approx(3.901938657935834266, rel=1e-12)
    assert g.return_level(2.0) == pytest.approx(0.36651292058166432701, rel=1e-12)


def test_return_level_is_quantile():
    p = GevParams(1.0, 2.0, 0.15)
    assert p.return_level(20.0) == pytest.approx(p.quantile(1.0 - 1.0 / 20.0), rel=1e-14)


@pytest.mark.parametrize("shape", [-0.4, -0.1, 0.0, 0.1, 0.4])
def test_quantile_cdf_roundtrip(shape):
    p = GevParams(0.7, 1.3, shape)
    q = np.linspace(0.001, 0.999, 41)
    z = p.quantile(q)
    back = p.cdf(z)
    assert np.max(np.abs(back - q)) <= 1e-10
    # and the other direction, through sf as well
    assert np.max(np.abs(p.sf(z) - (1.0 - q))) <= 1e-10


def test_gumbel_branch_continuity():
    z = np.linspace(-2.0, 5.0, 30)
    g = GevParams(0.0, 1.0, 0.0)
    for eps in (2e-8, -2e-8):
        near = GevParams(0.0, 1.0, eps)
        assert np.max(np.abs(near.logpdf(z) - g.logpdf(z))) <= 1e-6
        assert np.max(np.abs(near.cdf(z) - g.cdf(z))) <= 1e-6
        q = np.linspace(0.01, 0.99, 21)
        assert np.max(np.abs(near.quantile(q) - g.quantile(q))) <= 1e-6


def test_loggrad_matches_finite_differences():
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 100:
        loc = rng.uniform(-2, 2)
        scale = rng.uniform(0.5, 3.0)
        shape = rng.uniform(-0.45, 0.45)
        if abs(shape) < 1e-3:
            shape = 0.0
        p = GevParams(loc, scale, shape)
        z = p.quantile(rng.uniform(0.05, 0.95))
        grad = np.array(p.loggrad(z))
        h = 1e-6
        fd = np.empty(3)
        for i, (dl, ds, dx) in enumerate([(h, 0, 0), (0, h, 0), (0, 0, h)]):
            hi = GevParams(loc + dl, scale + ds, shape + dx).logpdf(z)
            lo = GevParams(loc - dl, scale - ds, shape - dx).logpdf(z)
            fd[i] = (hi - lo) / (2 * h)
        denom = np.maximum(np.abs(fd), 1.0)
        assert np.max(np.abs(grad - fd) / denom) <= 1e-5
        checked += 1


def _endpoints(p: GevParams) -> tuple[float, float]:
    if p.shape > 0:
        return p.loc - p.scale / p.shape, np.inf
    if p.shape < 0:
        return -np.inf, p.loc - p.scale / p.shape
    return -np.inf, np.inf


@pytest.mark.parametrize("shape", [-0.3, 0.0, 0.2])
def test_density_integrates_to_one(shape):
    p = GevParams(0.5, 1.2, shape)
    lo, hi = _endpoints(p)
    lo = p.quantile(1e-12) if np.isinf(lo) else lo
    hi = p.quantile(1.0 - 1e-13) if np.isinf(hi) else hi
    total, err = quad(lambda z: np.exp(p.logpdf(z)), lo, hi, limit=200)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_cdf_monotone_and_bounded():
    p = GevParams(0.0, 1.0, 0.25)
    z = np.linspace(-10, 50, 500)
    c = p.cdf(z)
    assert np.all(np.diff(c) >= 0)
    assert np.all((c >= 0) & (c <= 1))
    # off support below the lower endpoint
    lo = _endpoints(p)[0]
    assert p.cdf(lo - 1.0) == 0.0
    assert p.logpdf(lo - 1.0) == -np.inf
    neg = GevParams(0.0, 1.0, -0.25)
    hi = _endpoints(neg)[1]
    assert neg.cdf(hi + 1.0) == 1.0
    assert neg.sf(hi + 1.0) == 0.0


def test_support_predicate():
    pos = GevParams(1.0, 2.0, 0.5)
    assert not pos.support(1.0 - 2.0 / 0.5 - 0.01)
    assert pos.support(1.0 - 2.0 / 0.5 + 0.01)
    assert pos.support(1e6)
    neg = GevParams(1.0, 2.0, -0.5)
    assert neg.support(1.0 + 2.0 / 0.5 - 0.01)
    assert not neg.support(1.0 + 2.0 / 0.5 + 0.01)
    gum = GevParams(1.0, 2.0, 0.0)
    assert bool(np.all(gum.support(np.array([-1e9, 0.0, 1e9]))))


def test_vector_shapes_and_scalars():
    p = GevParams(0.0, 1.0, 0.1)
    z = np.array([[0.0, 1.0], [2.0, 3.0]])
    assert p.cdf(z).shape == z.shape
    assert isinstance(p.cdf(0.5), float)
    assert isinstance(p.logpdf(0.5), float)


def test_parameter_validation():
    with pytest.raises(ValueError):
        GevParams(0.0, 0.0, 0.1)
    with pytest.raises(ValueError):
        GevParams(0.0, -1.0, 0.1)
    with pytest.raises(ValueError):
        GevParams(np.nan, 1.0, 0.1)


def test_argument_validation():
    p = GevParams(0.0, 1.0, 0.1)
    for bad in (0.0, 1.0, -0.1, 1.1):
        with pytest.raises(ValueError):
            p.quantile(bad)
    with pytest.raises(ValueError):
        p.return_level(1.0)
    with pytest.raises(ValueError):
        p.cdf(np.nan)
