import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from gpexcursions import (
    DomainError,
    ErlangLaw,
    ExponentialLaw,
    LevelContext,
    PreconditionError,
    RayleighLaw,
    large_excursion_length_law,
    negative_excursion_length_law,
    rice_rate,
    spectral_moments,
    up_rate,
    AcfModel,
    ks_statistic,
    EmpiricalDistribution,
)
from gpexcursions import theory
from gpexcursions.acf import SpectralMoments
from gpexcursions.gp import sample_rayleigh_xi

SQ = spectral_moments(AcfModel.squared_exponential(2.0))


def ctx(g, lam2=0.25):
    return LevelContext(g, lam2)


def test_rice_rate_at_mean_level():
    assert rice_rate(ctx(0.0)) == pytest.approx(0.5 / math.pi, rel=1e-12)
    assert rice_rate(ctx(0.0)) == pytest.approx(0.1591549, abs=5e-8)


def test_rice_rate_at_unit_level():
    # (1/pi) sqrt(0.25) exp(-1/2)
    assert rice_rate(ctx(1.0)) == pytest.approx(0.0965324, abs=5e-8)
    assert up_rate(ctx(1.0)) == pytest.approx(0.0482662, abs=5e-8)


def test_up_equals_down_and_evenness():
    for g in (-2.0, -1.0, 0.3, 2.5):
        assert theory.down_rate(ctx(g)) == up_rate(ctx(g))
        assert rice_rate(ctx(g)) == rice_rate(ctx(-g))


def test_rate_decreases_in_abs_level():
    g = np.linspace(0.0, 8.0, 200)
    r = np.array([rice_rate(ctx(x)) for x in g])
    assert np.all(np.diff(r) < 0) and r[-1] < 1e-13


@pytest.mark.parametrize("bad", [dict(lambda2=0.0), dict(lambda2=math.inf), dict(lambda0=-1.0)])
def test_context_domain(bad):
    kw = {"gamma": 1.0, "lambda2": 0.25, **bad}
    with pytest.raises(DomainError):
        LevelContext(**kw)


def test_rayleigh_law_high_level():
    law = large_excursion_length_law(ctx(2.5))
    assert law.scale == pytest.approx(1.6, rel=1e-12)
    # 1.6 * sqrt(pi / 2) = 2.0053026...
    assert law.mean == pytest.approx(2.00531, abs=1e-5)
    assert law.quantile(0.5) == pytest.approx(1.6 * math.sqrt(2 * math.log(2)), rel=1e-12)
    # 1.6 * sqrt(2 ln 2) = 1.8838560...
    assert law.quantile(0.5) == pytest.approx(1.88383, abs=5e-5)
    with pytest.raises(DomainError):
        large_excursion_length_law(ctx(0.0))


def test_rayleigh_matches_scipy():
    law, ref = RayleighLaw(1.6), stats.rayleigh(scale=1.6)
    x = np.linspace(0.0, 8.0, 81)
    np.testing.assert_allclose(law.cdf(x), ref.cdf(x), rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(law.pdf(x), ref.pdf(x), rtol=1e-12, atol=1e-15)
    assert law.mean == pytest.approx(ref.mean(), rel=1e-12)
    p = np.linspace(0.01, 0.99, 9)
    np.testing.assert_allclose(law.quantile(p), ref.ppf(p), rtol=1e-12)


def test_exponential_matches_scipy():
    law, ref = ExponentialLaw(0.0482662), stats.expon(scale=1 / 0.0482662)
    x = np.linspace(0.0, 200.0, 41)
    np.testing.assert_allclose(law.cdf(x), ref.cdf(x), rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(law.pdf(x), ref.pdf(x), rtol=1e-12)
    assert law.cdf(0.0) == 0.0


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_erlang_matches_scipy_gamma(k):
    law, ref = ErlangLaw(k, 0.7), stats.gamma(a=k, scale=1 / 0.7)
    x = np.linspace(0.0, 30.0, 61)
    np.testing.assert_allclose(law.cdf(x), ref.cdf(x), rtol=1e-10, atol=1e-14)
    np.testing.assert_allclose(law.pdf(x), ref.pdf(x), rtol=1e-10, atol=1e-14)
    np.testing.assert_allclose(law.quantile([0.1, 0.5, 0.9]), ref.ppf([0.1, 0.5, 0.9]), rtol=1e-10)


def test_erlang_first_order_is_exponential():
    t = np.linspace(0.0, 10.0, 101)
    F, f = theory.erlang_interval_law(1, t)
    np.testing.assert_allclose(F, 1 - np.exp(-t), rtol=1e-14, atol=1e-16)
    np.testing.assert_allclose(f, np.exp(-t), rtol=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_erlang_normalization_and_mean_by_quadrature(k):
    f = lambda t: theory.erlang_interval_law(k, t)[1]  # noqa: E731
    total, _ = integrate.quad(f, 0.0, np.inf, epsabs=1e-13, epsrel=1e-13)
    mean, _ = integrate.quad(lambda t: t * f(t), 0.0, np.inf, epsabs=1e-13, epsrel=1e-13)
    assert abs(total - 1.0) < 1e-8
    assert abs(mean - k) < 1e-8
    assert theory.erlang_interval_law(k, 0.0)[0] == 0.0


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_erlang_density_is_derivative(k):
    t = np.linspace(0.01, 10.0, 400)
    h = 1e-5
    dF = (theory.erlang_interval_law(k, t + h)[0] - theory.erlang_interval_law(k, t - h)[0]) / (2 * h)
    np.testing.assert_allclose(dF, theory.erlang_interval_law(k, t)[1], atol=1e-6)


def test_erlang_domain():
    with pytest.raises(DomainError):
        theory.erlang_interval_law(0, 1.0)
    with pytest.raises(DomainError):
        theory.erlang_interval_law(1.5, 1.0)
    with pytest.raises(DomainError):
        theory.erlang_interval_law(1, -1.0)
    with pytest.raises(DomainError):
        theory.erlang_interval_physical(1, 1.0, 0.0)


def test_erlang_physical_scaling():
    F, f = theory.erlang_interval_physical(2, 10.0, 0.1)
    assert F == pytest.approx(1 - 2 * math.exp(-1))
    assert f == pytest.approx(0.1 * math.exp(-1))


def test_negative_excursion_law():
    law = negative_excursion_length_law(ctx(-1.0), SQ)
    mu = 0.5 * math.exp(-0.5) / (2 * math.pi)
    assert law.rate == pytest.approx(mu, rel=1e-12)
    assert law.mean == pytest.approx(20.7184, abs=1e-4)
    assert law.quantile(0.5) == pytest.approx(math.log(2) / mu, rel=1e-12)
    assert law.cdf(0.0) == 0.0


def test_negative_excursion_preconditions():
    with pytest.raises(DomainError):
        negative_excursion_length_law(ctx(1.0), SQ)
    no_decay = SpectralMoments(1.0, 0.25, 0.1875, True, True, False)
    with pytest.raises(PreconditionError, match="cond_eq8_9"):
        negative_excursion_length_law(ctx(-1.0), no_decay)
    no_l4 = SpectralMoments(1.0, 0.25, math.inf, True, True, True)
    with pytest.raises(PreconditionError):
        negative_excursion_length_law(ctx(-1.0), no_l4)


def test_mean_lengths_contrast():
    g = np.linspace(1.0, 6.0, 26)
    neg = [negative_excursion_length_law(ctx(-x), SQ).mean for x in g]
    pos = [large_excursion_length_law(ctx(x)).mean for x in g]
    assert np.all(np.diff(neg) > 0) and np.all(np.diff(pos) < 0)


def test_parabola_arithmetic():
    assert theory.parabola(2.5, 0.5, 0.25, 0.0) == 2.5
    assert theory.parabola_root_length(2.5, 0.5, 0.25) == pytest.approx(1.6)
    t_star, peak = theory.parabola_peak(2.5, 0.5, 0.25)
    assert (t_star, peak) == (pytest.approx(0.8), pytest.approx(2.7))
    assert isinstance(t_star, float)
    assert theory.parabola(2.5, 0.5, 0.25, 1.6) == pytest.approx(2.5)


def test_slope_transform_has_rayleigh_law():
    lam2, g = 0.25, 2.5
    xi = sample_rayleigh_xi(lam2, seed=6, size=10**5)
    lengths = theory.parabola_root_length(g, xi, lam2)
    d = ks_statistic(EmpiricalDistribution(lengths), large_excursion_length_law(ctx(g, lam2)))
    assert d < 0.01


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 10.0), st.floats(0.001, 20.0))
def test_law_quantiles_invert_cdfs(scale, x):
    for law in (RayleighLaw(scale), ExponentialLaw(1 / scale), ErlangLaw(3, 1 / scale)):
        p = float(law.cdf(x))
        if 1e-9 < p < 1 - 1e-9:
            assert float(law.quantile(p)) == pytest.approx(x, rel=1e-6)


def test_rvs_uses_generator():
    rng = np.random.default_rng(1)
    x = RayleighLaw(1.0).rvs(rng, size=10**5)
    assert abs(x.mean() - math.sqrt(math.pi / 2)) < 0.01


def test_theory_curve_csv(tmp_path):
    f = tmp_path / "c.csv"
    theory.write_theory_curve_csv(RayleighLaw(1.6), np.linspace(0, 5, 11), f)
    lines = f.read_text().splitlines()
    assert lines[0] == "tau,cdf,pdf" and len(lines) == 12
