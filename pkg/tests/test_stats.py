import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from conftest import sinusoid_profile
from fiberweave.stats import (ArcsineModel, DeviationSample, KumaraswamyModel, arcsine_ccdf,
                              arcsine_pdf, build_spline, ccdf_distance, default_thresholds,
                              density, deviation_series, exceedance, fit_arcsine,
                              fit_kumaraswamy, is_u_shaped, ks_statistic, two_point_delta_t,
                              value_density)
from fiberweave.sweep import DelayProfile


def _sample(values, kind="delay"):
    v = np.asarray(values, dtype=float)
    return DeviationSample(v, v.size, None, kind)


def _arcsine_sample(delta_t=1.0, n=100_000, seed=0):
    rng = np.random.default_rng(seed)
    return _sample(delta_t * np.abs(np.sin(rng.uniform(0, 2 * np.pi, n))))


# -- spline ------------------------------------------------------------------

def test_spline_passes_through_knots(sine):
    sp = build_spline(sine)
    np.testing.assert_allclose(sp(sine.offsets), sine.delay, atol=1e-12)


def test_constant_profile_gives_constant_spline():
    p = sinusoid_profile(amplitude=0.0, mean=150.0)
    sp = build_spline(p)
    x = np.linspace(-30, 30, 1001)
    np.testing.assert_allclose(sp(x), 150.0, atol=1e-12)
    assert sp.mean == pytest.approx(150.0, abs=1e-12)


def test_spline_tracks_sinusoid(sine):
    sp = build_spline(sine)
    x = np.linspace(0, 24, 2001)
    exact = 100 + 5 * np.sin(2 * np.pi * x / 24)
    assert np.max(np.abs(sp(x) - exact)) < 1e-3 * 5
    assert sp.mean == pytest.approx(100.0, abs=1e-9)


def test_spline_is_periodic(sine):
    sp = build_spline(sine)
    x = np.linspace(0, 24, 97)
    np.testing.assert_allclose(sp(x), sp(x + 24), atol=1e-12)
    np.testing.assert_allclose(sp(x), sp(x - 48), atol=1e-12)


def test_spline_input_errors():
    o = np.array([0.0, 1.0, 2.0])
    with pytest.raises(ValueError, match="4 knots"):
        build_spline(DelayProfile("s", o, o, o, 3.0))
    o = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    with pytest.raises(ValueError, match="span"):
        build_spline(DelayProfile("s", o, o, o, 12.0))
    o = np.array([0.0, 1.0, 2.5, 4.0, 5.0, 6.0])
    with pytest.raises(ValueError, match="uniform"):
        build_spline(DelayProfile("s", o, o, o, 6.0))


def test_spline_averages_folded_duplicates():
    # offsets -12..12 on period 24: the endpoints land on the same knot
    o = np.arange(-12.0, 13.0)
    v = np.sin(2 * np.pi * o / 24)
    v[0], v[-1] = 0.1, -0.1
    sp = build_spline(DelayProfile("s", o, v, v, 24.0))
    assert sp(12.0) == pytest.approx(0.0, abs=1e-12)


# -- deviations and densities -----------------------------------------------

def test_constant_profile_has_zero_deviation():
    sp = build_spline(sinusoid_profile(amplitude=0.0))
    s = deviation_series(sp, n=1000, seed=1)
    assert np.max(s.values) == pytest.approx(0.0, abs=1e-12)
    h = density(s, bins=20)
    assert np.count_nonzero(h.counts) == 1


def test_deviation_bounds_and_seed(sine):
    sp = build_spline(sine)
    a = deviation_series(sp, n=10_000, seed=7)
    b = deviation_series(sp, n=10_000, seed=7)
    c = deviation_series(sp, n=10_000, seed=8)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert a.values.min() >= 0 and a.values.max() <= 5 * (1 + 1e-3)
    with pytest.raises(ValueError):
        deviation_series(sp, kind="jitter")
    with pytest.raises(ValueError):
        deviation_series(sp, n=0)


def test_density_of_uniform_sample():
    rng = np.random.default_rng(0)
    v = rng.uniform(0, 1, 200_000)
    v[0] = 1.0  # pin the upper edge
    h = density(_sample(v), bins=20)
    np.testing.assert_allclose(h.density, 1.0, rtol=0.05)
    assert np.sum(h.density * h.width) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        density(_sample([]), bins=20)


def test_sinusoid_value_density_is_u_shaped(sine):
    h = value_density(build_spline(sine), n=100_000, bins=20, seed=0)
    assert is_u_shaped(h)
    flat = value_density(build_spline(sinusoid_profile(amplitude=0.0)), n=1000, bins=20)
    assert not is_u_shaped(flat)


# -- exceedance --------------------------------------------------------------

def test_exceedance_endpoints_and_half_amplitude(sine):
    s = deviation_series(build_spline(sine), n=100_000, seed=0)
    e = exceedance(s, [0.0, 2.5, 5.1, 6.0])
    assert e.at(0.0) == 1.0
    assert e.at(2.5) == pytest.approx(2 / 3, abs=0.01)
    assert e.at(5.1) == 0.0 and e.at(6.0) == 0.0
    assert np.all(np.diff(e.probability) <= 0)
    with pytest.raises(KeyError):
        e.at(1.0)
    with pytest.raises(ValueError):
        exceedance(s, [1.0, 0.5])


def test_default_thresholds():
    t = default_thresholds(2.3)
    assert t[0] == 0.0 and t[-1] == 3.0 and np.allclose(np.diff(t), 0.25)
    assert default_thresholds(0.0)[-1] == 0.25


# -- arcsine law -------------------------------------------------------------

def test_arcsine_pdf_values():
    m = ArcsineModel(1.0)
    assert arcsine_pdf(m, 0.0) == pytest.approx(2 / np.pi, rel=1e-12)
    assert arcsine_pdf(m, 0.5) == pytest.approx(4 / (np.pi * np.sqrt(3)), rel=1e-12)
    with pytest.raises(ValueError):
        arcsine_pdf(m, 1.0)
    with pytest.raises(ValueError):
        arcsine_pdf(m, -0.1)
    total, _ = quad(lambda t: arcsine_pdf(ArcsineModel(2.0), t), 0, 2.0 - 1e-15, limit=200)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_arcsine_ccdf_values():
    m = ArcsineModel(2.0)
    assert m.ccdf(0.0) == 1.0
    assert m.ccdf(2.0) == pytest.approx(0.0, abs=1e-15)
    assert m.ccdf(5.0) == 0.0
    assert m.ccdf(1.0) == pytest.approx(2 / 3, rel=1e-12)
    assert m.ccdf(np.sqrt(2)) == pytest.approx(0.5, rel=1e-12)
    with pytest.raises(ValueError):
        arcsine_ccdf(m, -1.0)
    z = ArcsineModel(0.0)
    assert z.ccdf(0.0) == 1.0 and z.ccdf(0.1) == 0.0
    with pytest.raises(ValueError):
        ArcsineModel(-1.0)


@settings(max_examples=50, deadline=None)
@given(d=st.floats(0.01, 100), a=st.floats(0, 1), b=st.floats(0, 1))
def test_arcsine_ccdf_monotone(d, a, b):
    m = ArcsineModel(d)
    lo, hi = sorted((a * 1.5 * d, b * 1.5 * d))
    assert m.ccdf(lo) >= m.ccdf(hi)
    assert 0.0 <= m.ccdf(hi) <= 1.0


def test_fit_arcsine_on_sinusoid(sine):
    sp = build_spline(sine)
    m = fit_arcsine(sp)
    assert m.delta_t == pytest.approx(5.0, abs=1e-6 * 5)
    # the peak of sin(2 pi x / 24) sits at x = 6, so the phase is zero
    assert m.alpha == pytest.approx(0.0, abs=1e-6) or m.alpha == pytest.approx(2 * np.pi, abs=1e-6)


def test_fit_arcsine_matches_spline_extremes():
    # off-knot peak so the extremum is found between samples
    o = np.arange(-12.0, 13.0)
    p = DelayProfile("s", o, 100 + 3 * np.sin(2 * np.pi * (o - 0.37) / 14), o * 0, 14.0)
    sp = build_spline(p)
    m = fit_arcsine(sp)
    x = np.linspace(0, 14, 200_001)
    v = sp(x)
    assert m.delta_t == pytest.approx(0.5 * (v.max() - v.min()), abs=1e-7)


def test_fit_arcsine_skew_uses_largest_magnitude():
    o = np.arange(-11.0, 12.0)
    v = -2 * np.sin(2 * np.pi * o / 22) - 0.5
    p = DelayProfile("s", o, v, v, 22.0)
    m = fit_arcsine(build_spline(p), kind="skew")
    assert m.delta_t == pytest.approx(2.5, abs=1e-3)


def test_two_point_delta_t():
    assert two_point_delta_t(160.0, 157.0) == 1.5
    assert two_point_delta_t(157.0, 160.0) == 1.5


# -- Kumaraswamy -------------------------------------------------------------

def test_kumaraswamy_on_uniform():
    rng = np.random.default_rng(1)
    k = fit_kumaraswamy(_sample(rng.uniform(0, 1, 100_000)))
    assert k.a == pytest.approx(1.0, abs=0.05)
    assert k.b == pytest.approx(1.0, abs=0.05)


def test_kumaraswamy_on_arcsine():
    s = _arcsine_sample(1.0)
    k = fit_kumaraswamy(s)
    arc = ArcsineModel(1.0)
    assert ccdf_distance(k.ccdf, arc.ccdf, 1.0) < 0.02


def test_kumaraswamy_errors():
    with pytest.raises(ValueError, match="degenerate"):
        fit_kumaraswamy(_sample(np.full(1000, 0.3)))
    with pytest.raises(ValueError):
        fit_kumaraswamy(_sample(np.linspace(0, 1, 50)))
    with pytest.raises(ValueError):
        KumaraswamyModel(0.0, 1.0, 1.0)


# -- Kolmogorov-Smirnov ------------------------------------------------------

def test_ks_against_own_empirical_ccdf():
    rng = np.random.default_rng(2)
    v = rng.uniform(0, 1, 5000)
    s = np.sort(v)

    def emp(t):
        return (s.size - np.searchsorted(s, t, side="left")) / s.size

    assert ks_statistic(_sample(v), emp) < 1 / v.size


def test_ks_arcsine_sample():
    assert ks_statistic(_arcsine_sample(2.0, seed=3), ArcsineModel(2.0).ccdf) < 0.01


def test_ks_constant_zero_sample():
    assert ks_statistic(_sample(np.zeros(1000)), ArcsineModel(1.0).ccdf) >= 0.99


@pytest.mark.parametrize("seed", range(10))
def test_ks_sinusoid_over_seeds(seed, sine):
    sp = build_spline(sine)
    s = deviation_series(sp, n=100_000, seed=seed)
    assert ks_statistic(s, fit_arcsine(sp).ccdf) < 0.01
