import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate, special
from hypothesis import given, settings, strategies as st

from lightpath import analytics as an
from lightpath.analytics import EventSpec, GammaParams, INV_E
from lightpath.errors import DomainError, InvalidArgument


def mp_log_cdf(theta, k, z):
    mp.mp.dps = 40
    return float(mp.log(mp.gammainc(k, 0, mp.mpf(z) / theta, regularized=True)))


def test_params_validated():
    with pytest.raises(InvalidArgument):
        GammaParams(0, 3)
    with pytest.raises(InvalidArgument):
        GammaParams(1, 0)
    with pytest.raises(InvalidArgument):
        GammaParams(1, 2.5)


@pytest.mark.parametrize("p,z,expected", [
    ((1, 1), 0.0, 0.0),
    ((1, 2), 1.0, -1.0),
    ((2, 50), 100.0, -3.569763860925674446),   # 50-digit mpmath evaluation
])
def test_log_pdf_values(p, z, expected):
    assert an.gamma_log_pdf(p, z) == pytest.approx(expected, rel=1e-13, abs=1e-15)


def test_log_pdf_domain():
    with pytest.raises(DomainError):
        an.gamma_log_pdf((1, 3), -0.1)
    assert an.gamma_log_pdf((1, 3), 0.0) == -math.inf


@pytest.mark.parametrize("k", [1, 10, 1000, 10**6])
def test_log_factorial(k):
    mp.mp.dps = 40
    assert an.log_factorial(k) == pytest.approx(float(mp.log(mp.factorial(k))), rel=1e-12)


@pytest.mark.parametrize("k", [1, 5, 50, 500])
def test_pdf_integrates_to_one(k):
    theta = 1.7
    hi = theta * (k + 20 * math.sqrt(k))
    val, _ = integrate.quad(lambda z: math.exp(an.gamma_log_pdf((theta, k), z)), 0, hi,
                            points=[theta * (k - 1)], limit=400, epsabs=1e-13, epsrel=1e-13)
    assert abs(val - 1) < 1e-9


def test_cdf_closed_form():
    assert abs(an.gamma_cdf((1, 2), 1.0) - (1 - 2 / math.e)) < 1e-12


def test_cdf_limits():
    assert an.gamma_cdf((1, 4), 0.0) == 0.0
    assert an.gamma_log_cdf((1, 4), 0.0) == -math.inf
    assert an.gamma_cdf((1, 4), 1e4) == 1.0
    with pytest.raises(DomainError):
        an.gamma_cdf((1, 4), -1)


@pytest.mark.parametrize("k,x", [(1, 0.5), (3, 0.01), (7, 5.0), (40, 39.0), (40, 41.0),
                                 (500, 450.0), (5000, 5000.0), (5000, 5100.0), (10**5, 99_000.0)])
def test_cdf_absolute_error_vs_mpmath(k, x):
    mp.mp.dps = 40
    ref = float(mp.gammainc(k, 0, x, regularized=True))
    assert abs(an.gamma_cdf((1, k), x) - ref) <= 1e-12


@pytest.mark.parametrize("k", [10**6])
def test_cdf_large_k_vs_scipy(k):
    for x in (k * 0.999, k, k * 1.001):
        assert abs(an.gamma_cdf((1, k), x) - special.gammainc(k, x)) <= 1e-12


@pytest.mark.parametrize("theta,k,z", [(1000.0, 50, 18.0), (1e6, 200, 70.0), (3.0, 2, 1e-8)])
def test_deep_lower_tail_in_log_space(theta, k, z):
    # these probabilities underflow doubles; compare logs
    assert an.gamma_log_cdf((theta, k), z) == pytest.approx(mp_log_cdf(theta, k, z), rel=1e-12)


def test_log_sf_complements():
    for k, z in [(5, 2.0), (5, 20.0), (300, 250.0)]:
        a = math.exp(an.gamma_log_cdf((1, k), z))
        b = math.exp(an.gamma_log_sf((1, k), z))
        assert a + b == pytest.approx(1.0, abs=1e-13)


def test_cdf_matches_monte_carlo():
    gen = np.random.default_rng(20240601)
    reps, hits = 10**7, 0
    for _ in range(10):
        hits += int((gen.standard_exponential((reps // 10, 7)).sum(axis=1) <= 5.0).sum())
    p_mc = hits / reps
    se = math.sqrt(p_mc * (1 - p_mc) / reps)
    assert abs(an.gamma_cdf((1, 7), 5.0) - p_mc) < 3 * se


@settings(max_examples=80, deadline=None)
@given(st.floats(0.1, 50), st.integers(1, 400), st.floats(0.0, 3.0))
def test_scale_invariance(theta, k, frac):
    z = frac * theta * k
    assert an.gamma_cdf((theta, k), z) == pytest.approx(an.gamma_cdf((1, k), z / theta),
                                                        abs=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 2000), st.floats(0.0, 3.0), st.floats(0.0, 0.5))
def test_cdf_monotone(k, a, b):
    z1 = a * k
    z2 = z1 + b * math.sqrt(k)
    assert an.gamma_cdf((1, k), z1) <= an.gamma_cdf((1, k), z2) + 1e-15


def test_window_probability():
    p = (2.0, 5)
    lo, hi = 3.0, 6.0
    direct = special.gammainc(5, hi / 2) - special.gammainc(5, lo / 2)
    assert math.exp(an.gamma_log_window(p, lo, hi)) == pytest.approx(direct, rel=1e-12)
    assert an.gamma_log_window(p, -4.0, 1.0) == pytest.approx(an.gamma_log_cdf(p, 1.0))


@pytest.mark.parametrize("n,ell,count", [(4, 2, 24), (5, 4, 120), (10, 1, 90)])
def test_count_paths(n, ell, count):
    assert math.exp(an.count_paths(n, ell)) == pytest.approx(count, rel=1e-13)


def test_count_paths_bound_and_errors():
    for n, ell in [(100, 50), (10**6, 20_000), (30, 29)]:
        assert an.count_paths(n, ell) <= (ell + 1) * math.log(n)
    assert an.count_paths(10**6, 20_000) == pytest.approx(
        math.lgamma(10**6 + 1) - math.lgamma(10**6 - 20_000), rel=1e-12)
    with pytest.raises(InvalidArgument):
        an.count_paths(5, 5)


def test_union_bound_terms_recomputed():
    n = 10**4
    terms = an.atypical_union_terms(n)
    logn = math.log(n)
    assert terms[0] == -math.inf            # l = 1: threshold 1/e - ln n < 0
    for ell in (26, 27, 100, 1000, 5000, 9999):
        z = ell / math.e - logn
        ref = math.lgamma(n + 1) - math.lgamma(n - ell) + mp_log_cdf(n, ell, z)
        assert terms[ell - 1] == pytest.approx(ref, rel=1e-10)
    assert np.all(terms[:int(math.e * logn)] == -math.inf)


def test_union_bound_decreases():
    vals = [an.atypical_union_bound(n) for n in (10**3, 10**4, 10**5)]
    assert all(np.isfinite(vals))
    assert vals[0] > vals[1] > vals[2]


def test_event_specs():
    n = 1000
    assert EventSpec.F(n, 10, 0.3, 0.1).trunc == pytest.approx(0.1 * math.log(n))
    g = EventSpec.G(n, 10, 0.3, 0.2)
    assert g.normalized and g.kind == "G"
    assert EventSpec.H(n, 10, 0.3).trunc == pytest.approx(math.log(n) / 10)
    with pytest.raises(InvalidArgument):
        EventSpec("Q", 3, 0.3, 1.0)
    with pytest.raises(InvalidArgument):
        EventSpec("F", 3, 0.3, 0.0)


def test_expected_count_decomposition():
    n, ell, lam = 1000, 50, INV_E
    spec = EventSpec("F", ell, lam, math.inf)
    dev = 0.37
    win = special.gammainc(ell, lam * ell / n) - special.gammainc(ell, (lam * ell - 1) / n)
    ref = an.count_paths(n, ell) + math.log(win) + math.log(dev)
    assert an.expected_count(n, spec, dev) == pytest.approx(ref, rel=1e-9)
    assert an.expected_count(n, spec, 1.0) == pytest.approx(ref - math.log(dev), rel=1e-9)
    assert math.isfinite(ref)


def test_expected_count_single_edge():
    n, lam = 50, 3.0
    spec = EventSpec("F", 1, lam, math.inf)
    ref = math.log(n * (n - 1)) + math.log(math.exp(-(lam - 1) / n) - math.exp(-lam / n))
    assert an.expected_count(n, spec, 1.0) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("dev", [0.0, -0.1, 1.5])
def test_expected_count_bad_dev(dev):
    with pytest.raises(InvalidArgument):
        an.expected_count(100, EventSpec.H(100, 5, 0.3), dev)


def test_certificate_definition():
    n, lam, fail = 12, INV_E, 0.01
    ell = an.first_moment_upper_certificate(n, lam, fail)

    def mass(l):
        return sum(math.exp(an.count_paths(n, m)) * special.gammainc(m, lam * m / n)
                   for m in range(l, min(2 * l - 1, n - 1) + 1))
    assert ell == 9
    assert mass(ell) <= fail < mass(ell - 1)


def test_certificate_small_lambda_and_vacuous():
    assert an.first_moment_upper_certificate(100, 0.01, 0.01) == 3
    assert an.first_moment_upper_certificate(100, 0.3, 1.0) == 1
    assert an.first_moment_upper_certificate(8, 5.0, 0.01) is None


def test_bridge_series_matches_kolmogorov():
    for d in (0.2, 0.3, 0.5, 0.82757355, 0.99, 1.0, 1.5, 3.0):
        assert an.bridge_lowertail(d) == pytest.approx(1 - special.kolmogorov(d), abs=1e-14)


def test_bridge_median():
    assert an.bridge_lowertail(0.82757355) == pytest.approx(0.5, abs=1e-7)


def test_bridge_median_monte_carlo():
    # discretised bridge: sup over a grid undershoots, so allow a small bias
    gen = np.random.default_rng(5)
    steps, reps = 2000, 20000
    hits = 0
    for _ in range(4):
        w = np.cumsum(gen.standard_normal((reps // 4, steps)), axis=1) / math.sqrt(steps)
        t = np.arange(1, steps + 1) / steps
        b = w - t * w[:, -1:]
        hits += int((np.abs(b).max(axis=1) <= 0.82757355).sum())
    assert abs(hits / reps - 0.5) < 0.04


def test_bridge_limits_and_ratio():
    assert abs(an.bridge_lowertail(10.0) - 1) < 1e-12
    r = an.bridge_lowertail(0.3) / an.bridge_lowertail(0.3, "asymptotic")
    assert 0.99 <= r <= 1.01


def test_bridge_monotone_and_dominates():
    grid = np.linspace(0.2, 3.0, 57)
    vals = [an.bridge_lowertail(d) for d in grid]
    assert all(0 <= v <= 1 for v in vals)
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    for d in np.linspace(0.05, 0.5, 10):
        assert an.bridge_lowertail(d) >= an.bridge_lowertail(d, "asymptotic")


def test_bridge_errors():
    with pytest.raises(DomainError):
        an.bridge_lowertail(0.0)
    with pytest.raises(InvalidArgument):
        an.bridge_lowertail(1.0, "exact")


@pytest.mark.parametrize("k", [10, 5000, 10**6])
def test_cdf_at_the_mean_terminates(k):
    # x == k makes the expansion variable exactly zero
    mp.mp.dps = 30
    ref = float(mp.gammainc(k, 0, k, regularized=True)) if k < 10**6 else special.gammainc(k, k)
    assert abs(an.gamma_cdf((1, k), float(k)) - ref) <= 1e-12
