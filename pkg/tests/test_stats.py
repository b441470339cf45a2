import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from kronecker.errors import ArgumentError, DegenerateTestError
from kronecker.stats import (
    EmpiricalDistribution,
    cauchy_cdf,
    cauchy_scale_fit,
    ks_statistic,
    ks_two_sample,
    poisson_count_test,
    poisson_intensity,
    rho_constant,
    rho_reconstruction,
    uniformity_and_independence,
)


def test_cauchy_cdf_values():
    assert cauchy_cdf(0.0) == 0.5
    assert cauchy_cdf(1.0) == pytest.approx(0.75, abs=1e-15)
    assert cauchy_cdf(-1.0) == pytest.approx(0.25, abs=1e-15)


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_cauchy_cdf_symmetry(z):
    assert cauchy_cdf(z) + cauchy_cdf(-z) == pytest.approx(1.0, abs=1e-14)


def test_rho_values():
    assert rho_constant(1) == pytest.approx(16 / math.pi**4, rel=1e-15)
    assert rho_constant(2) == pytest.approx(32 / math.pi**6, rel=1e-15)
    assert rho_constant(1) == pytest.approx(0.164255, abs=1e-6)
    for d in (1, 2, 3):
        assert abs(rho_constant(d) - rho_reconstruction(d)) <= 1e-12
    with pytest.raises(ArgumentError):
        rho_constant(0)


def test_ks_matches_scipy(rng):
    x = rng.standard_cauchy(500)
    assert ks_statistic(EmpiricalDistribution(x), cauchy_cdf) == pytest.approx(sps.kstest(x, "cauchy").statistic)


def test_ks_null_distribution():
    rng = np.random.default_rng(2)
    n = 10_000
    hits = sum(ks_statistic(EmpiricalDistribution(rng.standard_cauchy(n)), cauchy_cdf) < 1.63 / math.sqrt(n)
               for _ in range(200))
    assert hits >= 194


def test_ks_single_point_and_shift(rng):
    assert ks_statistic(EmpiricalDistribution([0.0]), cauchy_cdf) == pytest.approx(0.5)
    x = rng.standard_cauchy(2000)
    assert ks_statistic(EmpiricalDistribution(x + 1.0), cauchy_cdf) > ks_statistic(EmpiricalDistribution(x), cauchy_cdf)


def test_ks_two_sample(rng):
    a = EmpiricalDistribution(rng.normal(size=1000))
    assert ks_two_sample(a, a) == 0.0


def test_empirical_distribution():
    e = EmpiricalDistribution([3.0, 1.0, 2.0])
    assert e.cdf(2.0) == pytest.approx(2 / 3)
    assert e.to_csv().splitlines()[0] == "value,ecdf"
    with pytest.raises(ArgumentError):
        EmpiricalDistribution([1.0, float("nan")])


def test_scale_fit_quantiles():
    rho = 0.164
    q = rho * np.tan(np.pi * (np.arange(1, 100_001) / 100_001 - 0.5))
    assert cauchy_scale_fit(EmpiricalDistribution(q)) == pytest.approx(rho, rel=1e-4)
    with pytest.raises(ArgumentError):
        cauchy_scale_fit(EmpiricalDistribution(q[:50]))


def test_scale_fit_simulation():
    rng = np.random.default_rng(6)
    good = sum(abs(cauchy_scale_fit(EmpiricalDistribution(0.164 * rng.standard_cauchy(100_000))) / 0.164 - 1) <= 0.03
               for _ in range(100))
    assert good >= 95


def test_scale_fit_normal(rng):
    x = rng.normal(size=200_000)
    assert cauchy_scale_fit(EmpiricalDistribution(x)) == pytest.approx(0.6745, rel=0.02)


def test_poisson_intensity_value():
    assert poisson_intensity(2, 0.5, 0.2) == pytest.approx(2.130, abs=5e-4)


def test_poisson_test_self_consistent():
    rng = np.random.default_rng(10)
    passed = sum(poisson_count_test(rng.poisson(2.0, 10_000), 2.0).p_value > 0.01 for _ in range(100))
    assert passed >= 95
    rep = poisson_count_test(rng.poisson(2.0, 10_000), 2.0)
    assert rep.dispersion == pytest.approx(1.0, abs=0.06)
    assert sum(rep.bin_counts.values()) == 10_000


def test_poisson_test_all_zero():
    assert poisson_count_test(np.zeros(10_000, int), 3.0).p_value < 1e-6


def test_poisson_test_degenerate():
    with pytest.raises(DegenerateTestError):
        poisson_count_test(np.zeros(5, int), 2.0)
    with pytest.raises(DegenerateTestError):
        poisson_count_test([], 2.0)


def test_uniform_marks_pass():
    rng = np.random.default_rng(12)
    n = 3000
    rep = uniformity_and_independence(rng.uniform(-2, 2, n), np.column_stack([rng.random(n), 2 * rng.random(n)]),
                                      ranges=[1, 2], seed=1)
    assert rep["all_uniform"] and rep["all_independent"]


def test_constant_marks_flagged():
    rng = np.random.default_rng(13)
    n = 500
    rep = uniformity_and_independence(rng.uniform(-2, 2, n), np.full((n, 1), 0.5), seed=1)
    assert rep["ks"][0]["statistic"] >= 0.5 and not rep["all_uniform"]


def test_planted_dependence():
    rng = np.random.default_rng(14)
    theta = rng.uniform(-2, 2, 1000)
    marks = (np.abs(theta) / 2.0)[:, None]
    rep = uniformity_and_independence(theta, marks, seed=2)
    assert rep["theta_permutation"][0]["p_value"] < 0.01
    assert rep["dcov"][0]["p_value"] < 0.05


def test_marks_argument_checks():
    with pytest.raises(ArgumentError):
        uniformity_and_independence(np.zeros(50), np.zeros((50, 2)))
    with pytest.raises(ArgumentError):
        uniformity_and_independence(np.zeros(200), np.zeros((100, 2)))
