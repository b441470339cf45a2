import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import zeta

from kronecker.errors import ArgumentError, ResonantSingularityError, ResourceError, SingularTermError
from kronecker.orbit import discrepancy_direct
from kronecker.params import SampleXi, sample_shear, sample_xi
from kronecker.resonance import (
    PointProcessSample,
    ResonantTerm,
    check_splitness,
    enumerate_resonant_set,
    fourier_term,
    gamma_constant,
    make_term,
    mean_abs_gamma,
    phi_closed_form,
    phi_partial_sum,
    phi_series,
    resonant_discrepancy,
    stage_frequencies,
    truncated_sum,
)


def _rand_xi(rng, d=2, eta=0.05):
    return SampleXi(u=rng.uniform(0.1, 0.4, d), shear=sample_shear(d, eta, rng),
                    alpha=rng.random(d), x=rng.random(d))


def test_fourier_term_vanishes_on_half_period():
    xi = SampleXi.simple([0.25, 0.3], [0.123, 0.456], [0.1, 0.2])
    assert fourier_term(xi, 100, [2, 1]) == pytest.approx(0.0, abs=1e-15)


def test_fourier_term_full_period():
    xi = SampleXi.simple([0.3], [0.25], [0.1])
    assert fourier_term(xi, 4, [1]) == pytest.approx(0.0, abs=1e-15)


def test_fourier_term_singular():
    xi = SampleXi.simple([0.3], [0.5], [0.0])
    with pytest.raises(ResonantSingularityError):
        fourier_term(xi, 10, [2])
    with pytest.raises(ArgumentError):
        fourier_term(xi, 10, [0])


def test_fourier_series_converges_to_direct(rng):
    # cube truncations |k_i| <= K: the RMS gap to the orbit count shrinks with K
    N = 1000
    errs = []
    for _ in range(30):
        xi = _rand_xi(rng)
        D = discrepancy_direct(xi, N)
        errs.append([abs(_cube_sum(xi, N, K) - D) for K in (25, 100, 400)])
    rms = np.sqrt(np.mean(np.square(errs), axis=0))
    assert rms[0] > rms[1] > rms[2]
    assert rms[2] < 1.0


def _cube_sum(xi, N, K):
    from kronecker.resonance import _cube, _fourier_terms

    return float(np.sum(_fourier_terms(xi, N, _cube(2, K))))


def test_fourier_sum_d1_matches_direct(config1):
    # the cube |k| <= N leaves a tail of order one
    for i in range(5):
        xi = sample_xi(config1, i)
        assert truncated_sum(xi, 2000, "D1") == pytest.approx(discrepancy_direct(xi, 2000), abs=1.0)


def test_stage_nesting(rng):
    for _ in range(5):
        xi = _rand_xi(rng)
        N, eps, delta = 3000, 0.5, 0.2
        s3 = {tuple(k) for k in stage_frequencies(xi, N, "D3")}
        s4 = {tuple(k) for k in stage_frequencies(xi, N, "D4", eps)}
        s5 = {tuple(k) for k in stage_frequencies(xi, N, "D5", eps, delta)}
        assert s5 <= s4 <= s3
        A = xi.shear.entries.T
        for k in s4 - s5:
            assert abs(np.prod(A @ np.array(k, float))) >= N ** (1 - delta)


def test_stage_errors(rng):
    xi = _rand_xi(rng)
    with pytest.raises(ArgumentError):
        stage_frequencies(xi, 100, "D9")
    with pytest.raises(ArgumentError):
        stage_frequencies(xi, 100, "D4")
    with pytest.raises(ResourceError):
        stage_frequencies(xi, 10**6, "D1")


def test_first_stage_error_does_not_grow(config1):
    rms = []
    for N in (100, 1000, 10000):
        diffs = [discrepancy_direct(sample_xi(config1, i), N) - truncated_sum(sample_xi(config1, i), N, "D1")
                 for i in range(40)]
        rms.append(float(np.sqrt(np.mean(np.square(diffs)))))
    assert rms[2] <= 2 * max(rms[0], rms[1]) + 0.1


def _naive_resonant(xi, N, eps, delta):
    # independent oracle: all k in a generous box, tested with Python floats
    A = xi.shear.entries.T
    P = N ** (1 - delta)
    thr = 1 / (eps * math.log(N) ** xi.d)
    R = int(2 * P) + 2
    out = set()
    for k1 in range(-R, R + 1):
        for k2 in range(-R, R + 1):
            kb = A @ np.array([k1, k2], float)
            if kb[0] <= 0 or min(abs(kb)) < 1 or abs(kb[0] * kb[1]) >= P:
                continue
            t = k1 * xi.alpha[0] + k2 * xi.alpha[1]
            m = -round(t)
            if abs(kb[0] * kb[1]) * abs(t + m) <= thr and math.gcd(k1, k2, m) == 1:
                out.add((k1, k2))
    return out


def test_bruteforce_matches_naive_oracle(rng):
    for _ in range(4):
        xi = _rand_xi(rng)
        s = enumerate_resonant_set(xi, 400, epsilon=0.5, delta=0.2)
        assert set(s.keys) == _naive_resonant(xi, 400, 0.5, 0.2)


def test_empty_set_for_tiny_threshold(rng):
    xi = _rand_xi(rng)
    s = enumerate_resonant_set(xi, 200, epsilon=1e9, delta=0.2)
    assert len(s) == 0 and _naive_resonant(xi, 200, 1e9, 0.2) == set()


def test_near_rational_alpha():
    F = [0, 1]
    while len(F) < 23:
        F.append(F[-1] + F[-2])
    xi = SampleXi.simple([0.2, 0.3], [F[20] / F[21] + 1e-9, math.sqrt(2) - 1], [0.1, 0.7])
    a = enumerate_resonant_set(xi, 10_000, "bruteforce", epsilon=0.5, delta=0.2)
    b = enumerate_resonant_set(xi, 10_000, "latticeflow", epsilon=0.5, delta=0.2)
    assert a.keys == b.keys and len(a) > 0


def test_terms_primitive_with_witness(config1, config2):
    for i in range(1000):
        for t in enumerate_resonant_set(sample_xi(config1, i), 5000, "latticeflow", epsilon=0.5, delta=0.2).terms:
            assert math.gcd(*t.k, t.m) == 1
    for i in range(100):
        for t in enumerate_resonant_set(sample_xi(config2, i), 500, epsilon=0.5, delta=0.2).terms:
            assert math.gcd(*t.k, t.m) == 1
            assert -0.5 < t.theta <= 0.5


def test_continued_fractions_match_bruteforce(config1):
    for i in range(100):
        xi = sample_xi(config1, i)
        a = enumerate_resonant_set(xi, 10_000, "bruteforce", epsilon=0.5, delta=0.2)
        b = enumerate_resonant_set(xi, 10_000, "latticeflow", epsilon=0.5, delta=0.2)
        assert a.keys == b.keys


def test_enumeration_errors(rng):
    xi = _rand_xi(rng)
    with pytest.raises(ResourceError):
        enumerate_resonant_set(xi, 10**6, "bruteforce", epsilon=0.5, delta=0.2)
    with pytest.raises(ArgumentError):
        enumerate_resonant_set(xi, 100, "nope", epsilon=0.5, delta=0.2)
    with pytest.raises(ArgumentError):
        enumerate_resonant_set(_rand_xi(rng, d=3), 100, "latticeflow", epsilon=0.5, delta=0.2)


def test_term_fields(rng):
    xi = _rand_xi(rng)
    N = 5000
    t = make_term(xi, N, (3, -5))
    kbar = xi.shear.entries.T @ np.array([3.0, -5.0])
    assert np.allclose(t.kbar, kbar, rtol=1e-15)
    assert t.Theta == pytest.approx(math.log(N) ** 2 * np.prod(kbar) * t.theta, rel=1e-12)
    assert t.parity == pytest.approx((N * t.theta) % 2, abs=1e-9)
    assert t.phase == pytest.approx((3 * xi.x[0] - 5 * xi.x[1] + (N + 1) * t.theta / 2) % 1, abs=1e-9)
    assert t.gamma == pytest.approx(phi_series([*t.side_marks, t.parity, t.phase]))


def test_phi_zero_cases():
    assert phi_series([0.0, 0.3, 0.2]) == pytest.approx(0.0, abs=1e-15)
    assert phi_series([0.2, 0.0, 0.4, 0.2]) == pytest.approx(0.0, abs=1e-15)
    assert phi_series([0.3, 0.2, 1.0, 0.1]) == pytest.approx(0.0, abs=1e-14)


def test_phi_long_sum_example():
    assert phi_series([0.2, 0.7, 0.1], tolerance=1e-10) == pytest.approx(phi_partial_sum([0.2, 0.7, 0.1], 10**7),
                                                                          abs=1e-9)


@given(st.integers(1, 3), st.integers(0, 2**32))
def test_phi_matches_partial_sum(d, seed):
    rng = np.random.default_rng(seed)
    eta = np.r_[rng.random(d), 2 * rng.random(), rng.random()]
    J = 20_000
    tail = 1.0 / (d * J**d)
    assert abs(phi_series(eta) - phi_partial_sum(eta, J)) <= tail + 1e-12


@given(st.integers(0, 2**32))
def test_phi_symmetries(seed):
    rng = np.random.default_rng(seed)
    s, w, p = rng.random(2), 2 * rng.random(), rng.random()
    base = phi_closed_form(s, w, p)
    # periodic in every mark, odd in each side mark and in the parity mark
    assert phi_closed_form(s + 1, w + 2, p + 1) == pytest.approx(base, abs=1e-12)
    assert phi_closed_form(np.array([-s[0], s[1]]), w, p) == pytest.approx(-base, abs=1e-12)
    assert phi_closed_form(s, -w, p) == pytest.approx(-base, abs=1e-12)
    assert phi_closed_form(s, w, -p) == pytest.approx(base, abs=1e-12)


def test_phi_bounded():
    rng = np.random.default_rng(3)
    for d in (1, 2, 3):
        v = phi_closed_form(rng.random((5000, d)), 2 * rng.random(5000), rng.random(5000))
        assert np.max(np.abs(v)) <= zeta(d + 1)


def test_mean_abs_gamma_against_direct_series():
    rng = np.random.default_rng(8)
    m, se = mean_abs_gamma(1, 200_000, np.random.default_rng(9))
    # oracle: the same expectation with phi evaluated by direct summation
    vals = [abs(phi_partial_sum(np.r_[rng.random(), 2 * rng.random(), rng.random()], 4000)) for _ in range(3000)]
    oracle, ose = np.mean(vals), np.std(vals) / math.sqrt(len(vals))
    assert abs(m - oracle) <= 4 * math.hypot(se, ose)
    assert gamma_constant(1) == pytest.approx(4 / (3 * math.pi), rel=1e-14)


def _term(k, Theta, gamma, kbar=(2.0, 3.0)):
    return ResonantTerm(k=k, m=0, kbar=kbar, theta=0.0, Theta=Theta, parity=0.0,
                        side_marks=(0.0, 0.0), phase=0.0, gamma=gamma)


def test_resonant_discrepancy_formula():
    N, eps = 10**6, 0.5
    lnd = math.log(N) ** 2
    assert resonant_discrepancy(PointProcessSample([], N, eps, 0.2, lnd, d=2)) == 0.0
    s = PointProcessSample([_term((1, 1), 1 / (2 * eps), zeta(3) / 2)], N, eps, 0.2, lnd, d=2)
    assert resonant_discrepancy(s) / lnd == pytest.approx(2 / math.pi**3 * zeta(3) * eps)
    with pytest.raises(SingularTermError):
        resonant_discrepancy(PointProcessSample([_term((1, 1), 0.0, 1.0)], N, eps, 0.2, lnd, d=2))
    with pytest.raises(ArgumentError):
        PointProcessSample([_term((1, 1), 1.0, 1.0), _term((1, 1), 2.0, 1.0)], N, eps, 0.2, lnd, d=2)


def test_resonant_part_tracks_direct(config1):
    N = 10_000
    D, D7 = [], []
    for i in range(1000):
        xi = sample_xi(config1, i)
        D.append(discrepancy_direct(xi, N))
        D7.append(resonant_discrepancy(enumerate_resonant_set(xi, N, "latticeflow", epsilon=0.5, delta=0.2)))
    from scipy.stats import spearmanr

    assert spearmanr(D, D7).statistic > 0


def test_splitness():
    N = 10**6
    lnd = math.log(N) ** 2
    one = PointProcessSample([_term((1, 1), 1.0, 1.0, kbar=(100.0, 200.0))], N, 0.5, 0.2, lnd, d=2)
    assert check_splitness(one, 2.0)
    two = PointProcessSample([_term((1, 1), 1.0, 1.0, kbar=(100.0, 200.0)),
                              _term((1, 2), 1.0, 1.0, kbar=(100.0, 9000.0))], N, 0.5, 0.2, lnd, d=2)
    assert not check_splitness(two, 0.1)


def test_sample_serialization(rng):
    xi = _rand_xi(rng)
    s = enumerate_resonant_set(xi, 5000, epsilon=0.5, delta=0.2)
    lines = s.to_csv().strip().splitlines()
    assert lines[0].split(",") == s.csv_header() and len(lines) == len(s) + 1
    js = json.loads(s.to_json())
    assert js["count"] == len(s) and js["D7"] == pytest.approx(resonant_discrepancy(s))
    assert s.marks().shape == (len(s), 4)
