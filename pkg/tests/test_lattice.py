import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import zeta

from kronecker.errors import ArgumentError
from kronecker.lattice import (
    ApproxHaarSampler,
    BoxFunction,
    FlowTime,
    RegionSpec,
    SL2HaarSampler,
    UnimodularLattice,
    approx_haar_sample,
    cartan_flow,
    count_region_vectors,
    flow_grid,
    flow_scan,
    lambda_matrix,
    lattice_from_csv,
    multiple_solution_stats,
    planar_pair_prediction,
    psi_marks,
    rogers_mc,
    sl2_haar_sample,
)
from kronecker.params import SampleXi, ShearMatrix, sample_xi
from kronecker.resonance import enumerate_resonant_set

HAND = np.array([[2.0, 0.0, 0.0], [-2.0, 1.0, 0.0], [1e-4, 0.0, 0.5]])


def test_unimodular_validation():
    with pytest.raises(ArgumentError):
        UnimodularLattice(2 * np.eye(3))
    with pytest.raises(ArgumentError):
        UnimodularLattice(np.eye(3), scales=[1.0, -1.0, -1.0])
    L = UnimodularLattice(HAND)
    assert np.allclose(L.vector([1, 0, 0]), [2.0, -2.0, 1e-4], rtol=0, atol=1e-18)


def test_lambda_matrix_layout():
    xi = SampleXi.simple([0.1, 0.2], [0.0, 0.0], [0.0, 0.0])
    assert np.array_equal(lambda_matrix(xi).basis, np.eye(3))
    a = np.array([[1.01, 0.02], [-0.03, 1.0]])
    a[1, 1] = (1 + a[0, 1] * a[1, 0]) / a[0, 0]
    xi = SampleXi(u=[0.1, 0.2], shear=ShearMatrix(a), alpha=[0.3, 0.7], x=[0.0, 0.0])
    want = np.array([[a[0, 0], a[0, 1], 0.0], [a[1, 0], a[1, 1], 0.0], [0.3, 0.7, 1.0]])
    assert np.array_equal(lambda_matrix(xi).basis, want)


def test_lambda_det(config2):
    for i in range(10_000):
        assert abs(lambda_matrix(sample_xi(config2, i)).det() - 1.0) <= 1e-14


@given(st.integers(0, 2**32))
def test_cartan_flow_semigroup(seed):
    rng = np.random.default_rng(seed)
    xi = SampleXi(u=[0.2, 0.2], shear=ShearMatrix(np.eye(2)), alpha=rng.random(2), x=[0, 0])
    L = lambda_matrix(xi)
    s, t = rng.uniform(0, 5, 2), rng.uniform(0, 5, 2)
    assert np.array_equal(cartan_flow([0.0, 0.0], L).basis, L.basis)
    a = cartan_flow(s, cartan_flow(t, L)).basis
    b = cartan_flow(s + t, L).basis
    assert np.allclose(a, b, rtol=1e-12, atol=0)
    assert abs(cartan_flow(s + t, L).det() - 1.0) <= 1e-12


def test_flow_time_nonnegative():
    with pytest.raises(ArgumentError):
        FlowTime((-1.0, 0.0))
    assert FlowTime((1.0, 2.0)).in_grid(10**8, 0.2)


def test_region_example_integer_lattice():
    count, V = count_region_vectors(UnimodularLattice(np.eye(3)), RegionSpec.standard(10, 1.0))
    assert count == 0 and len(V) == 0


def test_region_example_constructed():
    L = UnimodularLattice(HAND)
    region = RegionSpec.standard(10, 1.0)
    count, V = count_region_vectors(L, region)
    assert count >= 1
    assert np.any(np.all(np.isclose(V, [2.0, -2.0, 1e-4], rtol=1e-12, atol=0), axis=1))
    marks = psi_marks(L, 3.0, region)
    th, par = next(m for m in marks if abs(m[0] + 0.04) < 1e-9)
    assert th == pytest.approx(-0.04, rel=1e-12)
    assert par == pytest.approx(3e-4, rel=1e-9)


def test_empty_region_marks():
    assert psi_marks(UnimodularLattice(np.eye(3)), 2.0, RegionSpec.standard(10, 1.0)) == []
    assert count_region_vectors(UnimodularLattice(HAND), RegionSpec(kappa=0.0))[0] == 0


def _random_moderate_lattice(rng):
    while True:
        F = np.eye(3) + 0.3 * rng.normal(size=(3, 3))
        det = np.linalg.det(F)
        if det < 0.2:
            continue
        F = F / det ** (1 / 3)
        t = rng.uniform(0, 1.2, 2)
        L = UnimodularLattice(F, np.exp([-t[0], -t[1], t.sum()]))
        return L


def test_region_matches_naive_scan():
    rng = np.random.default_rng(77)
    region = RegionSpec.standard(1.5, 0.5)
    R = 20
    ax = np.arange(-R, R + 1)
    C = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), -1).reshape(-1, 3)
    C = C[np.gcd.reduce(np.abs(C), axis=1) == 1]
    checked = 0
    while checked < 1000:
        L = _random_moderate_lattice(rng)
        B = L.basis
        # all region vectors have integer coordinates inside the scanned cube
        if np.abs(np.linalg.inv(B)).sum(axis=1).max() * region.half_widths.max() > R:
            continue
        V = C @ B.T
        want = np.sort(V[region.contains(V)], axis=0)
        count, got = count_region_vectors(L, region)
        assert count == len(want)
        assert np.allclose(np.sort(got, axis=0), want, rtol=1e-12, atol=1e-12)
        checked += 1


def test_psi_theta_range():
    rng = np.random.default_rng(5)
    eps = 0.5
    region = RegionSpec.standard(3, eps)
    for _ in range(200):
        for th, par in psi_marks(_random_moderate_lattice(rng), 7.0, region):
            assert abs(th) <= 1 / eps + 1e-12
            assert 0 <= par < 2


def test_flow_grid_cardinality():
    for N in (16, 100, 10**4, 10**8):
        for delta in (0.1, 0.2, 0.9):
            bound = (1 - delta) * math.log(N)
            want = sum(1 for a in range(50) for b in range(50) if a + b < bound)
            assert len(flow_grid(N, delta)) == want


def test_flow_scan_matches_bruteforce(config2):
    for i in range(25):
        xi = sample_xi(config2, i)
        a = enumerate_resonant_set(xi, 10_000, "bruteforce", epsilon=0.5, delta=0.2)
        b = flow_scan(xi, 10_000, epsilon=0.5, delta=0.2)
        assert a.keys == b.keys
        for ta, tb in zip(a.terms, b.terms):
            assert np.allclose(np.array(ta.row(), float), np.array(tb.row(), float), rtol=0, atol=1e-9)
        assert b.meta["cells"] == len(flow_grid(10_000, 0.2))


def test_flow_scan_needs_d2():
    xi = SampleXi.simple([0.2], [0.3], [0.0])
    with pytest.raises(ArgumentError):
        flow_scan(xi, 1000, epsilon=0.5, delta=0.2)


def test_sl2_sampler_geometry():
    rng = np.random.default_rng(0)
    frames, _ = SL2HaarSampler().batch(rng, 100_000)
    assert np.max(np.abs(np.linalg.det(frames) - 1.0)) <= 1e-12
    # the first column is a shortest vector of the reduced basis
    shortest = np.min(np.linalg.norm(frames, axis=1), axis=1)
    assert np.all(shortest >= 1e-3)
    assert abs(sl2_haar_sample(rng).det() - 1.0) <= 1e-12


def test_sl2_first_moment():
    rep = rogers_mc(SL2HaarSampler(), BoxFunction((1.0, -0.5), (2.0, 0.5)), samples=100_000, seed=3)
    e = rep.quantities["E[F]"]
    assert e.prediction == pytest.approx(6 / math.pi**2, rel=1e-14)
    assert abs(e.z_score) <= 3


def test_rogers_predictions():
    sym = BoxFunction((-1.0, -1.0), (1.0, 1.0))
    rep = rogers_mc(SL2HaarSampler(), sym, samples=200, seed=1)
    c1, c2 = 1 / zeta(2), 1 / zeta(2) ** 2
    assert rep.quantities["E[F^2]"].prediction == pytest.approx(2 * c1 * 4 + c2 * 16)
    f1, f2 = BoxFunction((1.0, 0.0), (2.0, 1.0)), BoxFunction((-3.0, 2.0), (-2.0, 4.0))
    rep = rogers_mc(SL2HaarSampler(), f1, f2, samples=200, seed=1)
    assert rep.quantities["E[Fbar]"].prediction == pytest.approx(c2 * 1 * 2)
    with pytest.raises(ArgumentError):
        rogers_mc(SL2HaarSampler(), BoxFunction((0, 0, 0), (1, 1, 1)), samples=10)


def test_planar_pair_density():
    # the planar pair sum follows the determinant-lattice density
    f1, f2 = BoxFunction((0.5, 0.2), (1.5, 1.0)), BoxFunction((-1.0, -1.0), (1.0, 1.0))
    rep = rogers_mc(SL2HaarSampler(), f1, f2, samples=100_000, seed=9)
    e = rep.quantities["E[Fbar]"]
    assert abs(e.estimate - planar_pair_prediction(f1, f2)) <= 4 * e.stderr


def test_approx_sampler():
    rng = np.random.default_rng(4)
    for _ in range(50):
        L = approx_haar_sample(rng)
        assert abs(L.det() - 1.0) <= 1e-9
    box = BoxFunction((0.2, -0.6, -0.4), (1.2, 0.4, 0.6))
    s = ApproxHaarSampler()
    a = rogers_mc(s, box, samples=100_000, seed=1).quantities["E[F]"]
    b = rogers_mc(s, box, samples=100_000, seed=2).quantities["E[F]"]
    assert abs(a.estimate / (box.volume / zeta(3)) - 1) <= 0.05
    assert abs(a.estimate - b.estimate) <= 3 * math.hypot(a.stderr, b.stderr)


def test_multiplicity_first_moment():
    M, eps = 10, 1.0
    rep = multiple_solution_stats(ApproxHaarSampler(), RegionSpec.standard(M, eps), M, samples=200_000, seed=4)
    e = rep.quantities["E[Phi]"]
    assert e.prediction == pytest.approx(4 / (eps * zeta(3) * M**2), rel=1e-12)
    assert abs(e.z_score) <= 3
    assert rep.quantities["E[Phi^2-Phi]"].estimate >= 0


def test_multiplicity_empty_region():
    rep = multiple_solution_stats(ApproxHaarSampler(), RegionSpec(kappa=0.0), 10, samples=1000)
    assert all(q.estimate == 0 for q in rep.quantities.values())


def test_lattice_csv_roundtrip():
    L = UnimodularLattice(HAND, np.array([2.0, 0.5, 1.0]))
    back = lattice_from_csv(L.to_csv())
    assert np.allclose(back.basis, L.basis, rtol=1e-15)
