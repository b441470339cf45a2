"""Distributional targets and hypothesis tests.

The limit laws are Cauchy (one-dimensional, no moments) and Poisson (counts of
a point process), so the tests are Kolmogorov-Smirnov distances, a pooled
chi-square on count histograms, quantile-based scale fits and permutation
tests for independence of marks.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats as sps
from scipy.special import zeta

from .errors import ArgumentError, DegenerateTestError

KS_ALPHA = 0.01
PERMUTATIONS = 200
DCOV_MAX_POINTS = 1000
_INDEP_BINS = 4


class EmpiricalDistribution:
    """Sorted sample with CDF, quantile and export helpers."""

    def __init__(self, samples: Sequence[float]):
        a = np.sort(np.asarray(samples, dtype=float).ravel())
        if np.any(np.isnan(a)):
            raise ArgumentError("samples contain NaN")
        self.samples = a

    @property
    def n(self) -> int:
        return len(self.samples)

    def cdf(self, z):
        return np.searchsorted(self.samples, z, side="right") / self.n

    def quantile(self, q):
        if self.n == 0:
            raise ArgumentError("empty distribution")
        return np.quantile(self.samples, q)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value", "ecdf"])
        for i, v in enumerate(self.samples):
            w.writerow([repr(float(v)), repr((i + 1) / self.n)])
        return buf.getvalue()


def cauchy_cdf(z):
    """Standard Cauchy CDF ``arctan(z)/pi + 1/2``."""
    return np.arctan(z) / np.pi + 0.5


def rho_constant(d: int) -> float:
    """Scale of the limiting Cauchy law, ``(1/d!) (2/pi)^(2d+2)``."""
    if d < 1:
        raise ArgumentError("d must be >= 1")
    return (2.0 / math.pi) ** (2 * d + 2) / math.factorial(d)


def rho_reconstruction(d: int, mean_abs_gamma: float | None = None) -> float:
    """Scale obtained from the Poisson-to-Cauchy reduction.

    ``(1/pi^d) (2^d c_1 / d!) E|Gamma|`` with ``c_1 = 1/zeta(d+1)``; by default
    ``E|Gamma|`` takes the quoted value ``zeta(d+1) (2/pi)^(d+2)``.
    """
    c1 = 1.0 / float(zeta(d + 1))
    g = float(zeta(d + 1)) * (2.0 / math.pi) ** (d + 2) if mean_abs_gamma is None else mean_abs_gamma
    return (2.0**d * c1 / math.factorial(d)) * g / math.pi**d


def ks_statistic(emp: EmpiricalDistribution, cdf: Callable) -> float:
    """Two-sided Kolmogorov-Smirnov distance ``sup |F_n - F|``."""
    n = emp.n
    if n < 1:
        raise ArgumentError("need at least one sample")
    F = np.asarray(cdf(emp.samples), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_two_sample(a: EmpiricalDistribution, b: EmpiricalDistribution) -> float:
    return float(sps.ks_2samp(a.samples, b.samples).statistic)


def cauchy_scale_fit(emp: EmpiricalDistribution) -> float:
    """Half the interquartile range (the scale for a centered Cauchy law)."""
    if emp.n < 100:
        raise ArgumentError(f"scale fit needs n >= 100, got {emp.n}")
    q1, q3 = emp.quantile([0.25, 0.75])
    return float(q3 - q1) / 2.0


def poisson_intensity(d: int, epsilon: float, delta: float) -> float:
    """Expected number of resonant points per sample, ``2^(d-1)(1-delta)^d c_1/d! * 2/eps``."""
    c1 = 1.0 / float(zeta(d + 1))
    return 2.0 ** (d - 1) * (1.0 - delta) ** d * c1 / math.factorial(d) * (2.0 / epsilon)


@dataclass
class PoissonTestReport:
    bin_counts: dict[int, int]
    mean_hat: float
    var_hat: float
    chi_sq: float
    dof: int
    p_value: float
    intensity_prediction: float
    pooled_bins: list[list[int]] = field(default_factory=list)

    @property
    def dispersion(self) -> float:
        return self.mean_hat / self.var_hat if self.var_hat > 0 else math.inf

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bin_counts"] = {str(k): v for k, v in self.bin_counts.items()}
        d["dispersion"] = self.dispersion
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def poisson_count_test(counts: Sequence[int], predicted_mean: float, min_expected: float = 5.0) -> PoissonTestReport:
    """Chi-square test of per-sample counts against ``Poisson(predicted_mean)``.

    Adjacent count values are pooled until each bin expects at least
    ``min_expected`` observations; the last bin is the upper tail.

    Raises:
        DegenerateTestError: fewer than two bins survive pooling.
    """
    if not predicted_mean > 0:
        raise ArgumentError("predicted mean must be positive")
    c = np.asarray(counts, dtype=np.int64)
    n = len(c)
    if n == 0:
        raise DegenerateTestError("no samples")
    top = int(max(c.max(), sps.poisson.ppf(1 - 1e-12, predicted_mean))) + 1
    observed = np.bincount(c, minlength=top + 1)[: top + 1].astype(float)
    observed[top] += np.sum(c > top)
    probs = sps.poisson.pmf(np.arange(top + 1), predicted_mean)
    probs[top] = sps.poisson.sf(top - 1, predicted_mean)
    expected = n * probs
    bins: list[list[int]] = []
    cur: list[int] = []
    acc = 0.0
    for v in range(top + 1):
        cur.append(v)
        acc += expected[v]
        if acc >= min_expected:
            bins.append(cur)
            cur, acc = [], 0.0
    if cur:
        if bins:
            bins[-1].extend(cur)
        else:
            bins.append(cur)
    if len(bins) < 2:
        raise DegenerateTestError(f"only {len(bins)} bin(s) with expectation >= {min_expected}")
    obs = np.array([observed[b].sum() for b in bins])
    exp = np.array([expected[b].sum() for b in bins])
    chi = float(np.sum((obs - exp) ** 2 / exp))
    dof = len(bins) - 1
    return PoissonTestReport(
        bin_counts={int(k): int(v) for k, v in zip(*np.unique(c, return_counts=True))},
        mean_hat=float(c.mean()),
        var_hat=float(c.var(ddof=1)) if n > 1 else 0.0,
        chi_sq=chi,
        dof=dof,
        p_value=float(sps.chi2.sf(chi, dof)),
        intensity_prediction=float(predicted_mean),
        pooled_bins=bins,
    )


def _dcov_stat(x: np.ndarray, y: np.ndarray) -> float:
    def centered(a):
        D = np.abs(a[:, None] - a[None, :])
        return D - D.mean(axis=0)[None, :] - D.mean(axis=1)[:, None] + D.mean()

    A, B = centered(x), centered(y)
    return float(np.sqrt(max((A * B).mean(), 0.0)))


def _contingency_stat(x: np.ndarray, y_bins: np.ndarray, qx: np.ndarray) -> float:
    xb = np.searchsorted(qx, x, side="right")
    table = np.zeros((_INDEP_BINS, _INDEP_BINS))
    np.add.at(table, (xb, y_bins), 1.0)
    exp = table.sum(1)[:, None] * table.sum(0)[None, :] / table.sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        return float(np.nansum(np.where(exp > 0, (table - exp) ** 2 / exp, 0.0)))


def _quantile_bins(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q = np.quantile(a, np.linspace(0, 1, _INDEP_BINS + 1)[1:-1])
    return np.searchsorted(q, a, side="right"), q


def permutation_pvalue(x: np.ndarray, y: np.ndarray, rng: np.random.Generator,
                       permutations: int = PERMUTATIONS) -> tuple[float, float]:
    """Permutation test of independence using a binned chi-square statistic.

    Returns:
        ``(statistic, p_value)`` with the ``(1 + #{perm >= obs}) / (1 + perms)`` convention.
    """
    _, qx = _quantile_bins(x)
    yb, _ = _quantile_bins(y)
    obs = _contingency_stat(x, yb, qx)
    hits = 0
    for _ in range(permutations):
        if _contingency_stat(rng.permutation(x), yb, qx) >= obs:
            hits += 1
    return obs, (1 + hits) / (1 + permutations)


def uniformity_and_independence(theta: Sequence[float], marks: np.ndarray,
                                ranges: Sequence[float] | None = None, seed: int = 0,
                                permutations: int = PERMUTATIONS) -> dict:
    """KS uniformity per mark coordinate and independence screens.

    Args:
        theta: pooled normalized denominators ``Theta`` (one per point).
        marks: ``(n, m)`` pooled marks; coordinate ``j`` is tested against
            ``Uniform[0, ranges[j])``.
        ranges: upper ends of the mark ranges (default 1 for every coordinate).
        seed: seed of the permutation stream.
        permutations: number of permutations per test.

    Returns:
        A JSON-ready dict with per-coordinate KS statistics and p-values, the
        ``|Theta|``-vs-mark permutation p-values, and pairwise distance
        covariances with their permutation p-values (on at most 1000 points).
    """
    theta = np.asarray(theta, dtype=float)
    marks = np.asarray(marks, dtype=float)
    if marks.ndim != 2 or len(marks) != len(theta):
        raise ArgumentError("marks must be (n, m) aligned with theta")
    n, m = marks.shape
    if n < 100:
        raise ArgumentError(f"need at least 100 pooled marks, got {n}")
    ranges = [1.0] * m if ranges is None else list(ranges)
    rng = np.random.default_rng(seed)
    ks = []
    for j in range(m):
        r = sps.kstest(marks[:, j] / ranges[j], "uniform")
        ks.append({"statistic": float(r.statistic), "p_value": float(r.pvalue),
                   "reject": bool(r.pvalue < KS_ALPHA)})
    perm = []
    abs_theta = np.abs(theta)
    for j in range(m):
        stat, p = permutation_pvalue(abs_theta, marks[:, j], rng, permutations)
        perm.append({"statistic": stat, "p_value": p, "reject": bool(p < KS_ALPHA)})
    sub = rng.choice(n, size=min(n, DCOV_MAX_POINTS), replace=False)
    cols = np.column_stack([abs_theta, marks])[sub]
    dcov = []
    for a in range(cols.shape[1]):
        for b in range(a + 1, cols.shape[1]):
            obs = _dcov_stat(cols[:, a], cols[:, b])
            hits = sum(_dcov_stat(rng.permutation(cols[:, a]), cols[:, b]) >= obs
                       for _ in range(min(permutations, 50)))
            p = (1 + hits) / (1 + min(permutations, 50))
            dcov.append({"pair": [a, b], "dcov": obs, "p_value": p})
    return {"n": n, "ks": ks, "theta_permutation": perm, "dcov": dcov,
            "all_uniform": not any(k["reject"] for k in ks),
            "all_independent": not any(p["reject"] for p in perm)}
