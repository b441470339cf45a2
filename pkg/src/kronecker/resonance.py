"""Fourier decomposition of the box discrepancy and its small-denominator part.

The discrepancy of the box ``M C_u`` expands as ``sum_k U_k`` over nonzero
integer frequencies.  Only frequencies with an abnormally small denominator
``||(k, alpha)||`` matter in the limit; they form a sparse point process
``(Theta_k, marks)`` and the discrepancy is reconstructed from it as
``(ln N)^d (2/pi^(d+1)) sum Gamma_k / Theta_k``.

Convention for the dual frequency: the Fourier coefficient of the indicator
of ``M C_u`` at ``k`` depends on ``M^T k``.  All functions here therefore feed
``dual_frequency`` with the transposed shear (see ``frequency_matrix``), so that
``sum_k U_k`` reproduces the direct visit count of the same box.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.special import bernoulli, comb, zeta

from .errors import (
    ArgumentError,
    ResonantSingularityError,
    ResourceError,
    SingularTermError,
)
from .params import SampleXi, ShearMatrix, dual_frequency, exact_pairing

STAGES = ("D1", "D2", "D3", "D4", "D5")
SINGULAR_TOL = 1e-14
DIAGNOSTIC_MAX_N = 100_000
BRUTEFORCE_MAX_N = 10_000
_MAX_TERMS = 200_000_000
_CHUNK_ELEMS = 1 << 22


def frequency_matrix(xi: SampleXi) -> ShearMatrix:
    """Matrix whose ``dual_frequency`` gives the box's Fourier frequencies (``M^T``)."""
    return ShearMatrix(xi.shear.entries.T)


def log_power(N: int, d: int) -> float:
    return math.log(N) ** d


def resonance_threshold(N: int, d: int, epsilon: float) -> float:
    """Bound on ``|prod kbar| * ||(k, alpha)||`` defining a small denominator."""
    return 1.0 / (epsilon * log_power(N, d))


# ----------------------------------------------------------------------------
# double-double pairings


def _two_prod(a, b):
    p = a * b
    s = 134217729.0
    ah = a * s
    ah = ah - (ah - a)
    al = a - ah
    bh = b * s
    bh = bh - (bh - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def frac_pairing(K: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Fractional part of ``(k, v)`` per row of ``K``, accurate to ~1e-16 absolute.

    ``K`` holds integers below 2**53; the products and sums are carried in
    double-double so the result does not lose digits to the integer part.
    """
    K = np.asarray(K, dtype=float)
    hi = np.zeros(K.shape[:-1])
    lo = np.zeros(K.shape[:-1])
    for j in range(K.shape[-1]):
        p, pe = _two_prod(K[..., j], float(v[j]))
        hi, se = _two_sum(hi, p)
        lo = lo + pe + se
    n = np.round(hi)
    return ((hi - n) + lo) % 1.0


def signed_distance_dd(K: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Vectorized signed distance of ``(k, alpha)`` to the nearest integer."""
    f = frac_pairing(K, alpha)
    return np.where(f > 0.5, f - 1.0, f)


def _side_factor(kbar: np.ndarray, u: np.ndarray) -> np.ndarray:
    # sin(2 pi kbar u) / kbar with the kbar -> 0 limit 2 pi u
    safe = np.where(kbar == 0.0, 1.0, kbar)
    val = np.sin(2.0 * np.pi * kbar * u) / safe
    return np.where(kbar == 0.0, 2.0 * np.pi * u, val)


def _dirichlet(N: int, theta: np.ndarray) -> np.ndarray:
    # sin(pi N theta)/sin(pi theta) for theta in (-1/2, 1/2]
    small = np.abs(theta) < 1e-300
    th = np.where(small, 1.0, theta)
    val = np.sin(np.pi * N * th) / np.sin(np.pi * th)
    return np.where(small, float(N), val)


def _fourier_terms(xi: SampleXi, N: int, K: np.ndarray) -> np.ndarray:
    d = xi.d
    kbar = dual_frequency(frequency_matrix(xi), K)
    theta = signed_distance_dd(K, xi.alpha)
    kx = frac_pairing(K, xi.x)
    side = np.prod(_side_factor(kbar, xi.u[None, :]), axis=1)
    phase = 2.0 * np.pi * kx + np.pi * (N + 1) * theta
    return side * _dirichlet(N, theta) * np.cos(phase) / np.pi**d


def fourier_term(xi: SampleXi, N: int, k: Sequence[int]) -> float:
    """Fourier term ``U_k`` of the discrepancy at frequency ``k``.

    Uses the signed distance ``theta`` of ``(k, alpha)`` in the Dirichlet
    factor, so the value is independent of the lift of ``alpha`` and keeps
    full relative accuracy near resonance.

    Args:
        xi: parameter tuple.
        N: orbit length.
        k: nonzero integer frequency.

    Returns:
        The real term; summing it over all nonzero ``k`` gives the discrepancy.

    Raises:
        ResonantSingularityError: if ``(k, alpha)`` lies within 1e-14 of an integer.
    """
    k = np.asarray(k, dtype=np.int64).reshape(1, -1)
    if k.shape[1] != xi.d or not np.any(k):
        raise ArgumentError("frequency must be a nonzero vector of length d")
    theta = float(signed_distance_dd(k, xi.alpha)[0])
    if abs(theta) < SINGULAR_TOL:
        raise ResonantSingularityError(f"(k, alpha) is an integer to 1e-14 for k = {k[0].tolist()}")
    return float(_fourier_terms(xi, int(N), k)[0])


# ----------------------------------------------------------------------------
# frequency sets


def _cube(d: int, R: int) -> np.ndarray:
    axes = [np.arange(-R, R + 1)] * d
    K = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    return K[np.any(K != 0, axis=1)]


def _hyperbolic_candidates(A: np.ndarray, bound: float):
    """Yield chunks of ``k`` with ``|kbar_i| >= 1`` and ``prod |kbar_i| <= bound``.

    ``kbar = A k``.  Every such ``k`` has ``|kbar|_inf <= bound`` and hence
    ``|k|_inf <= ||A^-1||_inf * bound``; the box is scanned in slabs of ``k_1``.
    """
    d = A.shape[0]
    R = int(math.ceil(np.abs(np.linalg.inv(A)).sum(axis=1).max() * bound * (1 + 1e-12)))
    if (2 * R + 1) ** d > 50 * _MAX_TERMS:
        raise ResourceError(f"hyperbolic scan over |k| <= {R} in dimension {d} is too large")
    rest = _cube(d - 1, R) if d > 1 else np.zeros((1, 0), dtype=np.int64)
    if d > 1:
        rest = np.vstack([np.zeros((1, d - 1), dtype=np.int64), rest])
    step = max(1, _CHUNK_ELEMS // max(len(rest), 1))
    for k1 in range(-R, R + 1, step):
        k1s = np.arange(k1, min(k1 + step, R + 1))
        K = np.column_stack([np.repeat(k1s, len(rest)), np.tile(rest, (len(k1s), 1))]).astype(np.int64)
        kbar = K.astype(float) @ A.T
        ab = np.abs(kbar)
        keep = np.all(ab >= 1.0, axis=1) & (np.prod(ab, axis=1) <= bound)
        if np.any(keep):
            yield K[keep], kbar[keep]


def stage_frequencies(xi: SampleXi, N: int, stage: str, epsilon: float | None = None,
                      delta: float | None = None) -> np.ndarray:
    """Integer frequencies entering the truncated sum of the given stage.

    Args:
        xi: parameter tuple.
        N: orbit length (``>= 16``).
        stage: one of ``D1`` (cube ``|k_i| <= N``), ``D2`` (also ``|kbar_i| >= 1``),
            ``D3`` (``prod |kbar_i| <= N`` instead of the cube), ``D4`` (also small
            denominator) and ``D5`` (also ``prod |kbar_i| < N^(1-delta)``).
        epsilon: resonance cutoff, required for D4 and D5.
        delta: exponent margin, required for D5.

    Returns:
        ``(n, d)`` integer array, rows in lexicographic order.
    """
    N = int(N)
    if stage not in STAGES:
        raise ArgumentError(f"unknown stage {stage!r}, expected one of {STAGES}")
    if N < 16:
        raise ArgumentError(f"N = {N} must be >= 16")
    if stage in ("D1", "D2", "D3") and N > DIAGNOSTIC_MAX_N:
        raise ResourceError(f"stage {stage} at N = {N} exceeds the diagnostic bound {DIAGNOSTIC_MAX_N}")
    if stage in ("D4", "D5") and epsilon is None:
        raise ArgumentError(f"stage {stage} needs epsilon")
    if stage == "D5" and delta is None:
        raise ArgumentError("stage D5 needs delta")
    d = xi.d
    A = frequency_matrix(xi).entries
    if stage in ("D1", "D2"):
        if (2 * N + 1) ** d > _MAX_TERMS:
            raise ResourceError(f"cube of side {2 * N + 1} in dimension {d} is too large")
        K = _cube(d, N)
        if stage == "D2":
            kbar = K.astype(float) @ A.T
            K = K[np.all(np.abs(kbar) >= 1.0, axis=1)]
        return K
    out = []
    for K, kbar in _hyperbolic_candidates(A, float(N)):
        prod = np.abs(np.prod(kbar, axis=1))
        keep = np.ones(len(K), dtype=bool)
        if stage in ("D4", "D5"):
            theta = np.abs(signed_distance_dd(K, xi.alpha))
            keep &= prod * theta <= resonance_threshold(N, d, epsilon)
        if stage == "D5":
            keep &= prod < float(N) ** (1.0 - delta)
        out.append(K[keep])
    K = np.vstack(out) if out else np.zeros((0, d), dtype=np.int64)
    return K[np.lexsort(K.T[::-1])] if len(K) else K


def truncated_sum(xi: SampleXi, N: int, stage: str, epsilon: float | None = None,
                  delta: float | None = None) -> float:
    """Partial Fourier sum of the discrepancy over one truncation stage.

    Args:
        xi: parameter tuple.
        N: orbit length, at most 1e5 for stages D1 to D3.
        stage: ``D1`` .. ``D5`` (see ``stage_frequencies``).
        epsilon: resonance cutoff for D4 and D5.
        delta: exponent margin for D5.

    Returns:
        The sum of ``U_k`` over the stage's index set.
    """
    K = stage_frequencies(xi, N, stage, epsilon, delta)
    total = 0.0
    for start in range(0, len(K), _CHUNK_ELEMS):
        total += float(np.sum(_fourier_terms(xi, int(N), K[start:start + _CHUNK_ELEMS])))
    return total


# ----------------------------------------------------------------------------
# the numerator series


def _bernoulli_poly(n: int, y: np.ndarray) -> np.ndarray:
    B = bernoulli(n)
    coeffs = [comb(n, j, exact=True) * B[j] for j in range(n + 1)]  # coefficient of y^(n-j)
    return np.polyval(coeffs, y)


def _clausen_series(n: int, y: np.ndarray) -> np.ndarray:
    """``sum_j cos(2 pi j y)/j^n`` (n even) or ``sum_j sin(2 pi j y)/j^n`` (n odd)."""
    f = np.mod(y, 1.0)
    scale = (2.0 * np.pi) ** n / (2.0 * math.factorial(n))
    sign = (-1.0) ** (n // 2 + 1) if n % 2 == 0 else (-1.0) ** ((n + 1) // 2)
    return sign * scale * _bernoulli_poly(n, f)


def phi_closed_form(side, parity, phase) -> np.ndarray:
    """Vectorized ``phi`` for marks ``side`` (``(..., d)``), ``parity`` and ``phase``.

    ``phi = sum_j prod_i sin(2 pi j s_i) sin(pi j w) cos(2 pi j p) / j^(d+1)``.
    Expanding the product into single exponentials reduces the series to
    ``2^(d+2)`` Bernoulli-polynomial evaluations, which is exact up to rounding.
    """
    side = np.asarray(side, dtype=float)
    parity = np.asarray(parity, dtype=float)
    phase = np.asarray(phase, dtype=float)
    d = side.shape[-1]
    n = d + 1
    ys = np.concatenate(
        [side, (parity / 2.0)[..., None], phase[..., None]], axis=-1
    )
    total = np.zeros(ys.shape[:-1])
    for signs in np.ndindex(*(2,) * (d + 2)):
        s = 1.0 - 2.0 * np.asarray(signs, dtype=float)
        sigma = np.prod(s[: d + 1])
        total = total + sigma * _clausen_series(n, ys @ s)
    # product of d+1 sines and a cosine: 1/(2^(d+2) i^(d+1)) times the sign sum
    unit = (-1.0) ** (d // 2) if d % 2 == 0 else (-1.0) ** ((d + 1) // 2)
    return total / (2.0 ** (d + 2) * unit)


def phi_series(eta: Sequence[float], tolerance: float = 1e-10) -> float:
    """The numerator series ``phi`` at ``eta = (s_1, .., s_d, w, p)``.

    Args:
        eta: ``d + 2`` reals; the side marks and phase are read mod 1 and the
            parity mark mod 2.
        tolerance: requested absolute accuracy.  The closed-form evaluation is
            exact up to rounding, so any positive value is met.

    Returns:
        ``sum_{j>=1} prod_i sin(2 pi j s_i) * sin(pi j w) * cos(2 pi j p) / j^(d+1)``.
    """
    if not tolerance > 0:
        raise ArgumentError("tolerance must be positive")
    eta = np.asarray(eta, dtype=float)
    if eta.ndim != 1 or len(eta) < 3:
        raise ArgumentError("eta must hold d + 2 >= 3 values")
    return float(phi_closed_form(eta[:-2], eta[-2], eta[-1]))


def phi_partial_sum(eta: Sequence[float], J: int) -> float:
    """Direct summation of the first ``J`` terms of ``phi`` (slow reference)."""
    eta = np.asarray(eta, dtype=float)
    d = len(eta) - 2
    total = 0.0
    for start in range(1, J + 1, 1 << 20):
        j = np.arange(start, min(start + (1 << 20), J + 1), dtype=float)
        term = np.ones_like(j)
        for i in range(d):
            term *= np.sin(2 * np.pi * j * eta[i])
        term *= np.sin(np.pi * j * eta[d]) * np.cos(2 * np.pi * j * eta[d + 1])
        total += float(np.sum(term / j ** (d + 1)))
    return total


def mean_abs_gamma(d: int, samples: int, rng: np.random.Generator) -> tuple[float, float]:
    """Monte Carlo mean of ``|phi|`` over uniform marks, with its standard error."""
    acc = []
    block = 1 << 18
    for start in range(0, samples, block):
        n = min(block, samples - start)
        g = phi_closed_form(rng.random((n, d)), 2.0 * rng.random(n), rng.random(n))
        acc.append(np.abs(g))
    a = np.concatenate(acc)
    return float(a.mean()), float(a.std(ddof=1) / math.sqrt(len(a)))


def gamma_constant(d: int) -> float:
    """The constant ``zeta(d+1) (2/pi)^(d+2)`` quoted for the mean of ``|Gamma|``."""
    return float(zeta(d + 1)) * (2.0 / math.pi) ** (d + 2)


# ----------------------------------------------------------------------------
# resonant point process


@dataclass(frozen=True)
class ResonantTerm:
    """One small denominator with its normalized position and marks."""

    k: tuple[int, ...]
    m: int
    kbar: tuple[float, ...]
    theta: float
    Theta: float
    parity: float
    side_marks: tuple[float, ...]
    phase: float
    gamma: float

    def row(self) -> list:
        return [*self.k, *self.kbar, self.theta, self.Theta, self.parity,
                *self.side_marks, self.phase, self.gamma]


@dataclass
class PointProcessSample:
    terms: list[ResonantTerm]
    N: int
    epsilon: float
    delta: float
    log_nd: float
    d: int = 1
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = sorted(self.terms, key=lambda t: t.k)
        keys = [t.k for t in self.terms]
        if len(set(keys)) != len(keys):
            raise ArgumentError("duplicate frequencies in point-process sample")

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def keys(self) -> list[tuple[int, ...]]:
        return [t.k for t in self.terms]

    @property
    def Thetas(self) -> np.ndarray:
        return np.array([t.Theta for t in self.terms], dtype=float)

    @property
    def gammas(self) -> np.ndarray:
        return np.array([t.gamma for t in self.terms], dtype=float)

    def marks(self) -> np.ndarray:
        """``(n, d + 2)`` array: side marks, parity mark, phase mark."""
        if not self.terms:
            return np.zeros((0, self.d + 2))
        return np.array([[*t.side_marks, t.parity, t.phase] for t in self.terms])

    def csv_header(self) -> list[str]:
        d = self.d
        return ([f"k{i + 1}" for i in range(d)] + [f"kbar{i + 1}" for i in range(d)]
                + ["theta", "Theta", "parity"] + [f"side{i + 1}" for i in range(d)]
                + ["phase", "Gamma"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.csv_header())
        for t in self.terms:
            w.writerow([repr(v) if isinstance(v, float) else v for v in t.row()])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "N": self.N,
            "d": self.d,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "log_nd": self.log_nd,
            "count": len(self.terms),
            "frequencies": [list(k) for k in self.keys],
            "D7": resonant_discrepancy(self) if self.terms else 0.0,
            **self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)


def make_term(xi: SampleXi, N: int, k: Sequence[int], log_nd: float | None = None) -> ResonantTerm:
    """Build the fully populated resonant term of frequency ``k``.

    The distance ``theta``, the parity mark ``N theta mod 2`` and the phase
    mark ``{(k, x) + (N+1) theta / 2}`` are computed in exact rational
    arithmetic from the stored float lifts.
    """
    k = tuple(int(v) for v in k)
    N = int(N)
    d = xi.d
    if log_nd is None:
        log_nd = log_power(N, d)
    kbar = dual_frequency(frequency_matrix(xi), k)
    t = exact_pairing(k, xi.alpha)
    n = math.ceil(t - Fraction(1, 2))
    theta_q = t - n
    theta = float(theta_q)
    parity = float((N * theta_q) % 2)
    phase = float((exact_pairing(k, xi.x) + Fraction(N + 1, 2) * theta_q) % 1)
    side = np.mod(kbar * xi.u, 1.0)
    gamma = float(phi_closed_form(side, parity, phase))
    return ResonantTerm(
        k=k,
        m=-n,
        kbar=tuple(float(v) for v in kbar),
        theta=theta,
        Theta=float(log_nd * np.prod(kbar) * theta),
        parity=parity,
        side_marks=tuple(float(v) for v in side),
        phase=phase,
        gamma=gamma,
    )


def in_resonant_set(kbar: np.ndarray, theta: float, m: int, k: Sequence[int], N: int,
                    epsilon: float, delta: float) -> bool:
    """Exact membership test for the resonant set given a frequency's data."""
    d = len(kbar)
    if not kbar[0] > 0 or np.any(np.abs(kbar) < 1.0):
        return False
    prod = abs(float(np.prod(kbar)))
    if not prod < float(N) ** (1.0 - delta):
        return False
    if not prod * abs(theta) <= resonance_threshold(N, d, epsilon):
        return False
    return math.gcd(*(int(v) for v in k), int(m)) == 1


def _filter_exact(xi: SampleXi, N: int, K: Iterable, epsilon: float, delta: float) -> list[ResonantTerm]:
    A = frequency_matrix(xi)
    out = []
    log_nd = log_power(N, xi.d)
    for k in K:
        k = tuple(int(v) for v in k)
        kbar = dual_frequency(A, k)
        t = exact_pairing(k, xi.alpha)
        n = math.ceil(t - Fraction(1, 2))
        if in_resonant_set(kbar, float(t - n), -n, k, N, epsilon, delta):
            out.append(make_term(xi, N, k, log_nd))
    return out


def _bruteforce(xi: SampleXi, N: int, epsilon: float, delta: float) -> list[ResonantTerm]:
    d = xi.d
    A = frequency_matrix(xi).entries
    P = float(N) ** (1.0 - delta)
    thr = resonance_threshold(N, d, epsilon)
    cands = []
    for K, kbar in _hyperbolic_candidates(A, P):
        keep = kbar[:, 0] > 0
        theta = np.abs(signed_distance_dd(K[keep], xi.alpha))
        prod = np.abs(np.prod(kbar[keep], axis=1))
        # float prefilter with slack; the exact test decides
        near = prod * theta <= thr * (1 + 1e-9) + 1e-12
        cands.append(K[keep][near])
    if not cands:
        return []
    return _filter_exact(xi, N, np.vstack(cands), epsilon, delta)


def _continued_fraction_candidates(alpha: float, qmax: float) -> list[int]:
    """Denominators of all convergents and intermediate fractions of ``alpha`` below ``qmax``."""
    a = Fraction(alpha)
    qs = set()
    q_prev, q = 0, 1
    x = a
    first = True
    while True:
        ai = math.floor(x)
        if not first:
            for j in range(1, ai + 1):
                qn = q_prev + j * q
                if qn >= qmax:
                    break
                qs.add(qn)
            q_prev, q = q, q_prev + ai * q
            if q >= qmax:
                break
        first = False
        frac = x - ai
        if frac == 0:
            break
        x = 1 / frac
    qs.add(1)
    return sorted(v for v in qs if v < qmax)


def _continued_fraction_set(xi: SampleXi, N: int, epsilon: float, delta: float) -> list[ResonantTerm]:
    # d = 1: k ||k alpha|| <= c < 1 forces k/.. to be a convergent or an
    # intermediate fraction of alpha, so those denominators are a complete list.
    c = resonance_threshold(N, 1, epsilon)
    if c >= 1.0:
        raise ArgumentError(
            f"continued-fraction enumeration needs 1/(epsilon ln N) < 1, got {c:.3f}; use bruteforce"
        )
    P = float(N) ** (1.0 - delta)
    sign = 1 if xi.shear.entries[0, 0] > 0 else -1
    ks = [[sign * q] for q in _continued_fraction_candidates(float(xi.alpha[0]), P / abs(xi.shear.entries[0, 0]) + 1)]
    return _filter_exact(xi, N, ks, epsilon, delta)


def enumerate_resonant_set(xi: SampleXi, N: int, mode: str = "bruteforce", *, epsilon: float,
                           delta: float) -> PointProcessSample:
    """All small denominators of ``xi`` at time ``N`` with their marks.

    Args:
        xi: parameter tuple.
        N: orbit length.
        mode: ``bruteforce`` (scan of the hyperbolic cross, ``N <= 1e4``) or
            ``latticeflow`` (Cartan-flow scan for d = 2, continued fractions for d = 1).
        epsilon: resonance cutoff.
        delta: exponent margin.

    Returns:
        The point-process sample, terms sorted by frequency.
    """
    N = int(N)
    if N < 16:
        raise ArgumentError(f"N = {N} must be >= 16")
    if mode == "bruteforce":
        if N > BRUTEFORCE_MAX_N:
            raise ResourceError(f"bruteforce enumeration needs N <= {BRUTEFORCE_MAX_N}, got {N}")
        terms = _bruteforce(xi, N, epsilon, delta)
    elif mode == "latticeflow":
        if xi.d == 1:
            terms = _continued_fraction_set(xi, N, epsilon, delta)
        elif xi.d == 2:
            from .lattice import flow_scan

            return flow_scan(xi, N, epsilon=epsilon, delta=delta)
        else:
            raise ArgumentError("latticeflow enumeration is available for d <= 2")
    else:
        raise ArgumentError(f"unknown enumeration mode {mode!r}")
    return PointProcessSample(terms=terms, N=N, epsilon=epsilon, delta=delta,
                              log_nd=log_power(N, xi.d), d=xi.d)


def resonant_discrepancy(sample: PointProcessSample) -> float:
    """Reconstructed discrepancy ``(ln N)^d (2/pi^(d+1)) sum Gamma_k / Theta_k``."""
    if not sample.terms:
        return 0.0
    d = sample.d
    total = 0.0
    for t in sample.terms:
        if t.Theta == 0.0:
            raise SingularTermError(f"Theta vanishes for k = {list(t.k)}")
        total += t.gamma / t.Theta
    return sample.log_nd * 2.0 / math.pi ** (d + 1) * total


def check_splitness(sample: PointProcessSample, A: float) -> bool:
    """Whether the log-scales ``t_i = ln |kbar_i|`` of the terms are ``A``-split.

    Every coordinate must exceed ``A`` and any two terms must differ by at
    least ``A`` in each coordinate and in the coordinate maximum.
    """
    if sample.d != 2:
        raise ArgumentError("splitness is defined for d = 2")
    if not sample.terms:
        return True
    t = np.log(np.abs(np.array([term.kbar for term in sample.terms])))
    if np.any(t <= A):
        return False
    mx = t.max(axis=1)
    for i in range(len(t)):
        for j in range(i + 1, len(t)):
            if (abs(t[i, 0] - t[j, 0]) < A or abs(t[i, 1] - t[j, 1]) < A
                    or abs(mx[i] - mx[j]) < A):
                return False
    return True
