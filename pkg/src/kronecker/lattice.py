"""Unimodular lattices, the Cartan flow and lattice-point statistics.

Lattices are stored in factored form ``basis = diag(scales) @ frame``.  The
Cartan flow only touches ``scales``, and lattice vectors are recomputed from
integer coordinates with compensated arithmetic (see ``_kernels``), so strongly
pushed lattices ``g_t Lambda(xi)`` keep full relative accuracy in every
coordinate.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import zeta

from . import _kernels
from .errors import ArgumentError, ConditioningError, ConsistencyError, ResourceError, SamplingError
from .parallel import parallel_map
from .params import SampleXi, derive_rng, exact_pairing
from .resonance import (
    PointProcessSample,
    frequency_matrix,
    in_resonant_set,
    log_power,
    make_term,
)

LLL_MAX_ITER = 100_000
MAX_CANDIDATES = 5e6
BOUNDARY_PAD = 1e-9
_SL2_MAX_TRIES = 1_000_000
_BATCH = 20_000
_OUT_CAP = 1 << 16


@dataclass(frozen=True)
class UnimodularLattice:
    """Lattice spanned by the columns of ``diag(scales) @ frame``."""

    frame: np.ndarray
    scales: np.ndarray = None

    def __post_init__(self):
        f = np.array(self.frame, dtype=float)
        if f.ndim != 2 or f.shape[0] != f.shape[1]:
            raise ArgumentError(f"basis must be square, got shape {f.shape}")
        s = np.ones(f.shape[0]) if self.scales is None else np.array(self.scales, dtype=float)
        if s.shape != (f.shape[0],) or np.any(s <= 0):
            raise ArgumentError("scales must be positive, one per coordinate")
        f.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "frame", f)
        object.__setattr__(self, "scales", s)
        if abs(self.det() - 1.0) > 1e-9:
            raise ArgumentError(f"basis is not unimodular: det = {self.det()!r}")

    @property
    def dim(self) -> int:
        return self.frame.shape[0]

    @property
    def basis(self) -> np.ndarray:
        return self.scales[:, None] * self.frame

    def det(self) -> float:
        sign, logdet = np.linalg.slogdet(self.frame)
        return float(sign * math.exp(logdet + float(np.sum(np.log(self.scales)))))

    def vector(self, c: Sequence[int]) -> np.ndarray:
        """Lattice vector with integer coordinates ``c`` in this basis."""
        out = np.empty(self.dim)
        _kernels.lattice_vector(self.frame, self.scales, np.asarray(c, dtype=np.int64), out)
        return out

    def to_csv(self) -> str:
        return "".join(",".join(f"{v:.16g}" for v in row) + "\n" for row in self.basis)


@dataclass(frozen=True)
class FlowTime:
    t: tuple[float, ...]

    def __post_init__(self):
        t = tuple(float(v) for v in np.atleast_1d(self.t))
        if any(v < 0 for v in t):
            raise ArgumentError(f"flow times must be nonnegative, got {t}")
        object.__setattr__(self, "t", t)

    def in_grid(self, N: int, delta: float) -> bool:
        return sum(self.t) < (1.0 - delta) * math.floor(math.log(N))


@dataclass(frozen=True)
class RegionSpec:
    """Cusp region ``x in (x_lo, x_hi]``, ``|y| in (y_lo, y_hi]``, ``|x y z| <= kappa``."""

    kappa: float
    M: float = 1.0
    x_lo: float = 1.0
    x_hi: float = math.e
    y_lo: float = 1.0
    y_hi: float = math.e

    def __post_init__(self):
        if self.kappa < 0 or not 0 < self.x_lo < self.x_hi or not 0 < self.y_lo < self.y_hi:
            raise ArgumentError("region needs kappa >= 0 and 0 < lo < hi on both axes")

    @classmethod
    def standard(cls, M: float, epsilon: float) -> "RegionSpec":
        """``I = (1, e]``, ``J = [-e,-1) u (1,e]``, ``K = [-1/(eps M^2), 1/(eps M^2)]``."""
        return cls(kappa=1.0 / (epsilon * M * M), M=float(M))

    @property
    def half_widths(self) -> np.ndarray:
        # |xy| > x_lo y_lo on the region forces |z| <= kappa / (x_lo y_lo)
        return np.array([self.x_hi, self.y_hi, self.kappa / (self.x_lo * self.y_lo)])

    @property
    def measure(self) -> float:
        return 4.0 * self.kappa * math.log(self.x_hi / self.x_lo) * math.log(self.y_hi / self.y_lo)

    def contains(self, v: np.ndarray) -> np.ndarray:
        x, y, z = v[..., 0], v[..., 1], v[..., 2]
        ay = np.abs(y)
        return ((x > self.x_lo) & (x <= self.x_hi) & (ay > self.y_lo) & (ay <= self.y_hi)
                & (np.abs(x * y * z) <= self.kappa))


def lambda_matrix(xi: SampleXi) -> UnimodularLattice:
    """Block lower-triangular lattice with the shear on top and ``alpha`` in the last row."""
    d = xi.d
    B = np.zeros((d + 1, d + 1))
    B[:d, :d] = xi.shear.entries
    B[d, :d] = xi.alpha
    B[d, d] = 1.0
    return UnimodularLattice(B)


def cartan_flow(t: FlowTime | Sequence[float], L: UnimodularLattice) -> UnimodularLattice:
    """Apply ``diag(e^-t_1, .., e^-t_d, e^(t_1+..+t_d))`` on the left."""
    t = t if isinstance(t, FlowTime) else FlowTime(tuple(t))
    tv = np.array(t.t)
    if len(tv) != L.dim - 1:
        raise ArgumentError(f"flow time has {len(tv)} entries, lattice dimension is {L.dim}")
    g = np.exp(np.append(-tv, tv.sum()))
    return UnimodularLattice(L.frame, L.scales * g)


def _primitive(C: np.ndarray) -> np.ndarray:
    return np.gcd.reduce(np.abs(C), axis=1) == 1


def _raise_for(kind: int, where: str, cap: int) -> None:
    if kind == _kernels.FAIL_REDUCE:
        raise ConditioningError(f"lattice reduction failed for {where}")
    if kind == _kernels.FAIL_BUDGET:
        raise ResourceError(f"enumeration box for {where} exceeds the candidate budget")
    if cap > 1 << 26:
        raise ResourceError(f"enumeration for {where} produced too many vectors")


def _box_points(frames: np.ndarray, scales: np.ndarray, half: np.ndarray):
    """All nonzero lattice points with ``|v_i| <= half_i`` for a batch of lattices."""
    S, n = frames.shape[0], frames.shape[1]
    sc = scales / half[None, :]
    cap = max(_OUT_CAP, 8 * S)
    while True:
        out_c = np.empty((cap, n), dtype=np.int64)
        out_v = np.empty((cap, n))
        out_s = np.empty(cap, dtype=np.int64)
        fill, where, kind = _kernels.box_points_batch(frames, sc, out_c, out_v, out_s,
                                                       LLL_MAX_ITER, MAX_CANDIDATES)
        if kind == _kernels.OK:
            break
        _raise_for(kind, f"sample {where} of the batch", cap)
        cap *= 4
    return out_c[:fill], out_v[:fill] * half[None, :], out_s[:fill]


def count_region_vectors(L: UnimodularLattice, region: RegionSpec):
    """Primitive vectors of ``L`` in the cusp region (one per +- pair, ``x > 0``).

    Returns:
        ``(count, vectors)`` with ``vectors`` an ``(n, 3)`` array, sorted.
    """
    if L.dim != 3:
        raise ArgumentError("the cusp region is defined for three-dimensional lattices")
    if region.kappa == 0:
        return 0, np.zeros((0, 3))
    C, V, _ = _box_points(L.frame[None], L.scales[None], region.half_widths)
    keep = region.contains(V) & _primitive(C)
    V = V[keep]
    V = V[np.lexsort(V.T[::-1])]
    return len(V), V


def psi_marks(L: UnimodularLattice, b: float, region: RegionSpec) -> list[tuple[float, float]]:
    """``(M^2 x y z, b z mod 2)`` for every vector counted in the region."""
    _, V = count_region_vectors(L, region)
    return [(float(region.M**2 * v[0] * v[1] * v[2]), float((b * v[2]) % 2.0)) for v in V]


def flow_grid(N: int, delta: float) -> np.ndarray:
    """Integer flow times ``t >= 0`` with ``t_1 + t_2 < (1 - delta) ln N``."""
    bound = (1.0 - delta) * math.log(N)
    cells = [(a, b) for a in range(int(bound) + 1) for b in range(int(bound) + 1) if a + b < bound]
    return np.array(cells, dtype=float).reshape(-1, 2)


def flow_scan(xi: SampleXi, N: int, *, epsilon: float, delta: float) -> PointProcessSample:
    """Resonant set of a two-dimensional ``xi`` found through the Cartan flow.

    Every cell ``t`` of the flow grid pushes ``Lambda(xi)`` by ``g_t`` and
    collects the vectors of the (slightly padded) cusp region; the integer
    coordinates of such a vector are ``(k, m)``.  Recovered frequencies are
    deduplicated and passed through the exact resonant-set test.
    """
    if xi.d != 2:
        raise ArgumentError("flow_scan is implemented for d = 2")
    N = int(N)
    A = frequency_matrix(xi).entries
    frame = np.zeros((3, 3))
    frame[:2, :2] = A
    frame[2, :2] = xi.alpha
    frame[2, 2] = 1.0
    grid = flow_grid(N, delta)
    M = math.floor(math.log(N))
    meta = {"cells": int(len(grid))}
    log_nd = log_power(N, 2)
    if len(grid) == 0:
        return PointProcessSample([], N, epsilon, delta, log_nd, d=2, meta=meta)
    kappa = 1.0 / (epsilon * M * M)
    half_x = math.e * (1 + BOUNDARY_PAD)
    half_z = kappa * (1 + BOUNDARY_PAD)
    cap = _OUT_CAP
    while True:
        out_c = np.empty((cap, 3), dtype=np.int64)
        out_v = np.empty((cap, 3))
        out_cell = np.empty(cap, dtype=np.int64)
        fill, where, kind = _kernels.flow_cells_scan(frame, grid[:, 0].copy(), grid[:, 1].copy(),
                                                     half_x, half_z, out_c, out_v, out_cell,
                                                     LLL_MAX_ITER, MAX_CANDIDATES)
        if kind == _kernels.OK:
            break
        _raise_for(kind, f"flow cell {where}", cap)
        cap *= 4
    C = out_c[:fill]
    V = out_v[:fill] * np.array([half_x, half_x, half_z])
    x, y = V[:, 0], V[:, 1]
    lo = 1.0 - BOUNDARY_PAD
    keep = (x >= lo) & (np.abs(y) >= lo) & (np.abs(x * y * V[:, 2]) <= half_z)
    found: dict[tuple[int, int], int] = {}
    for c in C[keep]:
        k = (int(c[0]), int(c[1]))
        m = int(c[2])
        if k in found and found[k] != m:
            raise ConsistencyError(f"frequency {k} recovered with witnesses {found[k]} and {m}")
        found[k] = m
    terms = []
    for k, m in sorted(found.items()):
        t = exact_pairing(k, xi.alpha)
        theta = t + m
        if abs(theta) > 0.5:
            continue
        kbar = np.asarray(k, dtype=float) @ A.T
        if in_resonant_set(kbar, float(theta), m, k, N, epsilon, delta):
            terms.append(make_term(xi, N, k, log_nd))
    return PointProcessSample(terms, N, epsilon, delta, log_nd, d=2, meta=meta)


# ----------------------------------------------------------------------------
# random lattices


def _sl2_batch(rng: np.random.Generator, n: int) -> np.ndarray:
    """Frames of ``n`` Haar-random unimodular planar lattices."""
    xs = np.empty(n)
    ys = np.empty(n)
    got = 0
    tries = 0
    while got < n:
        need = n - got
        m = int(need * 1.3) + 16
        x = rng.uniform(-0.5, 0.5, m)
        # density prop. to y^-2 on [sqrt(3)/2, inf): inverse-CDF draw
        y = (math.sqrt(3.0) / 2.0) / (1.0 - rng.random(m))
        ok = x * x + y * y >= 1.0
        x, y = x[ok][:need], y[ok][:need]
        xs[got:got + len(x)] = x
        ys[got:got + len(y)] = y
        got += len(x)
        tries += m
        if tries > _SL2_MAX_TRIES * max(1, n):
            raise SamplingError("fundamental-domain sampler exceeded its iteration cap")
    sy = np.sqrt(ys)
    base = np.zeros((n, 2, 2))
    base[:, 0, 0] = 1.0 / sy
    base[:, 0, 1] = xs / sy
    base[:, 1, 1] = sy
    # Haar measure on SL_2(R) = SO(2) x {upper half-plane}: uniform rotation
    phi = rng.uniform(0.0, 2.0 * np.pi, n)
    c, s = np.cos(phi), np.sin(phi)
    rot = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)
    return rot @ base


def sl2_haar_sample(rng: np.random.Generator) -> UnimodularLattice:
    """Haar-random planar lattice: a uniform rotation of ``(Z + z Z)/sqrt(Im z)``, z in the fundamental domain."""
    return UnimodularLattice(_sl2_batch(rng, 1)[0])


# positions of the free entry of h_1^+, h_2^+, h_3^+ (h_q^- are the transposes)
_UNIPOTENT_POS = np.array([(2, 0), (2, 1), (1, 0)])


@dataclass(frozen=True)
class ApproxHaarSampler:
    """Expanding translates ``g_T h Lambda(alpha)`` of random unipotent words.

    Attributes:
        t_range: the two Cartan times are uniform on this interval.
        word_length: number of random generators ``h_q^{+-}(u)`` in ``h``.
    """

    t_range: tuple[float, float] = (6.0, 10.0)
    word_length: int = 6
    dim: int = 3

    def batch(self, rng: np.random.Generator, n: int):
        lo, hi = self.t_range
        qs = rng.integers(1, 4, (n, self.word_length))
        sg = rng.choice((-1, 1), (n, self.word_length))
        us = rng.random((n, self.word_length))
        alpha = rng.random((n, 2))
        t = rng.uniform(lo, hi, (n, 2))
        h = np.broadcast_to(np.eye(3), (n, 3, 3)).copy()
        rows = np.arange(n)
        for w in range(self.word_length):
            g = np.broadcast_to(np.eye(3), (n, 3, 3)).copy()
            r, c = _UNIPOTENT_POS[qs[:, w] - 1].T
            r, c = np.where(sg[:, w] > 0, r, c), np.where(sg[:, w] > 0, c, r)
            g[rows, r, c] = us[:, w]
            h = g @ h
        lam = np.broadcast_to(np.eye(3), (n, 3, 3)).copy()
        lam[:, 2, :2] = alpha
        scales = np.exp(np.column_stack([-t[:, 0], -t[:, 1], t[:, 0] + t[:, 1]]))
        return h @ lam, scales


@dataclass(frozen=True)
class SL2HaarSampler:
    dim: int = 2

    def batch(self, rng: np.random.Generator, n: int):
        return _sl2_batch(rng, n), np.ones((n, 2))


def approx_haar_sample(rng: np.random.Generator, dim: int = 3,
                       t_range: tuple[float, float] = (6.0, 10.0)) -> UnimodularLattice:
    """Approximately Haar-random 3-lattice (see ``ApproxHaarSampler``)."""
    if dim != 3:
        raise ArgumentError("the approximate sampler is implemented for dimension 3")
    f, s = ApproxHaarSampler(t_range=t_range).batch(rng, 1)
    return UnimodularLattice(f[0], s[0])


# ----------------------------------------------------------------------------
# Monte Carlo moments


@dataclass(frozen=True)
class BoxFunction:
    """Indicator of the box ``prod [lo_i, hi_i]``."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi):
            raise ArgumentError("box endpoints must have equal length")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def volume(self) -> float:
        return float(np.prod(np.clip(np.subtract(self.hi, self.lo), 0.0, None)))

    def reflected_overlap(self) -> float:
        """``int f(x) f(-x) dx``."""
        lo = np.maximum(self.lo, -np.array(self.hi))
        hi = np.minimum(self.hi, -np.array(self.lo))
        return float(np.prod(np.clip(hi - lo, 0.0, None)))

    def overlap(self, other: "BoxFunction") -> float:
        lo = np.maximum(self.lo, other.lo)
        hi = np.minimum(self.hi, other.hi)
        return float(np.prod(np.clip(hi - lo, 0.0, None)))

    def contains(self, V: np.ndarray) -> np.ndarray:
        return np.all((V >= np.array(self.lo)) & (V <= np.array(self.hi)), axis=-1)

    @property
    def reach(self) -> np.ndarray:
        return np.maximum(np.abs(self.lo), np.abs(self.hi))


@dataclass
class MomentEstimate:
    estimate: float
    stderr: float
    prediction: float | None

    @property
    def z_score(self) -> float | None:
        if self.prediction is None:
            return None
        if self.stderr == 0:
            return 0.0 if self.estimate == self.prediction else math.inf
        return (self.estimate - self.prediction) / self.stderr

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "stderr": self.stderr,
                "prediction": self.prediction, "z_score": self.z_score}


def _mean_se(a: np.ndarray) -> tuple[float, float]:
    a = np.asarray(a, dtype=float)
    if len(a) < 2:
        return float(a.mean()), 0.0
    return float(a.mean()), float(a.std(ddof=1) / math.sqrt(len(a)))


@dataclass
class MomentReport:
    quantities: dict[str, MomentEstimate]
    samples: int
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"samples": self.samples, **self.meta,
                **{k: v.to_dict() for k, v in self.quantities.items()}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _zeta_consts(n: int) -> tuple[float, float]:
    c1 = 1.0 / float(zeta(n))
    return c1, c1 * c1


def _blocks(samples: int) -> list[tuple[int, int]]:
    return [(b, min(_BATCH, samples - start)) for b, start in enumerate(range(0, samples, _BATCH))]


def _rogers_block(args):
    sampler, f1, f2, seed, b, m = args
    frames, scales = sampler.batch(derive_rng(seed, b, "rogers"), m)
    half = np.maximum(f1.reach, f2.reach)
    C, V, S = _box_points(frames, scales, half)
    prim = _primitive(C)
    V, S = V[prim], S[prim]
    in1 = f1.contains(V)
    in2 = f2.contains(V)
    in2neg = f2.contains(-V)
    F1 = np.bincount(S[in1], minlength=m).astype(float)
    F2 = np.bincount(S[in2], minlength=m).astype(float)
    # pairs (e, e) and (e, -e) are excluded from the off-diagonal sum
    diag = np.bincount(S, weights=(in1 & in2).astype(float) + (in1 & in2neg), minlength=m)
    return F1, F2, diag


def rogers_mc(sampler, f1: BoxFunction, f2: BoxFunction | None = None, samples: int = 10_000,
              seed: int = 0, workers: int = 1) -> MomentReport:
    """Monte Carlo moments of the primitive Siegel transform of box indicators.

    Args:
        sampler: ``SL2HaarSampler`` or ``ApproxHaarSampler``.
        f1: first box (dimension must match the sampler).
        f2: optional second box for the off-diagonal pair sum; defaults to ``f1``.
        samples: number of random lattices.
        seed: stream seed; blocks of lattices use derived streams.
        workers: processes used for the blocks.

    Returns:
        Estimates of ``E[F]``, ``E[F_bar]`` and ``E[F^2]`` with standard errors
        and the first and second moment predictions.
    """
    f2 = f1 if f2 is None else f2
    n = sampler.dim
    if len(f1.lo) != n or len(f2.lo) != n:
        raise ArgumentError(f"test boxes must live in R^{n}")
    if f1.volume == 0 or f2.volume == 0:
        raise ArgumentError("test function has zero volume")
    parts = parallel_map(_rogers_block, [(sampler, f1, f2, seed, b, m) for b, m in _blocks(samples)],
                         workers)
    F1, F2, diag = (np.concatenate([p[i] for p in parts]) for i in range(3))
    c1, c2 = _zeta_consts(n)
    meta = {"c1": c1, "c2": c2, "dim": n}
    if n == 2:
        # the pair term of the second moment in the plane, for comparison
        pair11 = planar_pair_prediction(f1, f1)
        meta["planar_pair_prediction"] = float(planar_pair_prediction(f1, f2))
        meta["planar_second_moment_prediction"] = float(c1 * f1.volume + c1 * f1.reflected_overlap() + pair11)
    q = {
        "E[F]": MomentEstimate(*_mean_se(F1), c1 * f1.volume),
        "E[F2]": MomentEstimate(*_mean_se(F2), c1 * f2.volume),
        "E[Fbar]": MomentEstimate(*_mean_se(F1 * F2 - diag), c2 * f1.volume * f2.volume),
        "E[F^2]": MomentEstimate(
            *_mean_se(F1 * F1),
            c1 * f1.volume + c1 * f1.reflected_overlap() + c2 * f1.volume**2,
        ),
    }
    return MomentReport(q, samples, meta)


def planar_pair_prediction(f1: BoxFunction, f2: BoxFunction, grid: int = 400) -> float:
    """Mean of the off-diagonal primitive pair sum for Haar-random planar lattices.

    In the plane a primitive pair ``(v, w)`` has an integer determinant ``k``
    and the pair density is ``(1/zeta(2)) sum_k phi(|k|)/|k| * delta(det(x, y) - k)``
    (``phi`` is Euler's totient), so it is not the product form used in higher
    dimensions.  Evaluated by midpoint quadrature over ``f1``.
    """
    lo1, hi1 = np.array(f1.lo), np.array(f1.hi)
    lo2, hi2 = np.array(f2.lo), np.array(f2.hi)
    h = (hi1 - lo1) / grid
    g0 = lo1[0] + h[0] * (np.arange(grid) + 0.5)
    g1 = lo1[1] + h[1] * (np.arange(grid) + 0.5)
    X = np.stack(np.meshgrid(g0, g1, indexing="ij"), -1).reshape(-1, 2)
    nx = np.hypot(X[:, 0], X[:, 1])
    X, nx = X[nx > 0], nx[nx > 0]
    d = X / nx[:, None]
    kmax = int(math.ceil(np.max(nx) * np.linalg.norm(np.maximum(np.abs(lo2), np.abs(hi2))))) + 1
    total = 0.0
    for k in range(1, kmax + 1):
        weight = sum(1 for a in range(1, k + 1) if math.gcd(a, k) == 1) / k
        for sk in (k, -k):
            y0 = np.stack([-X[:, 1], X[:, 0]], -1) * (sk / nx**2)[:, None]
            tlo = np.full(len(X), -np.inf)
            thi = np.full(len(X), np.inf)
            for j in range(2):
                with np.errstate(divide="ignore", invalid="ignore"):
                    a = (lo2[j] - y0[:, j]) / d[:, j]
                    b = (hi2[j] - y0[:, j]) / d[:, j]
                flat = d[:, j] == 0
                inside = (y0[:, j] >= lo2[j]) & (y0[:, j] <= hi2[j])
                tlo = np.where(flat, np.where(inside, tlo, np.inf), np.maximum(tlo, np.minimum(a, b)))
                thi = np.where(flat, thi, np.minimum(thi, np.maximum(a, b)))
            seg = np.clip(thi - tlo, 0.0, None) / nx
            total += weight * float(np.sum(seg)) * h[0] * h[1]
    return total / float(zeta(2))


def _phi_block(args):
    sampler, region, seed, b, m = args
    frames, scales = sampler.batch(derive_rng(seed, b, "multiplicity"), m)
    C, V, S = _box_points(frames, scales, region.half_widths)
    keep = region.contains(V) & _primitive(C)
    return np.bincount(S[keep], minlength=m).astype(float)


def multiple_solution_stats(sampler, region: RegionSpec, M: float, samples: int = 100_000,
                            seed: int = 0, workers: int = 1) -> MomentReport:
    """Monte Carlo statistics of the cusp counter ``Phi`` on random 3-lattices.

    Returns:
        ``P(Phi>1)``, ``E[Phi^2 - Phi]`` and ``E[Phi]`` with standard errors; the
        prediction for ``E[Phi]`` is ``c_1`` times the region measure.
    """
    if sampler.dim != 3:
        raise ArgumentError("multiple-solution statistics need a three-dimensional sampler")
    if region.kappa > 0:
        phi = np.concatenate(parallel_map(
            _phi_block, [(sampler, region, seed, b, m) for b, m in _blocks(samples)], workers))
    else:
        phi = np.zeros(samples)
    c1, _ = _zeta_consts(3)
    q = {
        "P(Phi>1)": MomentEstimate(*_mean_se(phi > 1), None),
        "E[Phi^2-Phi]": MomentEstimate(*_mean_se(phi * phi - phi), None),
        "E[Phi]": MomentEstimate(*_mean_se(phi), c1 * region.measure),
    }
    return MomentReport(q, samples, {"M": M, "kappa": region.kappa,
                                     "max_phi": int(phi.max()) if samples else 0})


def lattice_from_csv(text: str) -> UnimodularLattice:
    rows = [list(map(float, line.split(","))) for line in io.StringIO(text) if line.strip()]
    return UnimodularLattice(np.array(rows))
