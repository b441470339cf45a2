"""Definition-level discrepancy computations.

Everything here counts visits directly (discrete time) or sums exact crossing
intervals (continuous time).  These functions are the ground truth the
Fourier/resonance machinery is checked against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateDirectionError
from .params import SampleXi, ShearMatrix

_CHUNK = 1 << 16
_FACE_TOL = 1e-12


def _shift_offsets(d: int, shear_inv: np.ndarray) -> np.ndarray:
    shifts = np.array(list(itertools.product((-1, 0, 1), repeat=d)), dtype=float)
    return shifts @ shear_inv.T


def _inside_count(q: np.ndarray, offsets: np.ndarray, u: np.ndarray) -> np.ndarray:
    # q: (n, d) points already mapped by shear^{-1}
    hit = np.zeros(q.shape[0], dtype=bool)
    for off in offsets:
        hit |= np.all(np.abs(q + off) <= u, axis=1)
    return hit


def box_contains(xi: SampleXi, p) -> bool | np.ndarray:
    """Membership of torus point(s) ``p`` (lifts in [0,1)^d) in the closed box M C_u."""
    p = np.asarray(p, dtype=float)
    single = p.ndim <= 1
    pts = p.reshape(-1, xi.d)
    inv = xi.shear.inverse
    hit = _inside_count(pts @ inv.T, _shift_offsets(xi.d, inv), xi.u)
    return bool(hit[0]) if single else hit


def _visit_count(xi: SampleXi, N: int, u: np.ndarray) -> int:
    d = xi.d
    inv = xi.shear.inverse
    count = 0
    if d == 1 and inv[0, 0] == 1.0:
        # Fast path for the unsheared circle: [-u, u] mod 1.
        for start in range(1, N + 1, _CHUNK):
            m = np.arange(start, min(start + _CHUNK, N + 1), dtype=float)
            p = (xi.x[0] + m * xi.alpha[0]) % 1.0
            count += int(np.count_nonzero((p <= u[0]) | (p >= 1.0 - u[0])))
        return count
    offsets = _shift_offsets(d, inv)
    for start in range(1, N + 1, _CHUNK):
        m = np.arange(start, min(start + _CHUNK, N + 1), dtype=float)
        p = (xi.x[None, :] + m[:, None] * xi.alpha[None, :]) % 1.0
        count += int(np.count_nonzero(_inside_count(p @ inv.T, offsets, u)))
    return count


def visit_count(xi: SampleXi, N: int) -> int:
    """Number of ``1 <= m <= N`` with ``x + m alpha`` in the box."""
    return _visit_count(xi, int(N), xi.u)


def discrepancy_direct(xi: SampleXi, N: int) -> float:
    """Visits of ``x + m alpha`` (``1 <= m <= N``) to M C_u minus ``2^d prod(u) N``."""
    N = int(N)
    if N < 1:
        raise ArgumentError(f"N must be >= 1, got {N}")
    return _visit_count(xi, N, xi.u) - xi.box_volume * N


def discrepancy_smallbox(xi: SampleXi, N: int, gamma: float) -> float:
    """Discrepancy for the shrunk box with half-sides ``u_i / N^gamma``."""
    N = int(N)
    if N < 1:
        raise ArgumentError(f"N must be >= 1, got {N}")
    if not 0.0 <= gamma < 1.0 / xi.d:
        raise ArgumentError(f"gamma = {gamma} must satisfy 0 <= gamma < 1/d")
    u = xi.u / float(N) ** gamma
    return _visit_count(xi, N, u) - float(2.0 ** xi.d * np.prod(u)) * N


@dataclass(frozen=True)
class ContinuousLineSpec:
    """The linear flow ``t -> x + v t`` on the torus up to time ``T``."""

    v: np.ndarray
    x: np.ndarray
    T: float

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.v, dtype=float))
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        if v.shape != x.shape:
            raise ArgumentError("v and x must have the same dimension")
        if not np.linalg.norm(v) > 0:
            raise ArgumentError("flow direction must be nonzero")
        if not self.T > 0:
            raise ArgumentError("time horizon must be positive")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "T", float(self.T))

    @property
    def d(self) -> int:
        return len(self.v)


def _translates_near_segment(x, v, T, lo, hi) -> np.ndarray:
    """Integer ``n`` such that ``x + v t - n`` can meet ``[lo, hi]`` for some t in [0, T]."""
    d = len(v)
    a = int(np.argmax(np.abs(v)))
    ends = np.array([x[a], x[a] + v[a] * T])
    na = np.arange(math.ceil(ends.min() - hi[a]) - 1, math.floor(ends.max() - lo[a]) + 2)
    # time window during which axis a sits inside [lo_a, hi_a] for each n_a
    t1 = (na + lo[a] - x[a]) / v[a]
    t2 = (na + hi[a] - x[a]) / v[a]
    ws = np.clip(np.minimum(t1, t2), 0.0, T)
    we = np.clip(np.maximum(t1, t2), 0.0, T)
    keep = we > ws
    na, ws, we = na[keep], ws[keep], we[keep]
    ranges = []
    for j in range(d):
        if j == a:
            continue
        pa = x[j] + v[j] * ws
        pb = x[j] + v[j] * we
        jlo = np.ceil(np.minimum(pa, pb) - hi[j]).astype(np.int64) - 1
        jhi = np.floor(np.maximum(pa, pb) - lo[j]).astype(np.int64) + 1
        ranges.append((j, jlo, jhi))
    out_idx = np.arange(len(na))
    out_other = np.zeros((len(na), 0), dtype=np.int64)
    for j, jlo, jhi in ranges:
        span = (jhi - jlo + 1)[out_idx]
        rep_idx = np.repeat(out_idx, span)
        starts = np.repeat(jlo[out_idx], span)
        offs = np.arange(span.sum()) - np.repeat(np.cumsum(span) - span, span)
        out_other = np.column_stack([np.repeat(out_other, span, axis=0), starts + offs])
        out_idx = rep_idx
    result = np.zeros((len(out_idx), d), dtype=np.int64)
    result[:, a] = na[out_idx]
    others = [j for j in range(d) if j != a]
    for c, j in enumerate(others):
        result[:, j] = out_other[:, c]
    return result


def discrepancy_continuous_box(spec: ContinuousLineSpec, shear: ShearMatrix, u) -> float:
    """Time spent in the open box ``A prod(0, u_j)`` minus ``T prod(u_j)``.

    Exact up to floating point: the occupation time is the sum over the
    integer translates of the box of the clamped slab-intersection intervals.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    A = shear.entries if isinstance(shear, ShearMatrix) else np.asarray(shear, dtype=float)
    d = spec.d
    if A.shape != (d, d) or len(u) != d:
        raise ArgumentError("shear, u and the line must share the dimension")
    inv = np.linalg.inv(A)
    w = inv @ spec.v
    p0 = inv @ spec.x
    corners = np.array(list(itertools.product(*[(0.0, uj) for uj in u]))) @ A.T
    lo, hi = corners.min(axis=0), corners.max(axis=0)
    n = _translates_near_segment(spec.x, spec.v, spec.T, lo, hi)
    if len(n) == 0:
        return -spec.T * float(np.prod(u))
    s0 = p0[None, :] - n.astype(float) @ inv.T  # slab coordinates at t = 0
    start = np.zeros(len(n))
    end = np.full(len(n), spec.T)
    for j in range(d):
        if w[j] == 0.0:
            inside = (s0[:, j] > 0.0) & (s0[:, j] < u[j])
            end = np.where(inside, end, start)
            continue
        if abs(w[j]) < _FACE_TOL:
            raise DegenerateDirectionError(
                f"direction component {w[j]:.3e} along face {j} is ill-conditioned"
            )
        ta = (0.0 - s0[:, j]) / w[j]
        tb = (u[j] - s0[:, j]) / w[j]
        start = np.maximum(start, np.minimum(ta, tb))
        end = np.minimum(end, np.maximum(ta, tb))
    occupation = float(np.sum(np.clip(end - start, 0.0, None)))
    return occupation - spec.T * float(np.prod(u))


def discrepancy_continuous_ball(spec: ContinuousLineSpec, r: float) -> float:
    """Time spent in the ball ``B(0, r)`` on the 3-torus minus ``T vol(B)``."""
    if spec.d != 3:
        raise ArgumentError(f"ball discrepancy is defined for d = 3, got d = {spec.d}")
    if not 0.0 < r < 0.5:
        raise ArgumentError(f"radius {r} must lie in (0, 1/2)")
    lo = np.full(3, -r)
    hi = np.full(3, r)
    n = _translates_near_segment(spec.x, spec.v, spec.T, lo, hi).astype(float)
    vol = 4.0 / 3.0 * math.pi * r**3
    if len(n) == 0:
        return -spec.T * vol
    v = spec.v
    vv = float(v @ v)
    rel = n - spec.x[None, :]
    t0 = rel @ v / vv
    closest = spec.x[None, :] + np.outer(t0, v) - n
    d2 = np.einsum("ij,ij->i", closest, closest)
    half = np.sqrt(np.clip(r * r - d2, 0.0, None) / vv)
    start = np.clip(t0 - half, 0.0, spec.T)
    end = np.clip(t0 + half, 0.0, spec.T)
    occupation = float(np.sum(np.where(d2 < r * r, end - start, 0.0)))
    return occupation - spec.T * vol
