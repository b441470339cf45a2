"""Random parameter space of the randomized box model.

A parameter tuple ``xi = (u, M, alpha, x)`` collects the box half-sides,
a shear matrix close to the identity, a translation frequency and a base
point.  Every sample is a deterministic function of ``(seed, index)`` so that
Monte Carlo work can be sharded freely.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ArgumentError, ConfigurationError, SamplingError

_SHEAR_MAX_TRIES = 10_000
DET_RTOL = 1e-12


def stream_tag(tag: str | int) -> int:
    if isinstance(tag, int):
        return tag
    return zlib.crc32(tag.encode("utf-8"))


def derive_rng(seed: int, index: int, tag: str | int = 0) -> np.random.Generator:
    """Counter-based generator for one ``(seed, index, tag)`` triple.

    The stream does not depend on how many other streams were drawn before it,
    which is what makes sharded Monte Carlo reproducible.
    """
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), int(index), stream_tag(tag)])
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of the randomized box model.

    Attributes:
        d: torus dimension.
        side_ranges: ``d`` pairs ``(v_i, w_i)`` with ``0 < v_i < w_i < 1/2``.
        eta: shear bound, ``0 <= eta < 1/(4d)`` (``eta = 0`` pins the identity).
        epsilon: resonance cutoff.
        delta: exponent margin in ``(0, 1)``.
        seed: 64-bit unsigned seed.
    """

    d: int
    side_ranges: tuple[tuple[float, float], ...]
    eta: float
    epsilon: float
    delta: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "side_ranges", tuple((float(v), float(w)) for v, w in self.side_ranges)
        )
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise ConfigurationError(f"dimension must be a positive integer, got {self.d!r}")
        if len(self.side_ranges) != self.d:
            raise ConfigurationError(
                f"side_ranges has {len(self.side_ranges)} entries, expected d={self.d}"
            )
        for i, (v, w) in enumerate(self.side_ranges):
            if not 0.0 < v < w < 0.5:
                raise ConfigurationError(
                    f"side range {i} = ({v}, {w}) violates 0 < v < w < 1/2"
                )
        if not 0.0 <= self.eta < 1.0 / (4 * self.d):
            raise ConfigurationError(
                f"eta = {self.eta} violates 0 <= eta < 1/(4d) = {1.0 / (4 * self.d)}"
            )
        if not self.epsilon > 0.0:
            raise ConfigurationError(f"epsilon = {self.epsilon} must be > 0")
        if not 0.0 < self.delta < 1.0:
            raise ConfigurationError(f"delta = {self.delta} must lie in (0, 1)")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigurationError(f"seed = {self.seed} is not a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return {
            "dimension": self.d,
            "side_ranges": [list(r) for r in self.side_ranges],
            "eta": self.eta,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "seed": int(self.seed),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        missing = {"dimension", "side_ranges", "eta", "epsilon", "delta"} - set(data)
        if missing:
            raise ConfigurationError(f"missing configuration keys: {sorted(missing)}")
        return cls(
            d=int(data["dimension"]),
            side_ranges=tuple(tuple(r) for r in data["side_ranges"]),
            eta=float(data["eta"]),
            epsilon=float(data["epsilon"]),
            delta=float(data["delta"]),
            seed=int(data.get("seed", 0)),
        )


def load_config(path: str | Path) -> tuple[ExperimentConfig, dict]:
    """Read a YAML (or JSON) configuration file.

    Returns the validated model configuration together with the raw mapping,
    which may carry experiment-level keys (``n``, ``samples``, ...).
    """
    text = Path(path).read_text()
    if str(path).endswith(".json"):
        data = json.loads(text)
    else:
        import yaml

        data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: top level must be a mapping")
    return ExperimentConfig.from_dict(data), data


@dataclass(frozen=True)
class ShearMatrix:
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ArgumentError(f"shear must be square, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    def in_g_eta(self, eta: float) -> bool:
        a = self.entries
        diag_ok = np.all(np.abs(np.diag(a) - 1.0) < eta) if eta > 0 else np.all(np.diag(a) == 1.0)
        off = a - np.diag(np.diag(a))
        off_ok = np.all(np.abs(off) < eta) if eta > 0 else np.all(off == 0.0)
        return bool(diag_ok and off_ok)

    def det(self) -> float:
        return float(np.linalg.det(self.entries))

    @property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.entries)


@dataclass(frozen=True)
class SampleXi:
    """One parameter tuple; ``alpha`` and ``x`` are canonical lifts in [0,1)^d."""

    u: np.ndarray
    shear: ShearMatrix
    alpha: np.ndarray
    x: np.ndarray
    index: int = field(default=-1, compare=False)

    def __post_init__(self):
        for name in ("u", "alpha", "x"):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        d = self.shear.d
        if not (len(self.u) == len(self.alpha) == len(self.x) == d):
            raise ArgumentError("u, alpha, x and shear must share the dimension")
        if np.any(self.alpha < 0) or np.any(self.alpha >= 1) or np.any(self.x < 0) or np.any(self.x >= 1):
            raise ArgumentError("alpha and x must be canonical lifts in [0,1)^d")

    @property
    def d(self) -> int:
        return self.shear.d

    @property
    def box_volume(self) -> float:
        return float(2.0 ** self.d * np.prod(self.u))

    @classmethod
    def simple(cls, u, alpha, x, shear=None) -> "SampleXi":
        u = np.atleast_1d(np.asarray(u, dtype=float))
        d = len(u)
        if shear is None:
            shear = np.eye(d)
        return cls(u=u, shear=ShearMatrix(np.asarray(shear, dtype=float)),
                   alpha=np.atleast_1d(alpha), x=np.atleast_1d(x))


def sample_shear(d: int, eta: float, rng: np.random.Generator) -> ShearMatrix:
    """Draw from G_eta with det 1 by solving for the last diagonal entry."""
    if eta == 0.0 or d == 1:
        return ShearMatrix(np.eye(d))
    for _ in range(_SHEAR_MAX_TRIES):
        a = rng.uniform(-eta, eta, size=(d, d))
        a[np.diag_indices(d)] = 1.0 + rng.uniform(-eta, eta, size=d)
        # det is affine in a[-1, -1]: det = a_dd * C_dd + rest
        a0 = a.copy()
        a0[-1, -1] = 0.0
        rest = np.linalg.det(a0)
        cof = np.linalg.det(a[:-1, :-1])
        a[-1, -1] = (1.0 - rest) / cof
        if abs(a[-1, -1] - 1.0) < eta:
            return ShearMatrix(a)
    raise SamplingError(f"shear sampler did not accept within {_SHEAR_MAX_TRIES} draws")


def sample_xi(config: ExperimentConfig, sample_index: int) -> SampleXi:
    """Draw the parameter tuple with the given index (uniform product measure)."""
    rng = derive_rng(config.seed, sample_index, "xi")
    lo = np.array([r[0] for r in config.side_ranges])
    hi = np.array([r[1] for r in config.side_ranges])
    u = lo + (hi - lo) * rng.random(config.d)
    shear = sample_shear(config.d, config.eta, rng)
    alpha = rng.random(config.d)
    x = rng.random(config.d)
    return SampleXi(u=u, shear=shear, alpha=alpha, x=x, index=int(sample_index))


def dual_frequency(shear: ShearMatrix | np.ndarray, k: Sequence[int]) -> np.ndarray:
    """Return ``kbar`` with ``kbar_i = sum_j a_ij k_j``."""
    a = shear.entries if isinstance(shear, ShearMatrix) else np.asarray(shear, dtype=float)
    k = np.asarray(k)
    if k.shape[-1] != a.shape[1]:
        raise ArgumentError(f"frequency has length {k.shape[-1]}, shear is {a.shape}")
    return k.astype(float) @ a.T


def signed_nearest_distance(t):
    """Signed distance to the nearest integer.

    Returns ``(theta, m)`` with ``theta = t + m`` in ``(-1/2, 1/2]``; ties go
    to ``+1/2``.  Works elementwise on arrays.
    """
    t_arr = np.asarray(t, dtype=float)
    n = np.ceil(t_arr - 0.5)
    theta = t_arr - n
    if np.ndim(t) == 0:
        return float(theta), int(-n)
    return theta, (-n).astype(np.int64)


def exact_pairing(k: Sequence[int], values: Sequence[float]) -> Fraction:
    """Exact value of ``sum_i k_i * values_i`` for float ``values``."""
    return sum((int(ki) * Fraction(float(v)) for ki, v in zip(k, values)), Fraction(0))


def exact_signed_distance(k: Sequence[int], alpha: Sequence[float]) -> tuple[float, int]:
    """``signed_nearest_distance((k, alpha))`` evaluated without rounding error."""
    t = exact_pairing(k, alpha)
    n = math.ceil(t - Fraction(1, 2))
    return float(t - n), -n
