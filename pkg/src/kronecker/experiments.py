"""End-to-end experiments: plans, sharded sample loops, reports and checks.

Every experiment is a pure function of its plan.  Samples are identified by
their index and drawn from derived random streams; work is split into index
chunks that may run on a process pool, and results are merged in index order.
Output files start with a ``#`` header block carrying the plan hash, seed and
library version; nothing time- or host-dependent is written.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .errors import ArgumentError, DegenerateTestError, ResourceError
from .io import write_csv, write_json, write_text
from .lattice import (
    ApproxHaarSampler,
    BoxFunction,
    RegionSpec,
    SL2HaarSampler,
    flow_scan,
    multiple_solution_stats,
    rogers_mc,
)
from .orbit import (
    ContinuousLineSpec,
    discrepancy_continuous_ball,
    discrepancy_continuous_box,
    discrepancy_direct,
    discrepancy_smallbox,
)
from .parallel import index_chunks, parallel_map
from .params import ExperimentConfig, derive_rng, sample_shear, sample_xi
from .resonance import (
    check_splitness,
    enumerate_resonant_set,
    gamma_constant,
    mean_abs_gamma,
    phi_partial_sum,
    phi_series,
    resonant_discrepancy,
)
from .stats import (
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

KINDS = (
    "cauchy-limit",
    "poisson-process",
    "lattice-consistency",
    "rogers",
    "multiplicity",
    "smallbox",
    "continuous",
    "gamma-constant",
)
_CHUNK = 50

_MODEL_1D = {"dimension": 1, "side_ranges": [[0.1, 0.4]], "eta": 0.0, "epsilon": 0.5,
             "delta": 0.2, "seed": 1}
_MODEL_2D = {"dimension": 2, "side_ranges": [[0.1, 0.4], [0.1, 0.4]], "eta": 0.05,
             "epsilon": 0.5, "delta": 0.2, "seed": 1}

DEFAULTS: dict[str, dict] = {
    "cauchy-limit": {**_MODEL_1D, "n": [1000, 10000, 100000], "samples": 5000,
                     "options": {"ks_max": 0.10, "rho_ratio": [0.7, 1.4], "ks_slack": 0.01,
                                 "direct_max_n": 100000}},
    "smallbox": {**_MODEL_1D, "n": [100000], "samples": 5000,
                 "options": {"gamma": 0.25, "ks_max": 0.12, "rho_ratio": [0.6, 1.5],
                             "ks_slack": 0.01, "direct_max_n": 100000}},
    "poisson-process": {**_MODEL_2D, "n": [100000000], "samples": 10000,
                        "options": {"p_min": 0.01, "dispersion": [0.9, 1.1], "ks_alpha": 0.01,
                                    "recon_ks_max": 0.10, "recon_scale_tol": 0.25}},
    "lattice-consistency": {**_MODEL_2D, "n": [10000], "samples": 200,
                            "options": {"field_tol": 1e-9}},
    "rogers": {**_MODEL_2D, "n": [], "samples": 100000,
               "options": {"sl2_boxes": [[[1.0, -0.5], [2.0, 0.5]],
                                         [[0.5, 0.2], [1.5, 1.0]],
                                         [[-1.0, -1.0], [1.0, 1.0]]],
                           "approx_boxes": [[[0.2, -0.6, -0.4], [1.2, 0.4, 0.6]]],
                           "approx_t_range": [6.0, 10.0], "z_max": 3.0, "approx_rel_tol": 0.05}},
    "multiplicity": {**_MODEL_2D, "epsilon": 1.0, "n": [], "samples": None,
                     "options": {"M": [10, 20, 40],
                                 "samples_per_M": {"10": 400000, "20": 1000000, "40": 3000000},
                                 "reference_M": 20, "z_max": 3.0, "ratio_max": 4.0,
                                 "t_range": [6.0, 10.0]}},
    "continuous": {**_MODEL_2D, "n": [100, 1000, 10000], "samples": 2000,
                   "options": {"shape": "box", "radius": 0.2, "speed": [0.5, 1.5],
                               "ks_max": 0.05, "p99_growth": 0.10}},
    "gamma-constant": {**_MODEL_1D, "n": [], "samples": 4000000,
                       "options": {"dims": [1, 2], "rho_dims": [1, 2, 3], "rel_tol": 0.01,
                                   "rho_tol": 1e-12, "phi_checks": 100,
                                   "long_sum_terms": 2000000, "phi_tol": 1e-9}},
}


@dataclass(frozen=True)
class Check:
    name: str
    value: object
    threshold: str
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "threshold": self.threshold,
                "passed": bool(self.passed)}


@dataclass
class ExperimentPlan:
    """One experiment run: kind, model configuration, sizes and options."""

    kind: str
    config: ExperimentConfig
    n_list: tuple[int, ...]
    samples: int
    workers: int = 1
    out_dir: Path = Path("results")
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ArgumentError(f"unknown experiment kind {self.kind!r}")
        self.n_list = tuple(int(n) for n in self.n_list)
        self.out_dir = Path(self.out_dir)
        if self.samples is not None and int(self.samples) < 1:
            raise ArgumentError("sample count must be >= 1")
        if any(n < 16 for n in self.n_list):
            raise ArgumentError(f"every N must be >= 16, got {list(self.n_list)}")
        if int(self.workers) < 1:
            raise ArgumentError("workers must be >= 1")

    def identity(self) -> dict:
        # worker count and output location do not affect results
        return {"kind": self.kind, "config": self.config.to_dict(), "n": list(self.n_list),
                "samples": self.samples, "options": self.options}

    def plan_hash(self) -> str:
        blob = json.dumps(self.identity(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def header(self) -> dict:
        return {"kind": self.kind, "plan_hash": self.plan_hash(), "seed": self.config.seed,
                "version": __version__}


@dataclass
class RunResult:
    kind: str
    checks: list[Check]
    summary: dict
    files: list[Path]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def build_plan(kind: str, raw: dict | None = None, *, seed: int | None = None,
               n_list=None, samples: int | None = None, workers: int = 1,
               out_dir: str | Path = "results") -> ExperimentPlan:
    """Merge built-in defaults, a configuration mapping and explicit overrides."""
    if kind not in KINDS:
        raise ArgumentError(f"unknown experiment kind {kind!r}")
    data = copy.deepcopy(DEFAULTS[kind])
    raw = raw or {}
    opts = {**data.get("options", {}), **(raw.get("options") or {})}
    data.update({k: v for k, v in raw.items() if k != "options"})
    data["options"] = opts
    if seed is not None:
        data["seed"] = int(seed)
    if n_list:
        data["n"] = [int(float(n)) for n in n_list]
    if samples is not None:
        data["samples"] = int(samples)
        if kind == "multiplicity":
            data["options"]["samples_per_M"] = {str(m): int(samples) for m in data["options"]["M"]}
    config = ExperimentConfig.from_dict(data)
    return ExperimentPlan(kind=kind, config=config,
                          n_list=tuple(int(float(n)) for n in data.get("n") or []),
                          samples=1 if data.get("samples") is None else int(data["samples"]), workers=int(workers),
                          out_dir=Path(out_dir), options=data["options"])


def _sharded(fn: Callable, samples: int, workers: int) -> list:
    chunks = index_chunks(samples, _CHUNK)
    parts = parallel_map(fn, chunks, workers)
    return [v for part in parts for v in part]


# ----------------------------------------------------------------------------
# Cauchy limit (plain and small boxes)


def _discrepancy_chunk(config: ExperimentConfig, N: int, gamma: float, mode: str, rng_range):
    out = []
    for i in range(*rng_range):
        xi = sample_xi(config, i)
        if mode == "direct":
            out.append(discrepancy_smallbox(xi, N, gamma) if gamma > 0 else discrepancy_direct(xi, N))
        else:
            s = enumerate_resonant_set(xi, N, "latticeflow", epsilon=config.epsilon, delta=config.delta)
            out.append(resonant_discrepancy(s))
    return out


def run_cauchy_limit(plan: ExperimentPlan) -> RunResult:
    cfg, opt = plan.config, plan.options
    d = cfg.d
    gamma = float(opt.get("gamma", 0.0)) if plan.kind == "smallbox" else 0.0
    switch = int(opt.get("direct_max_n", 100000))
    if not plan.n_list:
        raise ArgumentError("the Cauchy experiment needs at least one N")
    modes = {}
    for N in plan.n_list:
        if N <= switch:
            modes[N] = "direct"
        elif gamma > 0 or d > 2:
            raise ResourceError(f"N = {N} exceeds the direct bound {switch} and no resonant route "
                                f"exists for d = {d}, gamma = {gamma}")
        else:
            modes[N] = "resonant"
    rho = rho_constant(d)
    header = plan.header()
    files, per_n, checks = [], [], []
    for N in plan.n_list:
        raw = _sharded(partial(_discrepancy_chunk, cfg, N, gamma, modes[N]), plan.samples, plan.workers)
        norm = rho * ((1.0 - d * gamma) * math.log(N)) ** d
        z = np.asarray(raw) / norm
        emp = EmpiricalDistribution(z)
        ks = ks_statistic(emp, cauchy_cdf)
        ratio = cauchy_scale_fit(emp) if emp.n >= 100 else None
        per_n.append({"N": N, "mode": modes[N], "samples": emp.n, "ks": ks, "rho_hat_over_rho": ratio,
                      "normalizer": norm})
        files.append(write_text(plan.out_dir / f"ecdf_N{N}.csv", header, emp.to_csv()))
        files.append(write_csv(plan.out_dir / f"samples_N{N}.csv", header, ["index", "D", "z"],
                               ([i, float(r), float(v)] for i, (r, v) in enumerate(zip(raw, z)))))
    last = per_n[-1]
    checks.append(Check(f"ks[N={last['N']}]", last["ks"], f"<= {opt['ks_max']}",
                        last["ks"] <= opt["ks_max"]))
    lo, hi = opt["rho_ratio"]
    r = last["rho_hat_over_rho"]
    checks.append(Check(f"rho_hat/rho[N={last['N']}]", r, f"in [{lo}, {hi}]",
                        r is not None and lo <= r <= hi))
    for a, b in zip(per_n, per_n[1:]):
        checks.append(Check(f"ks non-increasing N={a['N']}->{b['N']}", [a["ks"], b["ks"]],
                            f"second <= first + {opt['ks_slack']}", b["ks"] <= a["ks"] + opt["ks_slack"]))
    return RunResult(plan.kind, checks, {"rho": rho, "gamma": gamma, "per_N": per_n}, files)


# ----------------------------------------------------------------------------
# Poisson process of small denominators


def _process_chunk(config: ExperimentConfig, N: int, rng_range):
    out = []
    for i in range(*rng_range):
        xi = sample_xi(config, i)
        out.append(flow_scan(xi, N, epsilon=config.epsilon, delta=config.delta))
    return out


def run_poisson_process(plan: ExperimentPlan) -> RunResult:
    cfg, opt = plan.config, plan.options
    if cfg.d != 2:
        raise ArgumentError("the Poisson-process experiment is defined for d = 2")
    if not plan.n_list:
        raise ArgumentError("the Poisson-process experiment needs N")
    N = plan.n_list[0]
    header = plan.header()
    samples = _sharded(partial(_process_chunk, cfg, N), plan.samples, plan.workers)
    counts = np.array([len(s) for s in samples])
    recon = np.array([resonant_discrepancy(s) / s.log_nd for s in samples])
    A = math.sqrt(math.log(N))
    split = [check_splitness(s, A) for s in samples]
    rows = []
    for i, s in enumerate(samples):
        for t in s.terms:
            rows.append([i, *t.row()])
    files = [write_csv(plan.out_dir / "points.csv", header,
                       ["sample", "k1", "k2", "kbar1", "kbar2", "theta", "Theta", "parity",
                        "side1", "side2", "phase", "Gamma"], rows)]
    files.append(write_csv(plan.out_dir / "counts.csv", header,
                           ["sample", "count", "D7_over_logNd", "split"],
                           ([i, int(c), float(r), int(sp)] for i, (c, r, sp) in enumerate(zip(counts, recon, split)))))
    checks = []
    summary: dict = {"N": N, "cells": samples[0].meta.get("cells") if samples else 0,
                     "split_fraction": float(np.mean(split)), "split_A": A}
    pred = poisson_intensity(2, cfg.epsilon, cfg.delta)
    try:
        rep = poisson_count_test(counts, pred)
        summary["poisson"] = rep.to_dict()
        checks.append(Check("poisson chi-square p-value", rep.p_value, f">= {opt['p_min']}",
                            rep.p_value >= opt["p_min"]))
        lo, hi = opt["dispersion"]
        checks.append(Check("mean/var", rep.dispersion, f"in [{lo}, {hi}]", lo <= rep.dispersion <= hi))
    except DegenerateTestError as exc:
        summary["poisson"] = {"error": str(exc), "intensity_prediction": pred,
                              "mean_hat": float(counts.mean())}
        checks.append(Check("poisson chi-square", None, "test must be non-degenerate", False))
    Theta = np.array([t.Theta for s in samples for t in s.terms])
    marks = np.array([[*t.side_marks, t.parity, t.phase] for s in samples for t in s.terms]).reshape(-1, 4)
    if len(Theta) >= 100:
        ui = uniformity_and_independence(Theta, marks, ranges=[1.0, 1.0, 2.0, 1.0], seed=cfg.seed)
        ui["coordinates"] = ["side1", "side2", "parity", "phase"]
        summary["marks"] = ui
        for name, k in zip(ui["coordinates"], ui["ks"]):
            checks.append(Check(f"mark {name} uniform (KS p)", k["p_value"], f">= {opt['ks_alpha']}",
                                k["p_value"] >= opt["ks_alpha"]))
        for name, p in zip(ui["coordinates"], ui["theta_permutation"]):
            checks.append(Check(f"|Theta| independent of {name} (perm p)", p["p_value"],
                                f">= {opt['ks_alpha']}", p["p_value"] >= opt["ks_alpha"]))
    else:
        checks.append(Check("marks pooled", len(Theta), ">= 100", False))
    rho2 = rho_constant(2)
    emp = EmpiricalDistribution(recon)
    if emp.n >= 100:
        scale = cauchy_scale_fit(emp)
        ks_fit = ks_statistic(EmpiricalDistribution(recon / scale), cauchy_cdf) if scale > 0 else 1.0
        ks_rho = ks_statistic(EmpiricalDistribution(recon / rho2), cauchy_cdf)
        summary["reconstruction"] = {"scale_fit": scale, "rho": rho2, "ratio": scale / rho2,
                                     "ks_fitted_scale": ks_fit, "ks_rho_scale": ks_rho}
        checks.append(Check("reconstruction KS (fitted scale)", ks_fit, f"<= {opt['recon_ks_max']}",
                            ks_fit <= opt["recon_ks_max"]))
        tol = opt["recon_scale_tol"]
        checks.append(Check("reconstruction scale / rho", scale / rho2, f"within {tol:.0%} of 1",
                            abs(scale / rho2 - 1.0) <= tol))
        files.append(write_text(plan.out_dir / "reconstruction_ecdf.csv", header, emp.to_csv()))
    return RunResult(plan.kind, checks, summary, files)


# ----------------------------------------------------------------------------
# flow scan against brute force


def _consistency_chunk(config: ExperimentConfig, N: int, rng_range):
    out = []
    for i in range(*rng_range):
        xi = sample_xi(config, i)
        a = enumerate_resonant_set(xi, N, "bruteforce", epsilon=config.epsilon, delta=config.delta)
        b = flow_scan(xi, N, epsilon=config.epsilon, delta=config.delta)
        same = a.keys == b.keys
        diff = 0.0
        if same:
            for ta, tb in zip(a.terms, b.terms):
                diff = max(diff, float(np.max(np.abs(np.array(ta.row(), float) - np.array(tb.row(), float)))))
        out.append((i, len(a), len(b), same, diff))
    return out


def run_lattice_consistency(plan: ExperimentPlan) -> RunResult:
    cfg = plan.config
    if cfg.d != 2 or not plan.n_list:
        raise ArgumentError("lattice consistency needs d = 2 and an N")
    N = plan.n_list[0]
    rows = _sharded(partial(_consistency_chunk, cfg, N), plan.samples, plan.workers)
    mismatches = sum(1 for r in rows if not r[3])
    max_diff = max((r[4] for r in rows), default=0.0)
    files = [write_csv(plan.out_dir / "consistency.csv", plan.header(),
                       ["sample", "bruteforce_terms", "flow_terms", "same_set", "max_field_diff"],
                       ([i, a, b, int(s), d] for i, a, b, s, d in rows))]
    tol = plan.options.get("field_tol", 1e-9)
    checks = [Check("set mismatches", mismatches, "== 0", mismatches == 0),
              Check("max per-term field difference", max_diff, f"<= {tol}", max_diff <= tol)]
    return RunResult(plan.kind, checks, {"N": N, "terms": int(sum(r[1] for r in rows)),
                                         "mismatches": mismatches, "max_field_diff": max_diff}, files)


# ----------------------------------------------------------------------------
# Rogers moments and cusp multiplicities


def run_rogers(plan: ExperimentPlan) -> RunResult:
    opt, seed = plan.options, plan.config.seed
    rows, checks, summary = [], [], {"sl2": [], "approx": []}
    zmax = opt["z_max"]
    for j, (lo, hi) in enumerate(opt.get("sl2_boxes", [])):
        box = BoxFunction(lo, hi)
        rep = rogers_mc(SL2HaarSampler(), box, samples=plan.samples, seed=seed, workers=plan.workers)
        summary["sl2"].append({"box": [lo, hi], **rep.to_dict()})
        for q in ("E[F]", "E[F^2]"):
            e = rep.quantities[q]
            rows.append(["sl2", j, q, e.estimate, e.stderr, e.prediction, e.z_score])
            checks.append(Check(f"sl2 box {j} {q} z-score", e.z_score, f"|z| <= {zmax}",
                                abs(e.z_score) <= zmax))
    sampler = ApproxHaarSampler(t_range=tuple(opt["approx_t_range"]))
    for j, (lo, hi) in enumerate(opt.get("approx_boxes", [])):
        box = BoxFunction(lo, hi)
        rep = rogers_mc(sampler, box, samples=plan.samples, seed=seed, workers=plan.workers)
        summary["approx"].append({"box": [lo, hi], **rep.to_dict()})
        e = rep.quantities["E[F]"]
        rows.append(["approx3", j, "E[F]", e.estimate, e.stderr, e.prediction, e.z_score])
        rel = e.estimate / e.prediction - 1.0
        checks.append(Check(f"approx box {j} E[F] relative error", rel,
                            f"|rel| <= {opt['approx_rel_tol']}", abs(rel) <= opt["approx_rel_tol"]))
    files = [write_csv(plan.out_dir / "rogers.csv", plan.header(),
                       ["sampler", "box", "quantity", "estimate", "stderr", "prediction", "z_score"], rows)]
    return RunResult(plan.kind, checks, summary, files)


def run_multiplicity(plan: ExperimentPlan) -> RunResult:
    opt, cfg = plan.options, plan.config
    sampler = ApproxHaarSampler(t_range=tuple(opt["t_range"]))
    per_m, rows = [], []
    for M in opt["M"]:
        n = int(opt["samples_per_M"][str(M)])
        rep = multiple_solution_stats(sampler, RegionSpec.standard(M, cfg.epsilon), M, samples=n,
                                      seed=cfg.seed, workers=plan.workers)
        q = rep.quantities
        p = q["P(Phi>1)"]
        per_m.append({"M": M, **rep.to_dict(), "P(Phi>1)*M^4": p.estimate * M**4,
                      "P(Phi>1)*M^4 stderr": p.stderr * M**4})
        for name, e in q.items():
            rows.append([M, name, e.estimate, e.stderr, e.prediction, e.z_score])
    checks = []
    ref = next(r for r in per_m if r["M"] == opt["reference_M"])
    z = ref["E[Phi]"]["z_score"]
    checks.append(Check(f"E[Phi] z-score at M={opt['reference_M']}", z, f"|z| <= {opt['z_max']}",
                        abs(z) <= opt["z_max"]))
    for a, b in zip(per_m, per_m[1:]):
        va, vb = a["P(Phi>1)*M^4"], b["P(Phi>1)*M^4"]
        ratio = max(va, vb) / min(va, vb) if min(va, vb) > 0 else math.inf
        checks.append(Check(f"P(Phi>1) M^4 ratio M={a['M']}->{b['M']}", ratio,
                            f"<= {opt['ratio_max']}", ratio <= opt["ratio_max"]))
    files = [write_csv(plan.out_dir / "multiplicity.csv", plan.header(),
                       ["M", "quantity", "estimate", "stderr", "prediction", "z_score"], rows)]
    return RunResult(plan.kind, checks, {"per_M": per_m, "epsilon": cfg.epsilon}, files)


# ----------------------------------------------------------------------------
# continuous time


def _line_sample(config: ExperimentConfig, i: int, speed):
    rng = derive_rng(config.seed, i, "continuous")
    d = config.d
    lo = np.array([r[0] for r in config.side_ranges])
    hi = np.array([r[1] for r in config.side_ranges])
    u = lo + (hi - lo) * rng.random(d)
    shear = sample_shear(d, config.eta, rng)
    x = rng.random(d)
    v = rng.uniform(speed[0], speed[1], d) * rng.choice((-1.0, 1.0), d)
    return u, shear, x, v


def _continuous_chunk(config: ExperimentConfig, T_list, shape: str, radius: float, speed, rng_range):
    out = []
    for i in range(*rng_range):
        u, shear, x, v = _line_sample(config, i, speed)
        vals = []
        for T in T_list:
            spec = ContinuousLineSpec(v=v, x=x, T=T)
            if shape == "box":
                vals.append(discrepancy_continuous_box(spec, shear, 2.0 * u))
            else:
                vals.append(discrepancy_continuous_ball(spec, radius))
        out.append(vals)
    return out


def run_continuous(plan: ExperimentPlan) -> RunResult:
    opt, cfg = plan.options, plan.config
    shape = opt.get("shape", "box")
    if shape not in ("box", "ball"):
        raise ArgumentError(f"unknown shape {shape!r}")
    if shape == "ball" and cfg.d != 3:
        raise ArgumentError("the ball experiment needs d = 3")
    T_list = list(plan.n_list)
    if not T_list:
        raise ArgumentError("the continuous experiment needs at least one time horizon")
    vals = np.array(_sharded(partial(_continuous_chunk, cfg, T_list, shape, opt.get("radius", 0.2),
                                     opt["speed"]), plan.samples, plan.workers))
    header = plan.header()
    files = [write_csv(plan.out_dir / "continuous.csv", header,
                       ["sample", *[f"D_T{T}" for T in T_list]],
                       ([i, *map(float, row)] for i, row in enumerate(vals)))]
    per_t = []
    for j, T in enumerate(T_list):
        emp = EmpiricalDistribution(vals[:, j])
        files.append(write_text(plan.out_dir / f"ecdf_T{T}.csv", header, emp.to_csv()))
        entry = {"T": T, "p99_abs": float(np.quantile(np.abs(vals[:, j]), 0.99)),
                 "median": float(np.median(vals[:, j]))}
        if shape == "ball" and emp.n >= 100:
            scale = cauchy_scale_fit(emp)
            entry["scale_fit"] = scale
            entry["scale_over_r_lnT"] = scale / (opt.get("radius", 0.2) * math.log(T))
            entry["ks_fitted_cauchy"] = ks_statistic(EmpiricalDistribution(vals[:, j] / scale), cauchy_cdf)
        per_t.append(entry)
    checks = []
    if shape == "box":
        for j in range(len(T_list) - 1):
            ks = ks_two_sample(EmpiricalDistribution(vals[:, j]), EmpiricalDistribution(vals[:, j + 1]))
            per_t[j + 1]["ks_vs_previous"] = ks
            checks.append(Check(f"KS T={T_list[j]}->{T_list[j + 1]}", ks, f"<= {opt['ks_max']}",
                                ks <= opt["ks_max"]))
        if len(T_list) >= 2:
            a, b = per_t[-2]["p99_abs"], per_t[-1]["p99_abs"]
            g = b / a - 1.0
            checks.append(Check(f"p99 |D| growth T={T_list[-2]}->{T_list[-1]}", g,
                                f"< {opt['p99_growth']}", g < opt["p99_growth"]))
    return RunResult(plan.kind, checks, {"shape": shape, "per_T": per_t}, files)


# ----------------------------------------------------------------------------
# constants


def _gamma_block(args):
    seed, d, b, n = args
    m, _ = mean_abs_gamma(d, n, derive_rng(seed, b, f"gamma{d}"))
    return m * n


def _phi_check(args):
    seed, i, J = args
    rng = derive_rng(seed, i, "phi")
    d = 1 + i % 2
    eta = np.r_[rng.random(d), 2.0 * rng.random(), rng.random()]
    return float(abs(phi_series(eta) - phi_partial_sum(eta, J)))


def run_gamma_constant(plan: ExperimentPlan) -> RunResult:
    opt, seed = plan.options, plan.config.seed
    checks, summary = [], {"rho": [], "gamma": []}
    for d in opt["rho_dims"]:
        diff = abs(rho_constant(d) - rho_reconstruction(d))
        summary["rho"].append({"d": d, "rho": rho_constant(d), "reconstruction": rho_reconstruction(d),
                               "abs_diff": diff})
        checks.append(Check(f"rho({d}) vs reconstruction", diff, f"<= {opt['rho_tol']}",
                            diff <= opt["rho_tol"]))
    block = 1 << 18
    for d in opt["dims"]:
        jobs = [(seed, d, b, min(block, plan.samples - s)) for b, s in enumerate(range(0, plan.samples, block))]
        mean = sum(parallel_map(_gamma_block, jobs, plan.workers)) / plan.samples
        target = gamma_constant(d)
        rel = mean / target - 1.0
        summary["gamma"].append({"d": d, "mean_abs_gamma": mean, "target": target, "relative": rel,
                                 "rho_from_mc": rho_reconstruction(d, mean)})
        checks.append(Check(f"E|Gamma| d={d} relative error", rel, f"|rel| <= {opt['rel_tol']}",
                            abs(rel) <= opt["rel_tol"]))
    diffs = parallel_map(_phi_check, [(seed, i, int(opt["long_sum_terms"])) for i in range(opt["phi_checks"])],
                         plan.workers)
    summary["phi_max_abs_diff"] = max(diffs) if diffs else 0.0
    checks.append(Check("phi closed form vs long summation", summary["phi_max_abs_diff"],
                        f"<= {opt['phi_tol']}", summary["phi_max_abs_diff"] <= opt["phi_tol"]))
    files = [write_csv(plan.out_dir / "gamma.csv", plan.header(),
                       ["d", "mean_abs_gamma", "target", "relative"],
                       ([g["d"], g["mean_abs_gamma"], g["target"], g["relative"]] for g in summary["gamma"]))]
    return RunResult(plan.kind, checks, summary, files)


RUNNERS = {
    "cauchy-limit": run_cauchy_limit,
    "smallbox": run_cauchy_limit,
    "poisson-process": run_poisson_process,
    "lattice-consistency": run_lattice_consistency,
    "rogers": run_rogers,
    "multiplicity": run_multiplicity,
    "continuous": run_continuous,
    "gamma-constant": run_gamma_constant,
}


def run_remaining(plan: ExperimentPlan) -> RunResult:
    """Dispatch any plan kind to its runner."""
    try:
        runner = RUNNERS[plan.kind]
    except KeyError:
        raise ArgumentError(f"unknown experiment kind {plan.kind!r}") from None
    return runner(plan)


def run_plan(plan: ExperimentPlan) -> RunResult:
    """Run the plan and write ``summary.json`` next to the distribution files."""
    plan.out_dir.mkdir(parents=True, exist_ok=True)
    result = run_remaining(plan)
    summary_path = write_json(plan.out_dir / "summary.json", plan.header(), {
        "plan": plan.identity(),
        "checks": [c.to_dict() for c in result.checks],
        "passed": result.passed,
        "results": result.summary,
        "files": sorted(p.name for p in result.files),
    })
    result.files.append(summary_path)
    return result
