"""Seeded verification sweeps.

Case ``i`` of a run draws everything it needs from its own stream,
``SeedSequence(seed, spawn_key=(i,))``, in a fixed order: the parameters
first, then the evaluation points (or the sampling phases for ``beta``).
Adding cases never changes earlier ones, and a ``beta`` run sees the same
parameters as a ``theorem1`` run with the same seed.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .confluent import ConfluentParams, confluent_residual, prop3_check
from .config import ParamsConfig, RunConfig, SweepConfig
from .duality import (
    HypergeometricParams,
    QParams,
    beta_table,
    identity_residual,
    prop1_check,
    random_exponents,
    sample_admissible_z,
)
from .golden import golden_report
from .oracle import alpha_identity_check, recover_beta_by_sampling
from .report import FAIL, CaseRecord, ResidualReport

__all__ = [
    "WORKERS_ENV",
    "CasePlan",
    "case_rng",
    "plan_cases",
    "params_from_config",
    "draw_params",
    "evaluate_case",
    "worker_count",
    "run",
]

WORKERS_ENV = "QDUALITY_WORKERS"
MAX_DRAWS = 10_000


@dataclass(frozen=True)
class CasePlan:
    index: int
    case_id: str
    r: int
    s: int


def case_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def plan_cases(config: RunConfig) -> list[CasePlan]:
    """One plan per case.  Sizes cycle through ``sweep.r`` (or
    ``sweep.rs_pairs`` for the confluent modes) so each size gets an equal
    share of the cases."""
    if config.mode == "examples":
        return []
    if config.params is not None:
        p = config.params
        return [CasePlan(0, f"{config.mode}-00000", len(p.a), len(p.b))]
    if config.mode in ("confluent", "prop3"):
        sizes = [tuple(x) for x in config.sweep.rs_pairs]
    else:
        sizes = [(r, r) for r in config.sweep.r]
    return [
        CasePlan(i, f"{config.mode}-{i:05d}", *sizes[i % len(sizes)])
        for i in range(config.samples)
    ]


def params_from_config(p: ParamsConfig) -> HypergeometricParams:
    cls = QParams if len(p.b) == len(p.a) else ConfluentParams
    return cls(p.a, p.b, p.m, p.n, p.t, p.q)


def _draw_once(rng: np.random.Generator, sweep: SweepConfig, r: int, s: int) -> HypergeometricParams:
    q = sweep.q[int(rng.integers(len(sweep.q)))]
    a = random_exponents(rng, r, imag=sweep.imag)
    b = random_exponents(rng, s, spacing=0.0, imag=sweep.imag, avoid=a)
    m = [int(x) for x in rng.integers(-sweep.m_bound, sweep.m_bound + 1, s)]
    n = [int(x) for x in rng.integers(-sweep.n_bound, sweep.n_bound + 1, r)]
    if sweep.t_values:
        t = int(sweep.t_values[int(rng.integers(len(sweep.t_values)))])
    else:
        t = int(rng.integers(-sweep.t_bound, sweep.t_bound + 1))
    cls = QParams if s == r else ConfluentParams
    return cls(a, b, m, n, t, q)


def draw_params(config: RunConfig, plan: CasePlan, rng: np.random.Generator) -> HypergeometricParams:
    """Parameters of one case, redrawn until the mode's side conditions hold."""
    if config.params is not None:
        return params_from_config(config.params)
    sweep = config.sweep
    for _ in range(MAX_DRAWS):
        params = _draw_once(rng, sweep, plan.r, plan.s)
        if config.mode == "prop1" and not abs(params.W) < sweep.w_max:
            continue
        if sweep.p_index_values and isinstance(params, QParams) and params.p_index not in sweep.p_index_values:
            continue
        return params
    raise RuntimeError(f"{plan.case_id}: no admissible parameters after {MAX_DRAWS} draws")


def _beta_record(params: HypergeometricParams, rng: np.random.Generator, tol: float, case_id: str) -> CaseRecord:
    table = beta_table(params)
    sampled = recover_beta_by_sampling(params, rng=rng)
    residuals = []
    for k, want in table.items():
        got = sampled[k]
        size = max(abs(want), abs(got))
        residuals.append(abs(got - want) / size if size else 0.0)
    detail = {
        "beta": {str(k): [v.real, v.imag] for k, v in table.items()},
        "sampled": {str(k): [v.real, v.imag] for k, v in sampled.items()},
    }
    return CaseRecord.from_residuals(case_id, params.to_dict(), residuals, tol, detail=detail)


def evaluate_case(config: RunConfig, plan: CasePlan) -> CaseRecord:
    """Run one case; any numerical exception becomes a failing record."""
    rng = case_rng(config.seed, plan.index)
    params = None
    try:
        params = draw_params(config, plan, rng)
        mode, tol, cid = config.mode, config.tol, plan.case_id
        if mode in ("theorem1", "confluent"):
            zs = sample_admissible_z(params, rng, config.z_samples_per_case)
            check = confluent_residual if isinstance(params, ConfluentParams) else identity_residual
            return check(params, zs, tol, cid).records[0]
        if mode == "prop1":
            return prop1_check(params, tol, cid).records[0]
        if mode == "prop3":
            return prop3_check(params, tol, cid).records[0]
        if mode == "alpha":
            k = config.k if config.k is not None else -params.m_min + int(rng.integers(0, 3))
            return alpha_identity_check(params, k, tol, cid).records[0]
        if mode == "beta":
            return _beta_record(params, rng, tol, cid)
        raise ValueError(f"mode {mode!r} has no per-case evaluation")
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        echo = params.to_dict() if params is not None else {}
        return CaseRecord(plan.case_id, echo, [], float("inf"), FAIL, config.tol, [], {"error": repr(exc)})


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return n


def run(config: RunConfig, workers: int | None = None) -> ResidualReport:
    """Execute every case of ``config``; records come back sorted by case id
    whatever the completion order."""
    start = time.perf_counter()
    if config.mode == "examples":
        report = golden_report(config.tol)
    else:
        plans = plan_cases(config)
        workers = worker_count() if workers is None else workers
        job = partial(evaluate_case, config)
        if workers > 1 and len(plans) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                records = list(pool.map(job, plans, chunksize=max(1, len(plans) // (4 * workers))))
        else:
            records = [job(p) for p in plans]
        report = ResidualReport(records)
    report.records.sort(key=lambda rec: rec.case_id)
    report.wall_time = time.perf_counter() - start
    return report
