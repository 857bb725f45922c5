"""Optimizer sanity suites on closed-form test functions."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import anpso, baselines, pso
from . import one_plus_one_ea as ea
from .benchfuncs import SUITES, rastrigin, sphere


@dataclass
class BenchRow:
    suite: str
    method: str
    dims: int
    run: int
    seed: int
    budget: str
    best: float
    threshold: float | None = None
    extra: str = ""
    trace: np.ndarray | None = None

    @property
    def passed(self) -> bool | None:
        return None if self.threshold is None else bool(self.best <= self.threshold)


def sphere_suite(seed: int = 0) -> list[BenchRow]:
    """Each optimizer at the budget its threshold was calibrated for."""
    rows = []
    b2 = np.tile(SUITES["sphere"][1], (2, 1))
    res = pso.optimize(pso.SwarmConfig(dims=2, bounds=b2, n_particles=30, max_iters=200, seed=seed), sphere)
    rows.append(BenchRow("sphere", "pso", 2, 0, seed, "200 iters x 30", res.fun, 1e-4, trace=res.trace))
    # every gene mutated each generation: the isotropic (1+1)-ES form
    cfg = ea.EAConfig(dims=10, generations=5000, variant=ea.V1, sigma0=1.0, mutation_prob=1.0,
                      bounds=np.tile(SUITES["sphere"][1], (10, 1)), seed=seed)
    out = ea.run(sphere, cfg)
    rows.append(BenchRow("sphere", "ea-v1", 10, 0, seed, "5000 gens", out.fx, 1e-6,
                         extra=f"success_rate={out.success_rate:.4f}", trace=out.trace))
    for method, evals, thr in (("ga", 2000, 1e-2), ("de", 2000, 1e-3), ("hs", 5000, 1e-2)):
        bcfg = baselines.BaselineConfig(method=method, max_evals=evals, seed=seed)
        res = baselines.optimize(bcfg, sphere, b2)
        rows.append(BenchRow("sphere", method, 2, 0, seed, f"{evals} evals", res.fun, thr, trace=res.trace))
    return rows


def rastrigin_suite(seed: int = 0, runs: int = 10, dims: int = 10, max_iters: int = 500,
                    meta: anpso.MetaConfig | None = None) -> list[BenchRow]:
    """Plain PSO against ANPSO with paired seeds ``seed + r``."""
    meta = meta or anpso.MetaConfig()
    rows = []
    for r in range(runs):
        s = seed + r
        cfg = pso.SwarmConfig(dims=dims, bounds=SUITES["rastrigin"][1], n_particles=30, max_iters=max_iters, seed=s)
        plain = pso.optimize(cfg, rastrigin)
        adaptive = anpso.optimize_adaptive(cfg, anpso.MetaConfig(**{**meta.__dict__, "seed": s}), rastrigin)
        budget = f"{max_iters} iters x 30"
        rows.append(BenchRow("rastrigin", "pso", dims, r, s, budget, plain.fun, trace=plain.trace))
        rows.append(BenchRow("rastrigin", "anpso", dims, r, s, budget, adaptive.fun,
                             extra=f"change_fraction={adaptive.meta_trace.change_fraction:.4f}",
                             trace=adaptive.trace))
    return rows


def run_suite(name: str, seed: int = 0, runs: int | None = None) -> list[BenchRow]:
    if name == "sphere":
        return sphere_suite(seed)
    if name == "rastrigin":
        return rastrigin_suite(seed, runs=10 if runs is None else runs)
    raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")


def write_rows(rows: list[BenchRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["suite", "method", "dims", "run", "seed", "budget", "best_value", "threshold", "passed", "extra"])
        for r in rows:
            writer.writerow([
                r.suite, r.method, r.dims, r.run, r.seed, r.budget, repr(float(r.best)),
                "" if r.threshold is None else repr(r.threshold),
                "" if r.passed is None else int(r.passed), r.extra,
            ])


def render(rows: list[BenchRow]) -> str:
    lines = []
    for r in rows:
        verdict = "" if r.passed is None else ("  PASS" if r.passed else "  FAIL")
        thr = "" if r.threshold is None else f" (<= {r.threshold:g})"
        extra = f"  {r.extra}" if r.extra else ""
        lines.append(f"{r.method:<6} d={r.dims:<3} run={r.run:<3} {r.budget:<16} best={r.best:.6g}{thr}{verdict}{extra}")
    return "\n".join(lines) + "\n"
