"""Adaptive PSO: (w, c1, c2) re-tuned online by a (1+1)-EA.

Every ``retune_period`` iterations the swarm is frozen and a (1+1)-EA
searches the control-parameter box. A candidate triple is scored by a probe:
a deep copy of the swarm runs ``probe_iters`` steps under that triple and the
resulting global-best value is its fitness. Each probe restarts from a copy
of the snapshot's generator, so all candidates of one retune see the same
random numbers and the incumbent triple reproduces what the main loop would
have done.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import one_plus_one_ea as ea
from ._optim import OptimizeResult
from .pso import SwarmConfig, SwarmState, init_swarm, step

DEFAULT_PARAM_BOUNDS = ((0.4, 0.9), (0.5, 2.5), (0.5, 2.5))


@dataclass(frozen=True)
class MetaConfig:
    retune_period: int = 10
    ea_generations: int = 100
    ea_variant: str = ea.V1
    param_bounds: tuple = DEFAULT_PARAM_BOUNDS
    probe_iters: int = 10
    seed: int = 0
    # initial EA step size, in units of each parameter's range
    sigma0: float = 0.2
    # scales ea_generations for desk-scale runs
    budget_factor: float = 1.0

    def __post_init__(self):
        if self.retune_period < 1:
            raise ValueError("retune_period must be >= 1")
        if self.probe_iters < 1:
            raise ValueError("probe_iters must be >= 1")
        if self.ea_generations < 0:
            raise ValueError("ea_generations must be >= 0")
        if not 0 < self.budget_factor:
            raise ValueError("budget_factor must be positive")
        b = np.asarray(self.param_bounds, dtype=np.float64)
        if b.shape != (3, 2) or np.any(b[:, 0] >= b[:, 1]):
            raise ValueError("param_bounds must be three (lo, hi) pairs with lo < hi")

    @property
    def generations(self) -> int:
        if self.ea_generations == 0:
            return 0
        return max(1, int(round(self.ea_generations * self.budget_factor)))

    @property
    def bounds(self) -> np.ndarray:
        return np.asarray(self.param_bounds, dtype=np.float64)


@dataclass
class RetuneRecord:
    iteration: int
    old: tuple[float, float, float]
    new: tuple[float, float, float]
    probe_fitness: float
    incumbent_fitness: float
    n_evals: int

    @property
    def changed(self) -> bool:
        return self.old != self.new


@dataclass
class MetaTrace:
    records: list[RetuneRecord] = field(default_factory=list)
    best_trace: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def change_fraction(self) -> float:
        if not self.records:
            return 0.0
        return sum(r.changed for r in self.records) / len(self.records)

    @property
    def meta_evals(self) -> int:
        return sum(r.n_evals for r in self.records)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["iteration", "w", "c1", "c2", "probe_fitness"])
            for r in self.records:
                writer.writerow([r.iteration, *(repr(v) for v in r.new), repr(r.probe_fitness)])


@dataclass
class AdaptiveResult(OptimizeResult):
    meta_trace: MetaTrace | None = None


def meta_objective(
    candidate,
    snapshot: SwarmState,
    cfg: SwarmConfig,
    objective,
    probe_iters: int,
    rng: np.random.Generator | None = None,
) -> float:
    """Global-best value after ``probe_iters`` steps of a copy of the swarm.

    ``snapshot`` is never touched. Without ``rng`` the probe continues from a
    copy of the snapshot's own generator.
    """
    probe = snapshot.snapshot()
    if rng is not None:
        probe.rng = rng
    probe_cfg = cfg.with_params(*candidate)
    for _ in range(probe_iters):
        step(probe, probe_cfg, objective)
    return probe.gbest_val


def retune(
    state: SwarmState, cfg: SwarmConfig, meta: MetaConfig, objective
) -> tuple[SwarmConfig, RetuneRecord]:
    """Search (w, c1, c2) with the (1+1)-EA started at the current triple.

    The EA works in the unit cube mapped onto ``meta.param_bounds`` and is
    elitist over its start point, so the returned triple never probes worse
    than the incumbent.
    """
    bounds = meta.bounds
    lo, span = bounds[:, 0], bounds[:, 1] - bounds[:, 0]
    current = np.clip(np.array([cfg.w, cfg.c1, cfg.c2]), bounds[:, 0], bounds[:, 1])
    old = (float(cfg.w), float(cfg.c1), float(cfg.c2))
    n_probe = meta.probe_iters * state.x.shape[0]

    x0 = (current - lo) / span

    def to_params(u):
        if np.array_equal(u, x0):
            return current
        return np.clip(lo + u * span, bounds[:, 0], bounds[:, 1])

    def fitness(u):
        return meta_objective(to_params(u), state, cfg, objective, meta.probe_iters)

    if meta.generations == 0:
        f0 = fitness(x0)
        new = tuple(float(v) for v in current)
        record = RetuneRecord(state.iteration, old, new, f0, f0, n_probe)
        return cfg.with_params(*new), record

    ea_cfg = ea.EAConfig(
        dims=3,
        generations=meta.generations,
        variant=meta.ea_variant,
        sigma0=meta.sigma0,
        bounds=np.tile([0.0, 1.0], (3, 1)),
        seed=meta.seed,
    )
    rng = np.random.default_rng([meta.seed, state.iteration])
    result = ea.run(fitness, ea_cfg, x0=x0, rng=rng, skip_unchanged=True)
    new = tuple(float(v) for v in to_params(result.x))
    record = RetuneRecord(
        iteration=state.iteration,
        old=old,
        new=new,
        probe_fitness=float(result.fx),
        incumbent_fitness=float(result.initial_fx),
        n_evals=result.n_evals * n_probe,
    )
    return cfg.with_params(*new), record


def optimize_adaptive(
    cfg: SwarmConfig, meta: MetaConfig, objective, seed_points=None
) -> AdaptiveResult:
    """PSO whose control parameters are replaced by :func:`retune` every period.

    With ``retune_period > cfg.max_iters`` this reproduces
    :func:`anpso_fis.pso.optimize` exactly.
    """
    state = init_swarm(cfg, objective, seed_points=seed_points)
    current = cfg
    trace = np.empty(cfg.max_iters)
    meta_trace = MetaTrace()
    for it in range(1, cfg.max_iters + 1):
        step(state, current, objective)
        trace[it - 1] = state.gbest_val
        if it % meta.retune_period == 0:
            current, record = retune(state, current, meta, objective)
            meta_trace.records.append(record)
    meta_trace.best_trace = trace
    return AdaptiveResult(
        x=state.gbest.copy(),
        fun=state.gbest_val,
        trace=trace,
        n_evals=state.n_evals,
        nan_count=state.nan_count,
        info={"meta_evals": meta_trace.meta_evals, "w": current.w, "c1": current.c1, "c2": current.c2},
        meta_trace=meta_trace,
    )
