"""GA, DE and harmony search over a box, with the same result type as PSO.

Each optimizer spends exactly ``cfg.max_evals`` objective evaluations
(the initial population included) so methods compare at equal budgets.
The trace records the best value after every generation (GA, DE) or
every improvisation (HS).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ._optim import OptimizeResult, as_bounds, evaluate

GA = "ga"
DE = "de"
HS = "hs"
METHODS = (GA, DE, HS)


@dataclass(frozen=True)
class BaselineConfig:
    method: str = DE
    population: int = 20
    max_evals: int = 2000
    # GA
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    mutation_scale: float = 0.1
    # DE
    F: float = 0.5
    CR: float = 0.9
    # HS (population is the harmony memory size)
    hmcr: float = 0.9
    par: float = 0.3
    bandwidth: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        min_pop = 4 if self.method == DE else 1
        if self.population < min_pop:
            raise ValueError(f"{self.method} needs population >= {min_pop}")
        if self.max_evals < self.population:
            raise ValueError("max_evals must cover the initial population")
        for name in ("crossover_rate", "mutation_rate", "CR", "hmcr", "par"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not 0.0 <= self.F <= 2.0:
            raise ValueError("F must lie in [0, 2]")
        if self.mutation_scale < 0 or self.bandwidth < 0:
            raise ValueError("mutation_scale and bandwidth must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)


def _init_population(bounds, n, rng, seed_points):
    lo, hi = bounds[:, 0], bounds[:, 1]
    pop = lo + rng.random((n, bounds.shape[0])) * (hi - lo)
    if seed_points is not None:
        pts = np.atleast_2d(np.asarray(seed_points, dtype=np.float64))[:n]
        pop[: len(pts)] = np.clip(pts, lo, hi)
    return pop


def _result(pop, vals, trace, n_evals, nans, cfg) -> OptimizeResult:
    best = int(np.argmin(vals))
    return OptimizeResult(
        x=pop[best].copy(),
        fun=float(vals[best]),
        trace=np.asarray(trace, dtype=np.float64),
        n_evals=n_evals,
        nan_count=nans,
        info=cfg.to_dict(),
    )


def _tournament(vals, rng, k):
    # k pairwise size-2 tournaments; ties go to the first draw
    a = rng.integers(0, len(vals), k)
    b = rng.integers(0, len(vals), k)
    return np.where(vals[b] < vals[a], b, a)


def ga_optimize(objective, bounds, cfg: BaselineConfig, seed_points=None) -> OptimizeResult:
    """Generational GA: size-2 tournaments, uniform crossover, gaussian
    per-gene mutation and one elite carried over unchanged."""
    bounds = as_bounds(bounds)
    lo, hi = bounds[:, 0], bounds[:, 1]
    n, d = cfg.population, bounds.shape[0]
    rng = np.random.default_rng(cfg.seed)
    pop = _init_population(bounds, n, rng, seed_points)
    vals, nans = evaluate(objective, pop)
    n_evals = n
    trace = []
    while n_evals < cfg.max_evals:
        k = min(n - 1, cfg.max_evals - n_evals) if n > 1 else min(1, cfg.max_evals - n_evals)
        p1 = pop[_tournament(vals, rng, k)]
        p2 = pop[_tournament(vals, rng, k)]
        cross = rng.random(k) < cfg.crossover_rate
        genes = rng.random((k, d)) < 0.5
        children = np.where(cross[:, None] & genes, p2, p1)
        mutate = rng.random((k, d)) < cfg.mutation_rate
        noise = rng.standard_normal((k, d)) * cfg.mutation_scale * (hi - lo)
        children = np.clip(children + np.where(mutate, noise, 0.0), lo, hi)
        child_vals, bad = evaluate(objective, children)
        n_evals += k
        nans += bad
        elite = int(np.argmin(vals))
        if n > 1:
            # elite plus children; a partial last generation keeps the best of the old rest
            rest = np.argsort(np.delete(vals, elite), kind="stable")
            keep = np.delete(np.arange(n), elite)[rest[: n - 1 - k]]
            pop = np.vstack([pop[elite : elite + 1], children, pop[keep]])
            vals = np.concatenate([vals[elite : elite + 1], child_vals, vals[keep]])
        elif child_vals[0] < vals[0]:
            pop, vals = children, child_vals
        trace.append(float(vals.min()))
    return _result(pop, vals, trace, n_evals, nans, cfg)


def de_optimize(objective, bounds, cfg: BaselineConfig, seed_points=None) -> OptimizeResult:
    """DE/rand/1/bin with greedy one-to-one replacement."""
    bounds = as_bounds(bounds)
    lo, hi = bounds[:, 0], bounds[:, 1]
    n, d = cfg.population, bounds.shape[0]
    rng = np.random.default_rng(cfg.seed)
    pop = _init_population(bounds, n, rng, seed_points)
    vals, nans = evaluate(objective, pop)
    n_evals = n
    trace = []
    while n_evals < cfg.max_evals:
        k = min(n, cfg.max_evals - n_evals)
        trials = np.empty((k, d))
        for i in range(k):
            others = rng.choice(np.delete(np.arange(n), i), 3, replace=False)
            a, b, c = pop[others]
            mutant = a + cfg.F * (b - c)
            cross = rng.random(d) < cfg.CR
            cross[rng.integers(d)] = True
            trials[i] = np.where(cross, mutant, pop[i])
        np.clip(trials, lo, hi, out=trials)
        trial_vals, bad = evaluate(objective, trials)
        n_evals += k
        nans += bad
        better = trial_vals <= vals[:k]
        pop[:k][better] = trials[better]
        vals[:k][better] = trial_vals[better]
        trace.append(float(vals.min()))
    return _result(pop, vals, trace, n_evals, nans, cfg)


def hs_optimize(objective, bounds, cfg: BaselineConfig, seed_points=None) -> OptimizeResult:
    """Harmony search: memory consideration, pitch adjustment, random
    selection; a new harmony replaces the worst one if strictly better."""
    bounds = as_bounds(bounds)
    lo, hi = bounds[:, 0], bounds[:, 1]
    n, d = cfg.population, bounds.shape[0]
    bw = cfg.bandwidth * (hi - lo)
    rng = np.random.default_rng(cfg.seed)
    memory = _init_population(bounds, n, rng, seed_points)
    vals, nans = evaluate(objective, memory)
    n_evals = n
    trace = []
    while n_evals < cfg.max_evals:
        use_memory = rng.random(d) < cfg.hmcr
        picks = memory[rng.integers(0, n, d), np.arange(d)]
        adjust = rng.random(d) < cfg.par
        shift = (2.0 * rng.random(d) - 1.0) * bw
        fresh = lo + rng.random(d) * (hi - lo)
        new = np.where(use_memory, picks + np.where(adjust, shift, 0.0), fresh)
        new = np.clip(new, lo, hi)
        val, bad = evaluate(objective, new[None])
        n_evals += 1
        nans += bad
        worst = int(np.argmax(vals))
        if val[0] < vals[worst]:
            memory[worst] = new
            vals[worst] = val[0]
        trace.append(float(vals.min()))
    return _result(memory, vals, trace, n_evals, nans, cfg)


_DISPATCH = {GA: ga_optimize, DE: de_optimize, HS: hs_optimize}


def optimize(cfg: BaselineConfig, objective, bounds, seed_points=None) -> OptimizeResult:
    return _DISPATCH[cfg.method](objective, bounds, cfg, seed_points=seed_points)
