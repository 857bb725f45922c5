"""Inertia-weight particle swarm optimization (minimization)."""

from __future__ import annotations

import copy
from dataclasses import dataclass, replace

import numpy as np

from ._optim import OptimizeResult, as_bounds, evaluate, write_trace_csv

DEFAULT_W = 0.7
DEFAULT_C = 1.5


@dataclass
class SwarmConfig:
    """Swarm hyperparameters.

    ``v_max`` defaults to ``0.2 * (hi - lo)`` per dimension; ``bounds`` may
    be one ``(lo, hi)`` pair shared by all dimensions.
    """

    dims: int
    bounds: np.ndarray
    n_particles: int = 30
    w: float = DEFAULT_W
    c1: float = DEFAULT_C
    c2: float = DEFAULT_C
    v_max: np.ndarray | None = None
    max_iters: int = 100
    seed: int = 0

    def __post_init__(self):
        self.bounds = as_bounds(self.bounds, self.dims)
        if self.n_particles < 2:
            raise ValueError("n_particles must be >= 2")
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("c1 and c2 must be non-negative")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        span = self.bounds[:, 1] - self.bounds[:, 0]
        if self.v_max is None:
            self.v_max = 0.2 * span
        else:
            self.v_max = np.broadcast_to(np.asarray(self.v_max, dtype=np.float64), (self.dims,)).copy()
        if np.any(self.v_max <= 0):
            raise ValueError("v_max must be positive")

    def with_params(self, w: float, c1: float, c2: float) -> "SwarmConfig":
        return replace(self, w=float(w), c1=float(c1), c2=float(c2))


@dataclass
class SwarmState:
    x: np.ndarray
    v: np.ndarray
    fx: np.ndarray
    pbest: np.ndarray
    pbest_val: np.ndarray
    gbest: np.ndarray
    gbest_val: float
    rng: np.random.Generator
    iteration: int = 0
    n_evals: int = 0
    nan_count: int = 0

    def snapshot(self) -> "SwarmState":
        return copy.deepcopy(self)


def init_swarm(cfg: SwarmConfig, objective, seed_points=None, rng=None) -> SwarmState:
    """Uniform random swarm inside the bounds, evaluated once.

    Rows of ``seed_points`` (clamped to the bounds) replace the first
    particles, so a known candidate is always part of the initial swarm.
    """
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    lo, hi = cfg.bounds[:, 0], cfg.bounds[:, 1]
    x = lo + rng.random((cfg.n_particles, cfg.dims)) * (hi - lo)
    v = (2.0 * rng.random((cfg.n_particles, cfg.dims)) - 1.0) * cfg.v_max
    if seed_points is not None:
        pts = np.atleast_2d(np.asarray(seed_points, dtype=np.float64))[: cfg.n_particles]
        x[: len(pts)] = np.clip(pts, lo, hi)
    fx, nans = evaluate(objective, x)
    best = int(np.argmin(fx))
    return SwarmState(
        x=x,
        v=v,
        fx=fx,
        pbest=x.copy(),
        pbest_val=fx.copy(),
        gbest=x[best].copy(),
        gbest_val=float(fx[best]),
        rng=rng,
        n_evals=cfg.n_particles,
        nan_count=nans,
    )


def step(state: SwarmState, cfg: SwarmConfig, objective) -> SwarmState:
    """Advance the swarm one iteration in place and return it.

    Velocities are clamped to ``+-v_max``; a particle leaving the box is put
    back on the boundary and that velocity component is zeroed. Personal and
    global bests change only on strict improvement.
    """
    n, d = state.x.shape
    r1 = state.rng.random((n, d))
    r2 = state.rng.random((n, d))
    v = (
        cfg.w * state.v
        + cfg.c1 * r1 * (state.pbest - state.x)
        + cfg.c2 * r2 * (state.gbest - state.x)
    )
    np.clip(v, -cfg.v_max, cfg.v_max, out=v)
    x = state.x + v
    lo, hi = cfg.bounds[:, 0], cfg.bounds[:, 1]
    outside = (x < lo) | (x > hi)
    if outside.any():
        x = np.clip(x, lo, hi)
        v[outside] = 0.0
    fx, nans = evaluate(objective, x)
    improved = fx < state.pbest_val
    state.pbest[improved] = x[improved]
    state.pbest_val[improved] = fx[improved]
    best = int(np.argmin(state.pbest_val))
    if state.pbest_val[best] < state.gbest_val:
        state.gbest = state.pbest[best].copy()
        state.gbest_val = float(state.pbest_val[best])
    state.x, state.v, state.fx = x, v, fx
    state.iteration += 1
    state.n_evals += n
    state.nan_count += nans
    return state


def optimize(cfg: SwarmConfig, objective, seed_points=None) -> OptimizeResult:
    """Run ``cfg.max_iters`` steps; the trace holds gBest value after each step."""
    state = init_swarm(cfg, objective, seed_points=seed_points)
    trace = np.empty(cfg.max_iters)
    for it in range(cfg.max_iters):
        step(state, cfg, objective)
        trace[it] = state.gbest_val
    return OptimizeResult(
        x=state.gbest.copy(),
        fun=state.gbest_val,
        trace=trace,
        n_evals=state.n_evals,
        nan_count=state.nan_count,
        info={"w": cfg.w, "c1": cfg.c1, "c2": cfg.c2},
    )


def trace_to_csv(trace, path) -> None:
    write_trace_csv(trace, path, header=("iteration", "best_value"))
