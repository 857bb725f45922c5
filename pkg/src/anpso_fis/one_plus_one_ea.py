"""Elitist (1+1) evolutionary algorithm with 1/5-success-rule step sizes.

Variant ``v1`` grows sigma by ``F_UP`` on success and shrinks it by
``F_DOWN`` on failure; the pair balances when one in five offspring
succeeds. Variant ``v2`` only grows on success and keeps sigma otherwise.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ._optim import as_bounds, evaluate

V1 = "v1"
V2 = "v2"
F_UP = 1.5
F_DOWN = 1.5 ** -0.25
SIGMA_FLOOR = 1e-12


@dataclass
class EAConfig:
    dims: int
    generations: int = 100
    variant: str = V1
    sigma0: float = 1.0
    mutation_prob: float | None = None
    bounds: np.ndarray | None = None
    seed: int = 0

    def __post_init__(self):
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not self.sigma0 > 0:
            raise ValueError("sigma0 must be positive")
        if self.variant not in (V1, V2):
            raise ValueError(f"variant must be {V1!r} or {V2!r}")
        if self.mutation_prob is None:
            self.mutation_prob = 1.0 / self.dims
        if not 0.0 < self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must lie in (0, 1]")
        if self.bounds is not None:
            self.bounds = as_bounds(self.bounds, self.dims)


@dataclass
class EAState:
    x: np.ndarray
    fx: float
    sigma: float
    success_history: list[bool] = field(default_factory=list)


@dataclass
class EAResult:
    x: np.ndarray
    fx: float
    sigma_trace: np.ndarray
    trace: np.ndarray
    successes: np.ndarray
    n_evals: int
    initial_fx: float = float("nan")

    def __iter__(self):
        return iter((self.x, self.fx, self.sigma_trace))

    @property
    def success_rate(self) -> float:
        return float(np.mean(self.successes)) if len(self.successes) else 0.0

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["generation", "sigma", "best_value", "success"])
            for i, (s, v, ok) in enumerate(zip(self.sigma_trace, self.trace, self.successes), 1):
                writer.writerow([i, repr(float(s)), repr(float(v)), int(ok)])


def mutate(x, sigma: float, mutation_prob: float, rng, bounds=None) -> np.ndarray:
    """Gaussian perturbation of each gene with probability ``mutation_prob``.

    Both random draws are always made so the stream advances identically
    whatever the outcome.
    """
    x = np.asarray(x, dtype=np.float64)
    mask = np.asarray(rng.random(x.shape)) < mutation_prob
    g = np.asarray(rng.standard_normal(x.shape), dtype=np.float64)
    y = x + np.where(mask, sigma * g, 0.0)
    if bounds is not None:
        y = np.clip(y, bounds[:, 0], bounds[:, 1])
    return y


def adapt_sigma(sigma: float, success: bool, variant: str = V1) -> float:
    if success:
        new = sigma * F_UP
    elif variant == V1:
        new = sigma * F_DOWN
    elif variant == V2:
        new = sigma
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return max(new, SIGMA_FLOOR)


def run(objective, cfg: EAConfig, x0=None, rng=None, skip_unchanged: bool = False) -> EAResult:
    """Minimize ``objective`` for ``cfg.generations`` generations.

    The offspring replaces the parent only on strict improvement; a NaN
    offspring counts as a failure. Without ``x0`` the start point is drawn
    uniformly inside ``cfg.bounds``. With ``skip_unchanged`` an offspring
    identical to its parent (no gene mutated, or clamped back) is scored as
    a failure without calling a deterministic ``objective``.
    """
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    if x0 is None:
        if cfg.bounds is None:
            raise ValueError("x0 is required when no bounds are given")
        lo, hi = cfg.bounds[:, 0], cfg.bounds[:, 1]
        x0 = lo + rng.random(cfg.dims) * (hi - lo)
    x = np.array(x0, dtype=np.float64).reshape(cfg.dims)
    if cfg.bounds is not None:
        x = np.clip(x, cfg.bounds[:, 0], cfg.bounds[:, 1])
    fx = float(evaluate(objective, x[None])[0][0])
    state = EAState(x=x, fx=fx, sigma=cfg.sigma0)
    n_evals = 1
    sigmas = np.empty(cfg.generations)
    best = np.empty(cfg.generations)
    for gen in range(cfg.generations):
        y = mutate(state.x, state.sigma, cfg.mutation_prob, rng, cfg.bounds)
        if skip_unchanged and np.array_equal(y, state.x):
            fy = state.fx
        else:
            fy = float(evaluate(objective, y[None])[0][0])
            n_evals += 1
        success = fy < state.fx
        if success:
            state.x, state.fx = y, fy
        state.sigma = adapt_sigma(state.sigma, success, cfg.variant)
        state.success_history.append(bool(success))
        sigmas[gen] = state.sigma
        best[gen] = state.fx
    return EAResult(
        x=state.x,
        fx=state.fx,
        sigma_trace=sigmas,
        trace=best,
        successes=np.array(state.success_history, dtype=bool),
        n_evals=n_evals,
        initial_fx=fx,
    )
