"""Plumbing shared by every optimizer: bounds, batch evaluation, results."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


def as_bounds(bounds, dims: int | None = None) -> np.ndarray:
    """Normalize ``bounds`` to a float array of shape ``(dims, 2)``.

    A single ``(lo, hi)`` pair is broadcast to ``dims`` dimensions.
    """
    b = np.asarray(bounds, dtype=np.float64)
    if b.ndim == 1:
        if b.shape != (2,) or dims is None:
            raise ValueError("a single (lo, hi) pair needs an explicit dims")
        b = np.tile(b, (dims, 1))
    if b.ndim != 2 or b.shape[1] != 2:
        raise ValueError(f"bounds must have shape (dims, 2), got {b.shape}")
    if dims is not None and b.shape[0] != dims:
        raise ValueError(f"bounds describe {b.shape[0]} dims, expected {dims}")
    if np.any(b[:, 0] >= b[:, 1]):
        raise ValueError("every lower bound must be strictly below its upper bound")
    return b


def evaluate(objective, X: np.ndarray) -> tuple[np.ndarray, int]:
    """Evaluate each row of ``X``; NaN values become ``+inf``.

    Objectives carrying a truthy ``batched`` attribute receive the whole
    matrix at once. Returns the values and the number of NaNs replaced.
    """
    if getattr(objective, "batched", False):
        vals = np.asarray(objective(X), dtype=np.float64).reshape(-1)
    else:
        vals = np.array([float(objective(row)) for row in X], dtype=np.float64)
    bad = np.isnan(vals)
    if bad.any():
        vals[bad] = np.inf
    return vals, int(bad.sum())


@dataclass
class OptimizeResult:
    """Outcome of one optimizer run (shared by PSO, ANPSO, GA, DE and HS)."""

    x: np.ndarray
    fun: float
    trace: np.ndarray
    n_evals: int
    nan_count: int = 0
    info: dict = field(default_factory=dict)

    def __iter__(self):
        # (best point, best value, trace) unpacking
        return iter((self.x, self.fun, self.trace))


def write_trace_csv(trace, path, header=("iteration", "best_value")) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i, v in enumerate(trace, start=1):
            writer.writerow([i, repr(float(v))])
