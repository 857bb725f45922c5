"""ANFIS learning: least-squares consequents and gradient descent on premises.

Two schemes are provided. ``hybrid`` is the classic forward/backward pass:
consequents solved exactly by least squares each epoch, then one gradient
step on the membership parameters. ``backprop`` takes gradient steps on
both parameter groups.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .data import Dataset
from .fis import FISModel, forward, normalize_firing, rule_outputs

HYBRID = "hybrid"
BACKPROP = "backprop"
DIVERGENCE_RMSE = 1e6


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    learning_rate: float = 0.01
    mode: str = HYBRID
    seed: int = 0
    clip_norm: float = 1.0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if self.mode not in (HYBRID, BACKPROP):
            raise ValueError(f"mode must be {HYBRID!r} or {BACKPROP!r}, got {self.mode!r}")


@dataclass
class TrainTrace:
    rmse: np.ndarray
    model: FISModel
    wall_time: float
    diverged: bool = False
    # hybrid only: RMSE at the start of each epoch, before the consequent solve
    pre_solve_rmse: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def final_rmse(self) -> float:
        return float(self.rmse[-1]) if len(self.rmse) else float("nan")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["epoch", "train_rmse"])
            for i, v in enumerate(self.rmse, start=1):
                writer.writerow([i, repr(float(v))])


class LSEInfo(NamedTuple):
    rank: int
    n_coefficients: int

    @property
    def rank_deficient(self) -> bool:
        return self.rank < self.n_coefficients


def consequent_design(model: FISModel, X: np.ndarray, wbar: np.ndarray) -> np.ndarray:
    """Design matrix whose product with the flattened consequents gives the output."""
    if model.order == 0:
        return wbar.copy()
    xb = np.hstack([X, np.ones((X.shape[0], 1))])
    return (wbar[:, :, None] * xb[:, None, :]).reshape(X.shape[0], -1)


def _set_consequents(model: FISModel, theta: np.ndarray) -> None:
    if model.order == 0:
        model.consequents[:] = 0.0
        model.consequents[:, -1] = theta
    else:
        model.consequents[:] = theta.reshape(model.n_rules, model.n_inputs + 1)


def _solve(model: FISModel, X, y, wbar) -> LSEInfo:
    A = consequent_design(model, X, wbar)
    theta, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    _set_consequents(model, theta)
    return LSEInfo(int(rank), A.shape[1])


def lse_consequents(model: FISModel, data: Dataset, return_info: bool = False):
    """Least-squares consequents with the premises held fixed.

    Returns a new model. A rank-deficient design gets the minimum-norm
    solution; ``return_info=True`` also returns the rank so callers can
    tell.
    """
    out = model.copy()
    X = data.features
    wbar, _ = normalize_firing(K.firing(K.membership(X, out.kinds, out.params, out.n_mf), out.antecedents))
    info = _solve(out, X, data.targets, wbar)
    return (out, info) if return_info else out


def _output_gradients(fw, y_true):
    """dL/dy and dL/dw for L = mean squared error."""
    n = y_true.shape[0]
    dl_dy = 2.0 * (fw.y - y_true) / n
    total = fw.w.sum(axis=1)
    ok = ~fw.fallback
    safe = np.where(ok, total, 1.0)
    g_w = dl_dy[:, None] * (fw.f - fw.y[:, None]) / safe[:, None]
    g_w[~ok] = 0.0
    return dl_dy, g_w


def _premise_grad_from(model: FISModel, X, y_true, mu, dmu) -> np.ndarray:
    fw = forward(model, X, mu=mu)
    _, g_w = _output_gradients(fw, y_true)
    full = K.premise_grad(mu, dmu, model.antecedents, np.ascontiguousarray(g_w))
    return full[model.premise_mask()]


def premise_gradients(model: FISModel, data: Dataset) -> np.ndarray:
    """Gradient of the MSE with respect to :meth:`FISModel.premise_vector`.

    Ordering is input-major, MF-minor, parameter-minor. Piecewise-linear
    kinks contribute zero derivative exactly at the kink.
    """
    X = data.features
    mu, dmu = K.membership_grad(X, model.kinds, model.params, model.n_mf)
    return _premise_grad_from(model, X, data.targets, mu, dmu)


def consequent_gradients(model: FISModel, data: Dataset) -> np.ndarray:
    """Gradient of the MSE with respect to the consequent matrix (same shape)."""
    fw = forward(model, data.features)
    dl_dy, _ = _output_gradients(fw, data.targets)
    A = consequent_design(model, data.features, fw.wbar)
    g = A.T @ dl_dy
    out = np.zeros_like(model.consequents)
    if model.order == 0:
        out[:, -1] = g
    else:
        out[:] = g.reshape(out.shape)
    return out


def _clip(g: np.ndarray, max_norm: float) -> np.ndarray:
    norm = float(np.linalg.norm(g))
    if max_norm > 0 and norm > max_norm:
        return g * (max_norm / norm)
    return g


def _rmse(y, t) -> float:
    return float(np.sqrt(np.mean((y - t) ** 2)))


def train(model: FISModel, train_data: Dataset, cfg: TrainConfig = TrainConfig()) -> TrainTrace:
    """Fit ``model`` in place and return the per-epoch RMSE trace.

    In hybrid mode the recorded RMSE for an epoch is measured right after
    that epoch's consequent solve; a final solve after the last premise step
    leaves the returned model with optimal consequents for its premises.
    Training stops early, flagged as diverged, once the RMSE exceeds 1e6 or
    turns NaN.
    """
    t0 = time.perf_counter()
    X = train_data.features
    y = train_data.targets
    mask = model.premise_mask()
    history: list[float] = []
    pre_solve: list[float] = []
    diverged = False
    for _ in range(cfg.epochs):
        mu, dmu = K.membership_grad(X, model.kinds, model.params, model.n_mf)
        if cfg.mode == HYBRID:
            w = K.firing(mu, model.antecedents)
            wbar, _ = normalize_firing(w)
            pre_solve.append(_rmse(np.einsum("nr,nr->n", wbar, rule_outputs(model, X)), y))
            _solve(model, X, y, wbar)
        fw = forward(model, X, mu=mu)
        err = _rmse(fw.y, y)
        history.append(err)
        if not np.isfinite(err) or err > DIVERGENCE_RMSE:
            diverged = True
            break
        dl_dy, g_w = _output_gradients(fw, y)
        g_prem = K.premise_grad(mu, dmu, model.antecedents, np.ascontiguousarray(g_w))[mask]
        if cfg.mode == HYBRID:
            step = _clip(g_prem, cfg.clip_norm)
            model.params[mask] -= cfg.learning_rate * step
        else:
            A = consequent_design(model, X, fw.wbar)
            g_cons = A.T @ dl_dy
            step = _clip(np.concatenate([g_prem, g_cons]), cfg.clip_norm)
            model.params[mask] -= cfg.learning_rate * step[: g_prem.size]
            if model.order == 0:
                model.consequents[:, -1] -= cfg.learning_rate * step[g_prem.size :]
            else:
                model.consequents -= cfg.learning_rate * step[g_prem.size :].reshape(
                    model.consequents.shape
                )
        model.repair()
    if cfg.mode == HYBRID and not diverged:
        w = K.firing(K.membership(X, model.kinds, model.params, model.n_mf), model.antecedents)
        _solve(model, X, y, normalize_firing(w)[0])
    return TrainTrace(
        rmse=np.asarray(history),
        model=model,
        wall_time=time.perf_counter() - t0,
        diverged=diverged,
        pre_solve_rmse=np.asarray(pre_solve),
    )
