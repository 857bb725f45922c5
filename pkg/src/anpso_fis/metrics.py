"""Error and correlation metrics used to report results."""

from __future__ import annotations

import numpy as np


def _pair(pred, target):
    p = np.asarray(pred, dtype=np.float64).reshape(-1)
    t = np.asarray(target, dtype=np.float64).reshape(-1)
    if p.shape != t.shape:
        raise ValueError(f"length mismatch: {p.size} predictions vs {t.size} targets")
    if p.size == 0:
        raise ValueError("empty input")
    return p, t


def mse(pred, target) -> float:
    p, t = _pair(pred, target)
    return float(np.mean((p - t) ** 2))


def rmse(pred, target) -> float:
    return float(np.sqrt(mse(pred, target)))


def r_value(pred, target, return_flag: bool = False):
    """Pearson correlation between predictions and targets.

    A constant vector makes the coefficient undefined; 0.0 is returned and,
    with ``return_flag``, the flag is ``True``.
    """
    p, t = _pair(pred, target)
    if p.size < 2:
        raise ValueError("r_value needs at least two samples")
    dp = p - p.mean()
    dt = t - t.mean()
    denom = np.sqrt(np.dot(dp, dp) * np.dot(dt, dt))
    if not np.isfinite(denom) or denom == 0.0:
        return (0.0, True) if return_flag else 0.0
    r = float(np.clip(np.dot(dp, dt) / denom, -1.0, 1.0))
    return (r, False) if return_flag else r
