"""Batched test functions for optimizer sanity runs."""

from __future__ import annotations

import numpy as np


def _batched(fn):
    fn.batched = True
    return fn


@_batched
def sphere(X):
    X = np.asarray(X, dtype=np.float64)
    return np.sum(X * X, axis=-1)


@_batched
def rastrigin(X):
    X = np.asarray(X, dtype=np.float64)
    return 10.0 * X.shape[-1] + np.sum(X * X - 10.0 * np.cos(2.0 * np.pi * X), axis=-1)


SUITES = {
    "sphere": (sphere, (-5.0, 5.0)),
    "rastrigin": (rastrigin, (-5.12, 5.12)),
}
