import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anpso_fis import baselines as bl
from anpso_fis.benchfuncs import rastrigin, sphere


class Recorder:
    """Objective wrapper that keeps every evaluated point."""

    def __init__(self, f):
        self.f = f
        self.points = []

    def __call__(self, x):
        self.points.append(np.array(x, copy=True))
        return self.f(x)


BOX2 = [(-5.0, 5.0)] * 2


@pytest.mark.parametrize(
    "method, evals, threshold",
    [(bl.GA, 2000, 1e-2), (bl.DE, 2000, 1e-3), (bl.HS, 5000, 1e-2)],
)
def test_sphere_thresholds(method, evals, threshold):
    res = bl.optimize(bl.BaselineConfig(method=method, max_evals=evals, seed=0), sphere, BOX2)
    assert res.fun <= threshold
    assert res.n_evals == evals


def test_ga_without_variation_collapses_onto_the_elite():
    rec = Recorder(sphere)
    cfg = bl.BaselineConfig(method=bl.GA, crossover_rate=0.0, mutation_rate=0.0, max_evals=1000, seed=1)
    res = bl.ga_optimize(rec, BOX2, cfg)
    assert np.all(np.diff(res.trace) <= 0)
    initial = np.array(rec.points[:20])
    assert res.fun == min(sphere(p) for p in initial)
    # every child is a copy of some initial point, and the last generation is all elite
    assert all(any(np.array_equal(p, q) for q in initial) for p in rec.points[20:])
    assert all(np.array_equal(p, res.x) for p in rec.points[-19:])


def test_de_f0_cr0_changes_one_gene_from_a_member():
    rec = Recorder(sphere)
    cfg = bl.BaselineConfig(method=bl.DE, population=6, max_evals=12, F=0.0, CR=0.0, seed=2)
    bl.de_optimize(rec, [(-1.0, 1.0)] * 4, cfg)
    pop = np.array(rec.points[:6])
    for i, trial in enumerate(rec.points[6:]):
        diff = np.flatnonzero(trial != pop[i])
        assert len(diff) <= 1
        for j in diff:
            assert trial[j] in pop[:, j]


def test_de_slots_never_worsen():
    rec = Recorder(rastrigin)
    cfg = bl.BaselineConfig(method=bl.DE, population=5, max_evals=200, seed=3)
    bl.de_optimize(rec, [(-5.12, 5.12)] * 3, cfg)
    slots = [rastrigin(p) for p in rec.points[:5]]
    for g in range(1, 40):
        for i, trial in enumerate(rec.points[5 * g : 5 * g + 5]):
            new = min(slots[i], rastrigin(trial))
            assert new <= slots[i]
            slots[i] = new


def test_hs_closed_recombination():
    rec = Recorder(sphere)
    cfg = bl.BaselineConfig(method=bl.HS, population=5, max_evals=300, hmcr=1.0, par=0.0, seed=4)
    res = bl.hs_optimize(rec, [(-5.0, 5.0)] * 3, cfg)
    initial = np.array(rec.points[:5])
    for p in rec.points[5:]:
        assert all(p[j] in initial[:, j] for j in range(3))
    assert np.all(np.diff(res.trace) <= 0)


def test_hs_memory_of_one():
    cfg = bl.BaselineConfig(method=bl.HS, population=1, max_evals=500, seed=5)
    res = bl.hs_optimize(sphere, BOX2, cfg)
    assert np.isfinite(res.fun)
    assert len(res.trace) == 499
    assert np.all(np.diff(res.trace) <= 0)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(bl.METHODS), st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_candidates_within_bounds_and_trace_monotone(method, seed, dims):
    rec = Recorder(rastrigin)
    box = [(-1.0, 2.0)] * dims
    res = bl.optimize(bl.BaselineConfig(method=method, population=6, max_evals=120, seed=seed), rec, box)
    pts = np.array(rec.points)
    assert np.all((pts >= -1.0) & (pts <= 2.0))
    assert np.all(np.diff(res.trace) <= 0)
    assert len(rec.points) == res.n_evals == 120


@pytest.mark.parametrize("method", bl.METHODS)
def test_same_seed_same_run(method):
    cfg = bl.BaselineConfig(method=method, max_evals=400, seed=7)
    a = bl.optimize(cfg, rastrigin, [(-5.12, 5.12)] * 4)
    b = bl.optimize(cfg, rastrigin, [(-5.12, 5.12)] * 4)
    np.testing.assert_array_equal(a.trace, b.trace)
    np.testing.assert_array_equal(a.x, b.x)
    assert a.info == cfg.to_dict()


@pytest.mark.parametrize("method", bl.METHODS)
def test_nan_counts_as_infinity(method):
    f = lambda x: float("nan") if x[0] > 0 else float(x @ x)  # noqa: E731
    res = bl.optimize(bl.BaselineConfig(method=method, max_evals=200, seed=0), f, BOX2)
    assert np.isfinite(res.fun)
    assert res.nan_count > 0


@pytest.mark.parametrize("method", bl.METHODS)
def test_seed_point_is_kept(method):
    res = bl.optimize(bl.BaselineConfig(method=method, max_evals=40, seed=0), sphere, BOX2, seed_points=[[0.0, 0.0]])
    assert res.fun == 0.0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(method="pso"),
        dict(method=bl.DE, population=3),
        dict(crossover_rate=1.5),
        dict(CR=-0.1),
        dict(F=2.5),
        dict(hmcr=2.0),
        dict(max_evals=5),
    ],
)
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        bl.BaselineConfig(**kwargs)
