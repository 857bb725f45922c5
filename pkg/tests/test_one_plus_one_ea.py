import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anpso_fis import one_plus_one_ea as ea
from anpso_fis.benchfuncs import sphere

from oracles import reference_one_plus_one


class ScriptedRNG:
    """Generator stand-in returning queued arrays for random / standard_normal."""

    def __init__(self, uniforms, normals):
        self.u = list(uniforms)
        self.n = list(normals)

    def random(self, shape):
        return np.asarray(self.u.pop(0), dtype=float).reshape(shape)

    def standard_normal(self, shape):
        return np.asarray(self.n.pop(0), dtype=float).reshape(shape)


def test_mutation_without_probability_is_identity():
    x = np.array([0.1, -2.0, 3.5])
    y = ea.mutate(x, 5.0, 0.0, np.random.default_rng(0))
    np.testing.assert_array_equal(x, y)


def test_vanishing_step_is_identity():
    x = np.array([0.1, -2.0, 3.5])
    y = ea.mutate(x, 1e-300, 1.0, np.random.default_rng(0))
    assert np.max(np.abs(x - y)) <= 1e-12


def test_scripted_single_gene_mutation():
    y = ea.mutate(np.array([0.5]), 0.1, 1.0, ScriptedRNG([[0.0]], [[2.0]]))
    assert y[0] == pytest.approx(0.7, abs=1e-15)


def test_mutation_is_clamped():
    bounds = np.array([[0.0, 1.0]])
    y = ea.mutate(np.array([0.9]), 1.0, 1.0, ScriptedRNG([[0.0]], [[5.0]]), bounds)
    assert y[0] == 1.0


def test_adapt_sigma_examples():
    assert ea.adapt_sigma(0.1, True, ea.V1) == pytest.approx(0.15)
    assert ea.adapt_sigma(0.1, False, ea.V1) == pytest.approx(0.090360, abs=5e-7)
    assert ea.adapt_sigma(0.1, False, ea.V2) == 0.1
    assert ea.adapt_sigma(1e-13, False, ea.V1) == ea.SIGMA_FLOOR


def test_factors_balance_at_one_fifth():
    # one success and four failures leave sigma where it started
    s = ea.adapt_sigma(1.0, True)
    for _ in range(4):
        s = ea.adapt_sigma(s, False)
    assert s == pytest.approx(1.0, rel=1e-12)


def test_default_mutation_probability_is_one_over_n():
    assert ea.EAConfig(dims=3, generations=100).mutation_prob == pytest.approx(1 / 3)


def test_constant_objective_compounds_failures():
    cfg = ea.EAConfig(dims=4, generations=20, sigma0=0.5, seed=1)
    out = ea.run(lambda x: 1.0, cfg, x0=np.zeros(4))
    assert out.sigma_trace[-1] == pytest.approx(0.5 * ea.F_DOWN**20, rel=1e-12)
    assert not out.successes.any()


def test_sphere_10d_reaches_threshold_with_all_genes_mutated():
    cfg = ea.EAConfig(dims=10, generations=5000, sigma0=1.0, mutation_prob=1.0,
                      bounds=np.tile([-5.0, 5.0], (10, 1)), seed=0)
    assert ea.run(sphere, cfg).fx <= 1e-6


def test_reference_es_reaches_same_threshold():
    x0 = np.random.default_rng(0).uniform(-5, 5, 10)
    assert reference_one_plus_one(lambda x: float(x @ x), x0, 1.0, 5000, 0, -5.0, 5.0) <= 1e-6


def test_nan_offspring_is_a_failure():
    f = lambda x: float("nan") if x[0] > 0.5 else float(x @ x)  # noqa: E731
    out = ea.run(f, ea.EAConfig(dims=1, generations=50, sigma0=1.0, mutation_prob=1.0), x0=[0.4])
    assert np.isfinite(out.fx)
    assert out.fx <= 0.16


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([ea.V1, ea.V2]), st.integers(1, 8))
def test_elitism_and_positive_sigma(seed, variant, dims):
    cfg = ea.EAConfig(dims=dims, generations=200, variant=variant, sigma0=0.5,
                      bounds=np.tile([-3.0, 3.0], (dims, 1)), seed=seed)
    out = ea.run(sphere, cfg)
    assert np.all(np.diff(out.trace) <= 0)
    assert out.trace[0] <= out.initial_fx
    assert np.all(out.sigma_trace >= ea.SIGMA_FLOOR)
    assert np.all((out.x >= -3.0) & (out.x <= 3.0))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=200), st.floats(1e-6, 10.0))
def test_v2_sigma_never_below_v1(flags, sigma0):
    s1 = s2 = sigma0
    for ok in flags:
        s1 = ea.adapt_sigma(s1, ok, ea.V1)
        s2 = ea.adapt_sigma(s2, ok, ea.V2)
        assert s2 >= s1


def test_same_seed_same_run():
    cfg = ea.EAConfig(dims=5, generations=300, bounds=np.tile([-5.0, 5.0], (5, 1)), seed=9)
    a, b = ea.run(sphere, cfg), ea.run(sphere, cfg)
    np.testing.assert_array_equal(a.trace, b.trace)
    np.testing.assert_array_equal(a.sigma_trace, b.sigma_trace)


def test_skip_unchanged_saves_evaluations_without_changing_the_run():
    cfg = ea.EAConfig(dims=3, generations=200, sigma0=0.3, bounds=np.tile([-5.0, 5.0], (3, 1)), seed=4)
    a = ea.run(sphere, cfg)
    b = ea.run(sphere, cfg, skip_unchanged=True)
    np.testing.assert_array_equal(a.trace, b.trace)
    assert b.n_evals < a.n_evals


@pytest.mark.parametrize(
    "kwargs",
    [dict(generations=0), dict(sigma0=0.0), dict(mutation_prob=0.0), dict(mutation_prob=1.5), dict(variant="v3")],
)
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        ea.EAConfig(dims=2, **kwargs)


def test_csv_export(tmp_path):
    out = ea.run(sphere, ea.EAConfig(dims=2, generations=5, bounds=np.tile([-1.0, 1.0], (2, 1))))
    path = tmp_path / "ea.csv"
    out.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "generation,sigma,best_value,success"
    assert len(lines) == 6
