import numpy as np
import pytest

from anpso_fis import anpso
from anpso_fis.benchfuncs import rastrigin, sphere
from anpso_fis.pso import SwarmConfig, init_swarm, optimize, step


def _swarm(dims=5, seed=0, iters=10, f=rastrigin, bounds=(-5.12, 5.12)):
    cfg = SwarmConfig(dims=dims, bounds=bounds, n_particles=12, max_iters=iters, seed=seed)
    state = init_swarm(cfg, f)
    for _ in range(iters):
        step(state, cfg, f)
    return cfg, state


def test_probe_on_constant_objective_returns_gbest():
    const = lambda x: 2.5  # noqa: E731
    cfg, state = _swarm(f=const)
    for cand in [(0.4, 0.5, 0.5), (0.9, 2.5, 2.5), (0.7, 1.5, 1.5)]:
        assert anpso.meta_objective(cand, state, cfg, const, 5) == state.gbest_val


def test_probe_never_mutates_snapshot():
    cfg, state = _swarm()
    x, v, rng_state = state.x.copy(), state.v.copy(), state.rng.bit_generator.state
    anpso.meta_objective((0.5, 2.0, 1.0), state, cfg, rastrigin, 10)
    np.testing.assert_array_equal(state.x, x)
    np.testing.assert_array_equal(state.v, v)
    assert state.rng.bit_generator.state == rng_state


def test_incumbent_probe_equals_main_loop():
    cfg, state = _swarm()
    probe = anpso.meta_objective((cfg.w, cfg.c1, cfg.c2), state, cfg, rastrigin, 7)
    main = state.snapshot()
    for _ in range(7):
        step(main, cfg, rastrigin)
    assert probe == main.gbest_val


def test_probe_on_converged_sphere_cannot_worsen():
    cfg, state = _swarm(dims=2, iters=150, f=sphere, bounds=(-5.0, 5.0))
    assert state.gbest_val <= 1e-9
    for cand in [(0.4, 0.5, 2.5), (0.9, 2.5, 0.5)]:
        assert anpso.meta_objective(cand, state, cfg, sphere, 10) <= state.gbest_val


def test_zero_generations_keeps_config():
    cfg, state = _swarm()
    new_cfg, rec = anpso.retune(state, cfg, anpso.MetaConfig(ea_generations=0), rastrigin)
    assert (new_cfg.w, new_cfg.c1, new_cfg.c2) == (cfg.w, cfg.c1, cfg.c2)
    assert not rec.changed


@pytest.mark.parametrize("seed", range(5))
def test_retune_is_elitist_over_incumbent(seed):
    cfg, state = _swarm(seed=seed, iters=20)
    meta = anpso.MetaConfig(ea_generations=15, probe_iters=5, seed=seed)
    new_cfg, rec = anpso.retune(state, cfg, meta, rastrigin)
    incumbent = anpso.meta_objective((cfg.w, cfg.c1, cfg.c2), state, cfg, rastrigin, 5)
    chosen = anpso.meta_objective((new_cfg.w, new_cfg.c1, new_cfg.c2), state, cfg, rastrigin, 5)
    assert rec.incumbent_fitness == incumbent
    assert rec.probe_fitness == chosen
    assert chosen <= incumbent
    lo, hi = meta.bounds[:, 0], meta.bounds[:, 1]
    assert np.all((np.array(rec.new) >= lo) & (np.array(rec.new) <= hi))


def test_long_retune_period_reproduces_plain_pso():
    cfg = SwarmConfig(dims=4, bounds=(-5.12, 5.12), max_iters=40, seed=2)
    plain = optimize(cfg, rastrigin)
    adaptive = anpso.optimize_adaptive(cfg, anpso.MetaConfig(retune_period=41), rastrigin)
    np.testing.assert_array_equal(plain.trace, adaptive.trace)
    assert plain.fun == adaptive.fun
    assert adaptive.meta_trace.records == []


def test_record_count_and_trace_properties():
    cfg = SwarmConfig(dims=3, bounds=(-5.12, 5.12), n_particles=10, max_iters=55, seed=1)
    meta = anpso.MetaConfig(ea_generations=4, probe_iters=2, seed=1)
    res = anpso.optimize_adaptive(cfg, meta, rastrigin)
    assert len(res.meta_trace.records) == 55 // 10
    assert np.all(np.diff(res.trace) <= 0)
    for r in res.meta_trace.records:
        assert 0.4 <= r.new[0] <= 0.9 and 0.5 <= r.new[1] <= 2.5 and 0.5 <= r.new[2] <= 2.5
    assert res.info["meta_evals"] == res.meta_trace.meta_evals > 0


def test_fifty_records_for_five_hundred_iterations():
    cfg = SwarmConfig(dims=2, bounds=(-5.0, 5.0), n_particles=4, max_iters=500, seed=0)
    res = anpso.optimize_adaptive(cfg, anpso.MetaConfig(ea_generations=1, probe_iters=1), sphere)
    assert len(res.meta_trace.records) == 50


def test_adaptive_run_is_reproducible():
    cfg = SwarmConfig(dims=3, bounds=(-5.12, 5.12), n_particles=8, max_iters=30, seed=4)
    meta = anpso.MetaConfig(ea_generations=5, probe_iters=3, seed=4)
    a = anpso.optimize_adaptive(cfg, meta, rastrigin)
    b = anpso.optimize_adaptive(cfg, meta, rastrigin)
    np.testing.assert_array_equal(a.trace, b.trace)
    assert [r.new for r in a.meta_trace.records] == [r.new for r in b.meta_trace.records]


def test_budget_factor_scales_generations():
    assert anpso.MetaConfig(ea_generations=100, budget_factor=0.05).generations == 5
    assert anpso.MetaConfig(ea_generations=100, budget_factor=0.001).generations == 1
    assert anpso.MetaConfig(ea_generations=0, budget_factor=0.5).generations == 0


@pytest.mark.parametrize(
    "kwargs",
    [dict(retune_period=0), dict(probe_iters=0), dict(param_bounds=((0.9, 0.4), (0.5, 2.5), (0.5, 2.5)))],
)
def test_invalid_meta_config(kwargs):
    with pytest.raises(ValueError):
        anpso.MetaConfig(**kwargs)


def test_meta_trace_csv(tmp_path):
    cfg = SwarmConfig(dims=2, bounds=(-5.0, 5.0), n_particles=4, max_iters=20, seed=0)
    res = anpso.optimize_adaptive(cfg, anpso.MetaConfig(ea_generations=3, probe_iters=2), sphere)
    path = tmp_path / "meta.csv"
    res.meta_trace.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,w,c1,c2,probe_fitness"
    assert [int(l.split(",")[0]) for l in lines[1:]] == [10, 20]
