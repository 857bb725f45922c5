import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from anpso_fis import tuner
from anpso_fis.fis import (
    FISError,
    FISModel,
    MembershipFunction,
    Rule,
    fire_rules,
    infer,
    mf_eval,
    predict,
)

from oracles import model_parts, sugeno

MF = MembershipFunction
unit = st.floats(0.0, 1.0, allow_nan=False)
anyx = st.floats(-10.0, 10.0, allow_nan=False)


def _one_input(mfs, rules):
    return FISModel.from_parts([mfs], rules)


def test_mf_examples():
    assert mf_eval(MF.gaussian(0.5, 0.1), 0.5) == 1.0
    assert mf_eval(MF.triangle(0.0, 0.5, 1.0), 0.25) == pytest.approx(0.5, abs=1e-15)
    assert mf_eval(MF.trapezoid(0.0, 0.2, 0.8, 1.0), 0.5) == 1.0


def test_mf_outside_support_is_zero():
    assert mf_eval(MF.triangle(0.0, 0.5, 1.0), 2.0) == 0.0
    assert mf_eval(MF.trapezoid(0.0, 0.2, 0.8, 1.0), -1.0) == 0.0


def test_mf_vectorized_matches_scalar():
    mf = MF.triangle(0.1, 0.4, 0.9)
    xs = np.linspace(-0.5, 1.5, 41)
    np.testing.assert_array_equal(mf_eval(mf, xs), [mf_eval(mf, x) for x in xs])


@pytest.mark.parametrize(
    "kind, params",
    [("triangle", (0.5, 0.2, 0.9)), ("trapezoid", (0, 0.5, 0.4, 1)), ("gaussian", (0.5, 0.0)),
     ("gaussian", (0.5,)), ("circle", (1, 2))],
)
def test_invalid_membership_functions_are_rejected(kind, params):
    with pytest.raises(FISError):
        MF(kind, params)


@st.composite
def membership_functions(draw):
    kind = draw(st.sampled_from(["triangle", "gaussian", "trapezoid"]))
    if kind == "gaussian":
        return MF.gaussian(draw(unit), draw(st.floats(1e-4, 2.0)))
    n = 3 if kind == "triangle" else 4
    return MF(kind, sorted(draw(st.lists(unit, min_size=n, max_size=n))))


@settings(max_examples=300, deadline=None)
@given(membership_functions(), anyx)
def test_degree_always_in_unit_interval(mf, x):
    d = mf_eval(mf, x)
    assert 0.0 <= d <= 1.0


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 0.9), st.floats(0.0, 1.0))
def test_triangle_with_b_equal_c_is_finite(a, x):
    d = mf_eval(MF.triangle(a, 1.0, 1.0), x)
    assert np.isfinite(d)
    if a < x < 1.0:
        assert d == pytest.approx((x - a) / (1.0 - a))


def test_fire_rules_examples():
    one = _one_input([MF.trapezoid(0, 0, 1, 1)], [Rule((0,), (0.0, 0.7))])
    f = fire_rules(one, [0.5])
    np.testing.assert_array_equal(f.raw, [1.0])
    np.testing.assert_array_equal(f.normalized, [1.0])
    assert not f.fallback


def _two_rule_model(d1, d2, r1, r2):
    # constant-degree sets on [0, 1]: a trapezoid scaled by nothing cannot
    # give 0.6, so use gaussians evaluated at a known distance instead
    s = 0.25
    x = 0.5
    c1 = x + s * np.sqrt(-2 * np.log(d1))
    c2 = x + s * np.sqrt(-2 * np.log(d2))
    model = FISModel.from_parts(
        [[MF.gaussian(c1, s), MF.gaussian(c2, s)]],
        [Rule((0,), (0.0, r1)), Rule((1,), (0.0, r2))],
    )
    return model, [x]


def test_normalization_examples():
    model, x = _two_rule_model(0.2, 0.2, 0.0, 1.0)
    f = fire_rules(model, x)
    np.testing.assert_allclose(f.raw, [0.2, 0.2], rtol=1e-12)
    np.testing.assert_allclose(f.normalized, [0.5, 0.5], rtol=1e-12)
    model, x = _two_rule_model(0.6, 0.2, 1.0, -1.0)
    f = fire_rules(model, x)
    np.testing.assert_allclose(f.normalized, [0.75, 0.25], rtol=1e-12)


def test_infer_examples():
    one = _one_input([MF.gaussian(0.5, 0.3)], [Rule((0,), (0.0, 0.7))])
    assert infer(one, [0.1]) == pytest.approx(0.7, abs=1e-15)
    model, x = _two_rule_model(0.2, 0.2, 0.0, 1.0)
    assert infer(model, x) == pytest.approx(0.5, abs=1e-12)
    model, x = _two_rule_model(0.6, 0.2, 1.0, -1.0)
    assert infer(model, x) == pytest.approx(0.5, abs=1e-12)


def test_zero_firing_falls_back_to_uniform():
    model = _one_input(
        [MF.triangle(0.0, 0.1, 0.2), MF.triangle(0.3, 0.4, 0.5)],
        [Rule((0,), (0.0, 1.0)), Rule((1,), (0.0, 3.0))],
    )
    f = fire_rules(model, [0.9])
    assert f.fallback
    np.testing.assert_array_equal(f.normalized, [0.5, 0.5])
    assert infer(model, [0.9]) == 2.0


def test_infer_rejects_wrong_width():
    model = tuner.default_model(3)
    with pytest.raises(FISError):
        infer(model, [0.1, 0.2])


def test_infer_matches_scalar_oracle_on_decoded_models():
    rng = np.random.default_rng(3)
    for _ in range(20):
        model = tuner.decode(rng.random(tuner.GENOME_LENGTH), 4)
        model.consequents[:] = rng.normal(size=model.consequents.shape)
        X = rng.random((15, 4))
        inputs, rules, order = model_parts(model)
        ref = [sugeno(inputs, rules, order, x) for x in X]
        np.testing.assert_allclose(predict(model, X), ref, rtol=1e-12, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_normalized_firing_sums_to_one(seed):
    rng = np.random.default_rng(seed)
    model = tuner.decode(rng.random(tuner.GENOME_LENGTH), 6)
    X = rng.random((20, 6))
    f = fire_rules(model, X)
    ok = ~f.fallback
    assert np.all(np.abs(f.normalized.sum(axis=1) - 1.0) <= 1e-12)
    assert np.all(f.raw[ok].sum(axis=1) > 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rule_permutation_leaves_output_unchanged(seed):
    rng = np.random.default_rng(seed)
    model = tuner.decode(rng.random(tuner.GENOME_LENGTH), 6)
    assume(model.n_rules > 1)
    model.consequents[:] = rng.normal(size=model.consequents.shape)
    perm = rng.permutation(model.n_rules)
    shuffled = model.copy()
    shuffled.antecedents = model.antecedents[perm].copy()
    shuffled.consequents = model.consequents[perm].copy()
    X = rng.random((25, 6))
    assert np.max(np.abs(predict(model, X) - predict(shuffled, X))) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-5, 5))
def test_equal_constant_consequents_give_that_constant(seed, v):
    rng = np.random.default_rng(seed)
    model = tuner.decode(rng.random(tuner.GENOME_LENGTH), 6, order=0)
    model.consequents[:, -1] = v
    X = rng.random((10, 6))
    np.testing.assert_allclose(predict(model, X), v, rtol=1e-12, atol=1e-12)


def test_model_json_round_trip():
    rng = np.random.default_rng(1)
    model = tuner.decode(rng.random(tuner.GENOME_LENGTH), 6)
    model.consequents[:] = rng.normal(size=model.consequents.shape)
    back = FISModel.from_json(model.to_json())
    X = rng.random((10, 6))
    np.testing.assert_array_equal(predict(back, X), predict(model, X))
    assert back.to_json() == model.to_json()


def test_parts_view_round_trip():
    model = tuner.default_model(6)
    rebuilt = FISModel.from_parts(model.inputs, model.rules, input_names=model.input_names)
    assert rebuilt.to_json() == model.to_json()


@pytest.mark.parametrize(
    "ant, msg",
    [([[2]], "index"), ([[0, 0]], "")],
)
def test_invalid_antecedents_are_rejected(ant, msg):
    with pytest.raises(FISError):
        FISModel(
            kinds=np.zeros((1, 2), dtype=int),
            params=np.tile([0.0, 0.5, 1.0, 0.0], (1, 2, 1)),
            n_mf=np.array([2]),
            antecedents=np.array(ant),
            consequents=np.zeros((1, 2)),
        )


def test_repair_sorts_and_floors():
    model = tuner.default_model(2)
    model.kinds[0, :] = 0
    model.params[0, 0, :3] = [0.9, 0.1, 0.5]
    model.params[1, 0, 1] = -1.0
    assert not model.is_valid()
    model.repair()
    np.testing.assert_array_equal(model.params[0, 0, :3], [0.1, 0.5, 0.9])
    assert model.params[1, 0, 1] == pytest.approx(1e-4)
    assert model.is_valid()
