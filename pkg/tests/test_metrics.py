import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from anpso_fis.metrics import mse, r_value, rmse

from oracles import pearson


def test_rmse_examples():
    assert rmse([0.3, 0.4], [0.3, 0.4]) == 0.0
    assert rmse([1.0, 2.0, 3.0], [0.0, 1.0, 2.0]) == 1.0
    assert rmse([0.2, 0.8], [0.0, 1.0]) == pytest.approx(0.2, abs=1e-15)
    assert mse([0.2, 0.8], [0.0, 1.0]) == pytest.approx(0.04, abs=1e-15)


def test_r_value_examples():
    t = np.array([0.1, 0.5, 0.3, 0.9])
    assert r_value(t, t) == pytest.approx(1.0)
    assert r_value(-t, t) == pytest.approx(-1.0)
    assert r_value([1, 2, 3], [2, 4, 7]) == pytest.approx(pearson([1, 2, 3], [2, 4, 7]), abs=1e-12)
    assert r_value([1, 2, 3], [2, 4, 7]) == pytest.approx(0.9934, abs=5e-5)


def test_constant_vector_is_flagged():
    assert r_value([1.0, 1.0, 1.0], [0.0, 1.0, 2.0], return_flag=True) == (0.0, True)
    assert r_value([0.0, 1.0], [2.0, 2.0]) == 0.0


@pytest.mark.parametrize("pred, target", [([1.0], [1.0, 2.0]), ([], [])])
def test_bad_lengths_are_errors(pred, target):
    with pytest.raises(ValueError):
        rmse(pred, target)


def test_r_value_needs_two_samples():
    with pytest.raises(ValueError):
        r_value([1.0], [1.0])


vec = arrays(np.float64, 8, elements=st.floats(-100, 100))


@settings(max_examples=100, deadline=None)
@given(vec, vec)
def test_metric_properties(p, t):
    assert rmse(p, t) >= 0.0
    assert rmse(p, t) == pytest.approx(np.sqrt(mse(p, t)))
    r = r_value(p, t)
    assert -1.0 <= r <= 1.0
    assert r == pytest.approx(r_value(t, p))
