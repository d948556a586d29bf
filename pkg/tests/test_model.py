import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perishable_duopoly.model import (ModelParams, choice_probabilities, freshness,
                                      log_choice_probabilities, price, update_satisfaction)


def test_default_params_give_R_4():
    prm = ModelParams(temperature=0.02, greed=0.5)
    assert prm.R == pytest.approx(4.0)
    assert float(prm.purchase_rate(0.5)) == pytest.approx(0.1)


@pytest.mark.parametrize("field,value", [
    ("n_products", 0), ("n_buyers", -1), ("tau0", 0.0), ("tau1", -2.0), ("h_c", 0.0),
    ("alpha", 1.0), ("alpha", -0.1), ("greed", 1.2), ("temperature", -0.01), ("n_sellers", 1),
])
def test_params_reject_out_of_range(field, value):
    kwargs = {"temperature": 0.02, "greed": 0.5, field: value}
    with pytest.raises(ValueError, match=field):
        ModelParams(**kwargs)


def test_freshness_examples():
    assert freshness(0, 20) == 1.0
    assert freshness(20, 20) == pytest.approx(math.exp(-1), abs=1e-12)
    assert freshness(67.9, 20) == pytest.approx(math.exp(-3.395), rel=1e-14)
    assert freshness(67.9, 20) == pytest.approx(0.033541, abs=1e-6)
    with pytest.raises(ValueError):
        freshness(-1.0, 20)


def test_price_examples():
    assert price(0, 20, 0.05) == pytest.approx(1 - math.exp(-20), abs=1e-15)
    tau_c = -20 * math.log(0.05)  # freshness equals h_c
    assert price(tau_c, 20, 0.05) == pytest.approx(1 - math.exp(-1), abs=1e-12)
    assert price(5000.0, 20, 0.05) < 1e-100
    with pytest.raises(ValueError):
        price(1.0, 20, 0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 300), st.floats(0.01, 50), st.floats(1e-3, 2.0))
def test_price_decreasing_and_bounded(tau, dtau, h_c):
    a, b = price(tau, 20.0, h_c), price(tau + dtau, 20.0, h_c)
    assert b <= a <= 1 - math.exp(-1 / h_c) + 1e-15


def test_choice_probabilities_examples():
    np.testing.assert_allclose(choice_probabilities([0.4, 0.4], 0.7), [0.5, 0.5])
    e = math.e
    np.testing.assert_allclose(choice_probabilities([1.0, 0.0], 1.0), [e / (1 + e), 1 / (1 + e)], rtol=1e-14)


def test_tiny_probabilities_are_not_clamped():
    p = choice_probabilities([0.7, 0.0], 1e-3)  # gap / T = 700
    assert 0 < p[1] < 1e-300
    assert p[1] == pytest.approx(math.exp(-700), rel=1e-10)


def test_underflow_contract_and_log_form():
    p = choice_probabilities([1.0, 0.0], 1e-3)
    assert p[0] == 1.0 and p[1] == 0.0  # e^-1000 is below the smallest double
    logp = log_choice_probabilities([1.0, 0.0], 1e-3)
    assert logp[1] == pytest.approx(-1000.0, rel=1e-12)
    assert np.isfinite(choice_probabilities([1e6, -1e6], 1e-3)).all()


def test_zero_temperature_is_argmax_with_even_ties():
    np.testing.assert_array_equal(choice_probabilities([0.3, 0.1], 0.0), [1.0, 0.0])
    np.testing.assert_array_equal(choice_probabilities([0.3, 0.3, 0.1], 0.0), [0.5, 0.5, 0.0])


sat = st.floats(-5, 5)


@settings(max_examples=100, deadline=None)
@given(st.lists(sat, min_size=2, max_size=5), st.floats(1e-2, 5), st.floats(-10, 10))
def test_choice_sums_to_one_and_is_shift_invariant(s, T, c):
    p = choice_probabilities(s, T)
    assert abs(p.sum() - 1) < 1e-12
    np.testing.assert_allclose(choice_probabilities(np.array(s) + c, T), p, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(1e-3, 1), st.floats(1e-3, 0.5))
def test_choice_monotone(s1, s2, dt, T):
    base = choice_probabilities([s1, s2], T)
    up = choice_probabilities([s1 + dt, s2], T)
    if 1e-12 < base[0] < 1 - 1e-12:
        assert up[0] > base[0] and up[1] < base[1]


def test_update_satisfaction_examples():
    assert update_satisfaction(0.0, 1.0, 0.37, 0.99, 0.0) == pytest.approx(0.01)
    assert update_satisfaction(1.0, 0.2, 0.0, 0.99, 1.0) == pytest.approx(1.0)
    assert update_satisfaction(0.5, 0.4, 0.3, 0.99, 0.6) == pytest.approx(0.5008, abs=1e-12)


unit = st.floats(0, 1)


@settings(max_examples=200, deadline=None)
@given(unit, st.floats(1e-6, 1), st.floats(0, 0.999999), st.floats(0, 0.999), unit)
def test_update_is_convex_combination(s_old, h, x, alpha, g):
    q = g * (1 - x) + (1 - g) * h
    new = update_satisfaction(s_old, h, x, alpha, g)
    assert min(s_old, q) - 1e-12 <= new <= max(s_old, q) + 1e-12
    assert -1e-12 <= new <= 1 + 1e-12
