import io

import numpy as np
import pytest

from perishable_duopoly.agents import (MarketState, SatisfactionInit, Scheduler, ShelfInit,
                                       SimConfig, UpdateRule, init_market, run,
                                       stationary_satisfaction, step_round)
from perishable_duopoly.meanfield import stationary_avg_freshness
from perishable_duopoly.model import ModelParams
from perishable_duopoly.series import TimeSeries


@pytest.fixture
def params():
    return ModelParams(temperature=0.02, greed=0.6)


def test_sim_config_validation():
    assert SimConfig(duration=100.0).burn_in == 25.0
    for bad in (dict(seed=-1), dict(seed=2**64), dict(duration=0.0),
                dict(record_interval=0.0), dict(burn_in=3000.0), dict(scheduler="nope")):
        with pytest.raises(ValueError):
            SimConfig(**bad)
    assert SimConfig(update_rule="chosen").update_rule is UpdateRule.CHOSEN


def test_stationary_init_mean_age(params):
    state = init_market(params, SimConfig(seed=3))
    assert state.shelves.shape == (2, 5000)
    # renewal rate 100 * 0.5 / (5000 * 0.1) = 0.1, mean age 10
    assert state.shelves.mean() == pytest.approx(10.0, rel=0.03)
    assert np.all(state.satisfaction == stationary_satisfaction(params))


def test_fresh_and_zero_init(params):
    state = init_market(params, SimConfig(init_shelves=ShelfInit.FRESH,
                                          init_satisfaction=SatisfactionInit.ZERO))
    assert np.all(state.shelves == 0)
    assert np.all(state.satisfaction == 0)
    np.testing.assert_allclose(state.probabilities(), 0.5)


def test_stationary_satisfaction_value(params):
    # g (1 - xbar) + (1 - g) hbar at p = 1/2
    expected = 0.6 * 4.999999783578869e-3 + 0.4 * stationary_avg_freshness(0.5, 4.0)
    assert stationary_satisfaction(params) == pytest.approx(expected, rel=1e-10)


def test_step_round_replaces_one_product_per_buyer(params):
    state = init_market(params, SimConfig(seed=1))
    rec = step_round(state)
    assert rec.replacements == 100
    assert rec.purchases.sum() == 100
    # freshly replaced products have aged exactly one round
    fresh = np.isclose(state.shelves, params.tau0)
    assert 1 <= fresh.sum() <= 100
    assert state.clock == pytest.approx(0.1)
    assert state.shelves.shape == (2, 5000)


def test_step_round_zero_temperature_buys_from_best(params):
    prm = params.replace(temperature=0.0)
    state = init_market(prm, SimConfig(seed=2))
    state.satisfaction[:, 0] = 0.5
    state.satisfaction[:, 1] = 0.1
    rec = step_round(state)
    assert rec.purchases.tolist() == [100, 0]


def test_step_round_is_deterministic(params):
    a = init_market(params, SimConfig(seed=9))
    b = init_market(params, SimConfig(seed=9))
    for _ in range(5):
        ra, rb = step_round(a), step_round(b)
        np.testing.assert_array_equal(ra.h, rb.h)
    np.testing.assert_array_equal(a.shelves, b.shelves)
    np.testing.assert_array_equal(a.satisfaction, b.satisfaction)


def test_collision_sees_replacement():
    # one product per seller: every buyer after the first at a seller meets a new item
    prm = ModelParams(temperature=0.0, greed=0.0, n_products=1, n_buyers=10)
    state = init_market(prm, SimConfig(seed=0))
    state.shelves[:] = 50.0
    state.satisfaction[:, 0] = 1.0
    state.satisfaction[:, 1] = 0.0
    rec = step_round(state)
    assert rec.purchases.tolist() == [10, 0]
    h = np.sort(rec.h)
    assert h[0] == pytest.approx(np.exp(-50.0 / 20.0))
    np.testing.assert_allclose(h[1:], 1.0)


def test_chosen_rule_freezes_other_seller(params):
    prm = params.replace(temperature=0.0)
    state = init_market(prm, SimConfig(seed=4, update_rule="chosen"))
    state.satisfaction[:, 0] = 0.5
    state.satisfaction[:, 1] = 0.1
    step_round(state)
    assert np.all(state.satisfaction[:, 1] == 0.1)
    assert np.all(state.satisfaction[:, 0] != 0.5)


def test_all_rule_moves_every_entry(params):
    state = init_market(params, SimConfig(seed=4))
    before = state.satisfaction.copy()
    step_round(state)
    assert np.all(state.satisfaction != before)


@pytest.fixture(scope="module")
def short_run():
    prm = ModelParams(temperature=0.02, greed=0.6)
    return run(prm, SimConfig(seed=5, duration=100.0))


def test_run_invariants(short_run):
    ts = short_run
    assert len(ts) == 101
    np.testing.assert_allclose(ts.t, np.arange(101.0), atol=1e-9)
    np.testing.assert_allclose(ts.p.sum(axis=1), 1.0, atol=1e-12)
    assert ts.s.min() >= 0 and ts.s.max() <= 1
    assert ts.h.min() > 0 and ts.h.max() <= 1


def test_product_count_is_conserved(params):
    state = init_market(params, SimConfig(seed=6))
    for _ in range(50):
        step_round(state)
        assert state.shelves.shape == (2, 5000)
        assert np.all(state.shelves > 0)


def test_seed_determinism(params):
    cfg = SimConfig(seed=42, duration=20.0)
    a, b = run(params, cfg), run(params, cfg)
    assert a.to_csv() == b.to_csv()
    c = run(params, SimConfig(seed=43, duration=20.0))
    assert a.to_csv() != c.to_csv()


def test_csv_round_trip(short_run):
    back = TimeSeries.from_csv(io.StringIO(short_run.to_csv()))
    np.testing.assert_allclose(back.p, short_run.p, rtol=1e-8)
    np.testing.assert_allclose(back.t, short_run.t)
    assert back.to_csv() == short_run.to_csv()


def test_poisson_scheduler_short_run(params):
    ts = run(params, SimConfig(seed=7, duration=5.0, scheduler=Scheduler.POISSON))
    np.testing.assert_allclose(ts.t, np.arange(6.0))
    np.testing.assert_allclose(ts.p.sum(axis=1), 1.0, atol=1e-12)
    assert ts.s.min() >= 0 and ts.s.max() <= 1


def test_symmetric_start_stays_balanced_at_high_temperature():
    prm = ModelParams(temperature=0.3, greed=0.1)
    ts = run(prm, SimConfig(seed=8, duration=100.0))
    assert np.abs(ts.p[:, 0] - 0.5).max() < 0.05


def test_market_state_snapshot_shapes(params):
    state = init_market(params, SimConfig())
    assert isinstance(state, MarketState)
    t, p, s, h, x = state.snapshot()
    assert t == 0 and p.shape == s.shape == h.shape == x.shape == (2,)
