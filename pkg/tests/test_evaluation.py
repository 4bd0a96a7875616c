import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cryptolstm.evaluation import (DegenerateVariance, LengthMismatch, epoch_sweep, lag_diagnostic,
                                   persistence_baseline, rmse, sweep_csv)
from cryptolstm.forecast import TrainConfig
from cryptolstm.preprocess import SeriesTooShort
from conftest import sine_prices


def test_rmse_basics():
    assert rmse([1, 2, 3], [1, 2, 3]) == 0.0
    assert rmse([1, 2], [2, 1]) == 1.0
    with pytest.raises(LengthMismatch):
        rmse([1, 2], [1])
    with pytest.raises(LengthMismatch):
        rmse([], [])


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=30), st.floats(-100, 100))
def test_rmse_translation(a, c):
    a = np.array(a)
    assert rmse(a, a + c) == pytest.approx(abs(c), rel=1e-9, abs=1e-9)


def test_persistence_small():
    pred = persistence_baseline([1, 2, 4], 2)
    np.testing.assert_array_equal(pred, [1, 2])
    assert rmse([2, 4], pred) == pytest.approx(math.sqrt(2.5))
    assert rmse([2, 4], pred) == pytest.approx(1.5811, abs=1e-4)


def test_persistence_constant():
    assert rmse([5.0] * 10, persistence_baseline([5.0] * 11, 10)) == 0.0


def test_persistence_too_short():
    with pytest.raises(SeriesTooShort):
        persistence_baseline([1.0, 2.0], 2)


def test_persistence_eos_oracle(eos_prices):
    v = list(eos_prices.values)
    # shift-and-subtract, written out longhand
    sq = [(v[t] - v[t - 1]) ** 2 for t in range(len(v) - 200, len(v))]
    oracle = math.sqrt(sum(sq) / len(sq))
    assert rmse(v[-200:], persistence_baseline(eos_prices, 200)) == pytest.approx(oracle, rel=1e-12)


def test_lag_shift_by_one():
    a = np.cumsum(np.random.default_rng(0).normal(size=100))
    pred = np.concatenate([[a[0]], a[:-1]])  # pred[t] = a[t-1]
    d = lag_diagnostic(a, pred)
    assert d.best_lag == 1
    assert d.correlation_at_best == pytest.approx(1.0)


def test_lag_identity():
    a = np.sin(np.arange(60) / 5.0)
    d = lag_diagnostic(a, a)
    assert d.best_lag == 0 and d.rmse_model_usd == 0.0


def test_lag_ties_prefer_small_shift():
    # period-4 square wave correlates perfectly at lags 0 and +-4
    a = np.tile([1.0, 1.0, -1.0, -1.0], 10)
    assert lag_diagnostic(a, a).best_lag == 0


def test_lag_degenerate():
    with pytest.raises(DegenerateVariance):
        lag_diagnostic(np.ones(20), np.arange(20.0))


def test_lag_requires_length():
    with pytest.raises(SeriesTooShort):
        lag_diagnostic(np.arange(10.0), np.arange(10.0), max_lag=5)


@given(st.floats(0.01, 100), st.floats(-100, 100), st.integers(0, 1000))
@settings(max_examples=50)
def test_lag_affine_invariance(scale, shift, seed):
    rng = np.random.default_rng(seed)
    a = np.cumsum(rng.normal(size=80))
    pred = np.roll(a, 2) + rng.normal(scale=0.3, size=80)
    assert lag_diagnostic(a, pred).best_lag == lag_diagnostic(a, scale * pred + shift).best_lag


def test_lag_baseline_rmse_uses_given_forecast():
    a = np.arange(1.0, 30.0) ** 1.1
    d = lag_diagnostic(a, a + 1, baseline=a - 2)
    assert d.rmse_model_usd == pytest.approx(1.0)
    assert d.rmse_persistence_usd == pytest.approx(2.0)


def test_sweep_smoke_and_determinism():
    prices = sine_prices(100)
    cfg = TrainConfig(lookback=10, hidden_size=4, batch_size=16, seed=1)
    rows = epoch_sweep(prices, [1], cfg, test_len=20)
    assert len(rows) == 1 and np.isfinite(rows[0].rmse_usd)
    rows = epoch_sweep(prices, [5, 5], cfg, test_len=20)
    assert rows[0].rmse_usd == rows[1].rmse_usd
    text = sweep_csv(rows).splitlines()
    assert text[0] == "epochs,rmse_usd,wall_time_s" and len(text) == 3
