import json
import statistics

import numpy as np
import pytest

from cryptolstm import neural
from cryptolstm.evaluation import persistence_baseline, rmse
from cryptolstm.forecast import (LossHistory, TrainConfig, TrainedModel, fit_and_forecast, persistence_model,
                                 predict, train)
from cryptolstm.preprocess import SeriesTooShort, SplitSpec, WindowedDataset, make_windows, prepare
from conftest import sine_prices

SMALL = dict(lookback=10, hidden_size=8, batch_size=16)


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(epochs=0)
    with pytest.raises(ValueError):
        TrainConfig(batch_size=0)


def test_single_sample_loss_decreases_after_one_step():
    ds = WindowedDataset(np.full((1, 5), 0.4), np.array([0.9]), (0,))
    cfg = TrainConfig(epochs=1, batch_size=1, lookback=5, hidden_size=4, dropout=0.0, seed=3)
    lstm, dense = neural.init_params(1, 4, 3)
    before = neural.mse_loss(TrainedModel(lstm, dense)(ds.inputs), ds.targets)
    model, hist = train(ds, cfg)
    after = neural.mse_loss(model(ds.inputs), ds.targets)
    assert len(hist) == 1
    assert hist[1] == pytest.approx(before)
    assert after < before


def test_training_is_deterministic():
    prices = sine_prices(200)
    data = prepare(prices.values, prices.dates, SplitSpec(40, 10))
    cfg = TrainConfig(epochs=3, seed=5, **SMALL)
    m1, h1 = train(data.train, cfg)
    m2, h2 = train(data.train, cfg)
    assert h1.values == h2.values
    assert neural.checkpoint_json(m1.lstm, m1.dense) == neural.checkpoint_json(m2.lstm, m2.dense)
    _, h3 = train(data.train, TrainConfig(epochs=3, seed=6, **SMALL))
    assert h3.values != h1.values


def test_loss_history_finite_and_nonnegative():
    prices = sine_prices(200)
    out = fit_and_forecast(prices, TrainConfig(epochs=4, **SMALL), test_len=40)
    vals = out.result.loss_history.values
    assert len(vals) == 4
    assert all(np.isfinite(v) and v >= 0 for v in vals)


def test_partial_last_batch_is_used():
    # 5 windows with batch 4: two updates per epoch
    ds = make_windows(np.linspace(0, 1, 8), 3)
    cfg = TrainConfig(epochs=1, batch_size=4, lookback=3, hidden_size=2, dropout=0.0)
    seen = []
    orig = neural.adam_step

    def counting(*a, **k):
        seen.append(1)
        return orig(*a, **k)

    neural.adam_step = counting
    try:
        train(ds, cfg)
    finally:
        neural.adam_step = orig
    assert len(seen) == 2


def test_persistence_stub_matches_baseline(eos_prices):
    spec = SplitSpec(200, 60)
    data = prepare(eos_prices.values, eos_prices.dates, spec)
    res = predict(persistence_model, data.test, data.scaler)
    base = persistence_baseline(eos_prices, 200)
    np.testing.assert_allclose(res.predicted_usd, base, rtol=1e-12)
    np.testing.assert_allclose(res.actual_usd, eos_prices.values[-200:], rtol=1e-12)
    assert res.rmse_usd == pytest.approx(rmse(eos_prices.values[-200:], base), rel=1e-10)
    assert len(res.dates) == 200


def test_empty_test_set_is_rejected_upstream():
    prices = sine_prices(60)
    with pytest.raises(SeriesTooShort):
        fit_and_forecast(prices, TrainConfig(epochs=1, **SMALL), test_len=55)


def test_prediction_does_not_mutate_params():
    prices = sine_prices(150)
    out = fit_and_forecast(prices, TrainConfig(epochs=1, **SMALL), test_len=30)
    before = neural.checkpoint_json(out.model.lstm, out.model.dense)
    data = prepare(prices.values, prices.dates, SplitSpec(30, 10))
    predict(out.model, data.test, data.scaler)
    assert neural.checkpoint_json(out.model.lstm, out.model.dense) == before


def test_result_serialization():
    prices = sine_prices(150)
    res = fit_and_forecast(prices, TrainConfig(epochs=2, **SMALL), test_len=30).result
    lines = res.to_csv().splitlines()
    assert lines[0] == "date,actual_usd,predicted_usd"
    assert len(lines) == 31
    doc = json.loads(res.to_json({"timings": {"x": 1.0}}))
    assert doc["config"]["epochs"] == 2 and len(doc["loss_history"]) == 2
    assert doc["rmse_usd"] == res.rmse_usd and doc["timings"] == {"x": 1.0}


def test_more_epochs_lower_median_rmse():
    prices = sine_prices(260, noise=0.05)
    finals = {5: [], 25: []}
    for seed in range(5):
        for ep in finals:
            cfg = TrainConfig(epochs=ep, seed=seed, **SMALL)
            finals[ep].append(fit_and_forecast(prices, cfg, test_len=50).result.rmse_usd)
    assert statistics.median(finals[25]) < statistics.median(finals[5])


def test_loss_history_indexing():
    h = LossHistory([3.0, 2.0])
    assert h[1] == 3.0 and h[2] == 2.0 and len(h) == 2
