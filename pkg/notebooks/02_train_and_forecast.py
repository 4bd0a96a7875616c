# %% [markdown]
# # Train, predict the last 200 days, look at the lag
#
# Defaults: 60-day windows, 50 hidden units, dropout 0.2, batch 32, Adam at
# 1e-3, 50 epochs. Takes roughly a minute on one core.

# %%
from pathlib import Path

from cryptolstm.evaluation import lag_diagnostic, persistence_baseline, rmse
from cryptolstm.forecast import TrainConfig, fit_and_forecast
from cryptolstm.market_data import extract_close, load_fixture
from cryptolstm.reporting import forecast_chart, loss_chart, write_chart

OUT = Path(__file__).with_name("out")
OUT.mkdir(exist_ok=True)

prices = extract_close(load_fixture("EOS-USD"))
run = fit_and_forecast(prices, TrainConfig(epochs=50, seed=42), test_len=200)
res = run.result
print(f"test RMSE {res.rmse_usd:.3f} USD")

# %% [markdown]
# Loss per epoch (normalized units) and the price chart: green history,
# blue actual, red predicted.

# %%
for epoch in (1, 5, 25, 50):
    print(f"epoch {epoch:3d}: loss {res.loss_history[epoch]:.2e}")
write_chart(loss_chart("EOS-USD", res.loss_history), OUT / "loss.svg")
write_chart(forecast_chart("EOS-USD", run.train_dates, run.train_values, res), OUT / "forecast.svg")

# %% [markdown]
# How does it compare with just repeating yesterday's close? A best lag of
# one day means the forecast mostly copies the previous value.

# %%
base = persistence_baseline(prices, 200)
print(f"persistence RMSE {rmse(res.actual_usd, base):.3f} USD")
diag = lag_diagnostic(res.actual_usd, res.predicted_usd, baseline=base)
for lag, c in sorted(diag.correlations.items()):
    print(f"lag {lag:+d}: {c:.4f}")
print("best lag:", diag.best_lag)
