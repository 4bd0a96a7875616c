# %% [markdown]
# # RMSE against training length
#
# One model per epoch count, all from the same seed. About 2.5 minutes.

# %%
from cryptolstm.evaluation import epoch_sweep, sweep_csv
from cryptolstm.forecast import TrainConfig
from cryptolstm.market_data import extract_close, load_fixture

prices = extract_close(load_fixture("EOS-USD"))
rows = epoch_sweep(prices, [5, 15, 25, 50, 100], TrainConfig(seed=42))
print(f"{'epochs':>6} {'RMSE (USD)':>11}")
for r in rows:
    print(f"{r.epochs:>6} {r.rmse_usd:>11.3f}")
print()
print(sweep_csv(rows))
