# %% [markdown]
# # Daily close history
#
# Load the bundled EOS-USD history, isolate the close column and draw it as
# a static SVG. Swap `load_fixture` for `fetch_daily_history("EOS-USD")`
# when you have network access.

# %%
from pathlib import Path

from cryptolstm.market_data import extract_close, load_fixture
from cryptolstm.reporting import ChartSpec, Series, write_chart

OUT = Path(__file__).with_name("out")
OUT.mkdir(exist_ok=True)

series = load_fixture("EOS-USD")
prices = extract_close(series)
print(f"{len(prices)} days, {prices.dates[0]} .. {prices.dates[-1]}, dropped rows: {series.dropped}")
print(f"min close {min(prices.values):.3f} USD, max close {max(prices.values):.3f} USD")

# %%
spec = ChartSpec("EOS-USD close", (Series("close", list(prices.dates), list(prices.values), "history"),))
print("wrote", write_chart(spec, OUT / "eos_history.svg"))
