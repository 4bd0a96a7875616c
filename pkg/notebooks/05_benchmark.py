# %% [markdown]
# # Phase timings and machine description

# %%
from cryptolstm.forecast import TrainConfig, fit_and_forecast
from cryptolstm.market_data import extract_close, load_fixture
from cryptolstm.reporting import Timers, benchmark_report

timers = Timers()
timers.start("Overall time")
prices = extract_close(load_fixture("EOS-USD"))
fit_and_forecast(prices, TrainConfig(epochs=50), timers=timers)
timers.stop("Overall time")

report = benchmark_report(timers)
print(report.table())
