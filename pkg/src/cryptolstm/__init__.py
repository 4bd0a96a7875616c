"""Close-price forecasting for daily crypto (or equity) history with a from-scratch LSTM."""

from .evaluation import epoch_sweep, lag_diagnostic, persistence_baseline, rmse
from .forecast import ForecastResult, LossHistory, TrainConfig, fit_and_forecast, predict, train
from .market_data import (CandleSeries, PriceVector, extract_close, fetch_daily_history,
                          load_fixture, parse_ohlcv_csv)
from .preprocess import SplitSpec, fit_minmax, inverse_transform, make_windows, transform

__version__ = "0.1.0"
