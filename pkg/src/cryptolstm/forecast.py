"""Minibatch training loop and test-window prediction in USD."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import neural
from .evaluation import rmse
from .market_data import PriceVector
from .preprocess import ScalerParams, SplitSpec, WindowedDataset, inverse_transform, prepare


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    batch_size: int = 32
    lookback: int = 60
    hidden_size: int = 50
    dropout: float = 0.2
    seed: int = 42
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if self.lookback < 1 or self.hidden_size < 1:
            raise ValueError("lookback and hidden_size must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")

    @property
    def adam(self) -> neural.AdamHyper:
        return neural.AdamHyper(self.lr, self.beta1, self.beta2, self.eps)


@dataclass
class LossHistory:
    """Mean training MSE (normalized units) per epoch."""

    values: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, epoch: int) -> float:
        # 1-based, matching how epochs are counted when reported
        return self.values[epoch - 1]


@dataclass
class TrainedModel:
    lstm: neural.LstmParams
    dense: neural.DenseParams

    def __call__(self, windows: np.ndarray) -> np.ndarray:
        h, _ = neural.lstm_forward(np.asarray(windows)[:, :, None], self.lstm, mode="infer")
        return neural.dense_forward(h, self.dense)


def _rng_streams(seed: int):
    # independent, reproducible streams for shuffling and dropout masks
    return np.random.default_rng([seed, 1]), np.random.default_rng([seed, 2])


def train(dataset: WindowedDataset, config: TrainConfig,
          on_epoch: Callable[[int, float], None] | None = None) -> tuple[TrainedModel, LossHistory]:
    """Fit the network with Adam on minibatch-averaged gradients.

    Each epoch visits the windows in a fresh seeded permutation; the trailing
    partial batch is kept. The recorded epoch loss is the mean train-mode
    squared error over all samples seen in that epoch.
    """
    n = len(dataset)
    if n == 0:
        raise ValueError("training set is empty")
    lstm, dense = neural.init_params(1, config.hidden_size, config.seed)
    state = neural.AdamState.zeros_like(lstm, dense)
    shuffle_rng, drop_rng = _rng_streams(config.seed)
    dropout = neural.DropoutConfig(config.dropout, config.seed)
    xs = dataset.inputs[:, :, None]
    ys = dataset.targets
    history = LossHistory()

    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(n)
        sq_err = 0.0
        for b, start in enumerate(range(0, n, config.batch_size)):
            idx = order[start:start + config.batch_size]
            try:
                h, cache = neural.lstm_forward(xs[idx], lstm, dropout, "train", drop_rng)
                pred = neural.dense_forward(h, dense)
                sq_err += float(np.sum((pred - ys[idx]) ** 2))
                grads = neural.backward(cache, lstm, dense, neural.mse_grad(pred, ys[idx]))
            except FloatingPointError as exc:
                raise type(exc)(f"epoch {epoch}, batch {b}: {exc}") from exc
            (lstm, dense), state = neural.adam_step((lstm, dense), grads, state, config.adam)
        history.values.append(sq_err / n)
        if on_epoch is not None:
            on_epoch(epoch, history.values[-1])
    return TrainedModel(lstm, dense), history


@dataclass
class ForecastResult:
    dates: list
    actual_usd: np.ndarray
    predicted_usd: np.ndarray
    rmse_usd: float
    loss_history: LossHistory = field(default_factory=LossHistory)
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (len(self.dates) == len(self.actual_usd) == len(self.predicted_usd)):
            raise ValueError("dates, actual and predicted must be aligned")

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["date", "actual_usd", "predicted_usd"])
        for d, a, p in zip(self.dates, self.actual_usd, self.predicted_usd):
            w.writerow([_date_str(d), repr(float(a)), repr(float(p))])
        return out.getvalue()

    def to_report(self, extra: dict | None = None) -> dict:
        doc = {
            "config": self.config,
            "rmse_usd": self.rmse_usd,
            "loss_history": list(self.loss_history.values),
            "test_days": len(self.dates),
            "first_test_date": _date_str(self.dates[0]),
            "last_test_date": _date_str(self.dates[-1]),
        }
        if extra:
            doc.update(extra)
        return doc

    def to_json(self, extra: dict | None = None) -> str:
        return json.dumps(self.to_report(extra), indent=2, sort_keys=True) + "\n"


def _date_str(d) -> str:
    return d.isoformat() if hasattr(d, "isoformat") else str(d)


def predict(model, dataset: WindowedDataset, scaler: ScalerParams,
            loss_history: LossHistory | None = None, config: dict | None = None) -> ForecastResult:
    """Inference-mode prediction of every test window, mapped back to USD.

    ``model`` is a :class:`TrainedModel` or any callable taking a
    (n, lookback) array of normalized windows and returning n normalized
    predictions.
    """
    if len(dataset) == 0:
        raise ValueError("test set is empty")
    pred_norm = np.asarray(model(dataset.inputs), dtype=float).reshape(-1)
    actual = inverse_transform(dataset.targets, scaler)
    predicted = inverse_transform(pred_norm, scaler)
    return ForecastResult(list(dataset.target_dates), actual, predicted, rmse(actual, predicted),
                          loss_history or LossHistory(), dict(config or {}))


def persistence_model(windows: np.ndarray) -> np.ndarray:
    """Stub model that repeats the last value of each window."""
    return np.asarray(windows)[:, -1]


@dataclass
class PipelineOutput:
    result: ForecastResult
    model: TrainedModel
    scaler: ScalerParams
    train_dates: list
    train_values: np.ndarray


def fit_and_forecast(prices: PriceVector, config: TrainConfig, test_len: int = 200,
                     timers=None, model=None) -> PipelineOutput:
    """Split, scale, window, train and predict the last ``test_len`` days.

    ``timers`` is an optional :class:`cryptolstm.reporting.Timers`; when given,
    the training and prediction phases are recorded on it. Passing ``model``
    skips training and predicts with that callable instead.
    """
    spec = SplitSpec(test_len=test_len, lookback=config.lookback)
    data = prepare(prices.values, prices.dates, spec)

    if model is None:
        if timers is not None:
            timers.start("Training time")
        trained, history = train(data.train, config)
        if timers is not None:
            timers.stop("Training time")
    else:
        trained, history = model, LossHistory()

    if timers is not None:
        timers.start("Prediction time")
    echo = {"ticker": prices.ticker, "test_len": test_len, **asdict(config)}
    result = predict(trained, data.test, data.scaler, history, echo)
    if timers is not None:
        timers.stop("Prediction time")
    cut = len(data.train_values)
    return PipelineOutput(result, trained, data.scaler, list(prices.dates[:cut]), data.train_values)

