"""Error metrics, the persistence baseline, the lag diagnostic and the epoch sweep."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .preprocess import SeriesTooShort


class LengthMismatch(ValueError):
    pass


class DegenerateVariance(ValueError):
    pass


def rmse(actual, predicted) -> float:
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if a.shape != p.shape:
        raise LengthMismatch(f"length mismatch: {a.shape} vs {p.shape}")
    if a.size == 0:
        raise LengthMismatch("rmse of empty vectors is undefined")
    return float(np.sqrt(np.mean((a - p) ** 2)))


def persistence_baseline(close, test_len: int) -> np.ndarray:
    """Tomorrow equals today: the forecast for each of the last ``test_len``
    days is the previous day's close."""
    values = np.asarray(getattr(close, "values", close), dtype=float)
    if test_len < 1 or len(values) < test_len + 1:
        raise SeriesTooShort(f"need at least {test_len + 1} closes for a {test_len}-day baseline")
    return values[-test_len - 1:-1].copy()


@dataclass(frozen=True)
class LagDiagnostic:
    best_lag: int
    correlation_at_best: float
    rmse_model_usd: float
    rmse_persistence_usd: float
    correlations: dict

    def to_dict(self) -> dict:
        return {
            "best_lag": self.best_lag,
            "correlation_at_best": self.correlation_at_best,
            "rmse_model_usd": self.rmse_model_usd,
            "rmse_persistence_usd": self.rmse_persistence_usd,
            "correlations": {str(k): v for k, v in self.correlations.items()},
        }


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    sx = np.sqrt(np.dot(xc, xc))
    sy = np.sqrt(np.dot(yc, yc))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateVariance("constant slice; correlation undefined")
    return float(np.clip(np.dot(xc, yc) / (sx * sy), -1.0, 1.0))


def lag_diagnostic(actual, predicted, max_lag: int = 5, baseline=None) -> LagDiagnostic:
    """Find the shift at which ``predicted`` best tracks ``actual``.

    For each lag l in [-max_lag, max_lag] the Pearson correlation of
    ``predicted[t]`` with ``actual[t - l]`` is taken over the overlap. A
    positive best lag means the forecast trails reality by that many days.
    Ties (within 1e-12) go to the smaller |l|, then the negative side.

    ``baseline`` is the persistence forecast for the same days; without it
    the persistence RMSE is computed inside the window (one day shorter).
    """
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if a.shape != p.shape:
        raise LengthMismatch(f"length mismatch: {a.shape} vs {p.shape}")
    n = a.size
    if max_lag < 0 or n <= 2 * max_lag:
        raise SeriesTooShort(f"need more than {2 * max_lag} points for max_lag={max_lag}")

    corr = {}
    for lag in range(-max_lag, max_lag + 1):
        if lag >= 0:
            corr[lag] = _pearson(p[lag:], a[:n - lag])
        else:
            corr[lag] = _pearson(p[:n + lag], a[-lag:])
    top = max(corr.values())
    best = min((l for l in corr if corr[l] >= top - 1e-12), key=lambda l: (abs(l), l))

    if baseline is not None:
        pers = rmse(a, baseline)
    else:
        pers = rmse(a[1:], a[:-1])
    return LagDiagnostic(best, corr[best], rmse(a, p), pers, corr)


@dataclass(frozen=True)
class EpochSweepRow:
    epochs: int
    rmse_usd: float
    wall_time_s: float


def epoch_sweep(prices, epochs_list: Sequence[int] = (5, 15, 25, 50, 100), config=None,
                test_len: int = 200) -> list[EpochSweepRow]:
    """Train one model per epoch count, every one from the same seed."""
    from .forecast import TrainConfig, fit_and_forecast

    config = config or TrainConfig()
    rows = []
    for epochs in epochs_list:
        t0 = time.perf_counter()
        out = fit_and_forecast(prices, replace(config, epochs=int(epochs)), test_len)
        rows.append(EpochSweepRow(int(epochs), out.result.rmse_usd, time.perf_counter() - t0))
    return rows


def sweep_csv(rows: Sequence[EpochSweepRow], include_time: bool = True) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["epochs", "rmse_usd", "wall_time_s"])
    for r in rows:
        w.writerow([r.epochs, repr(r.rmse_usd), f"{r.wall_time_s:.3f}" if include_time else ""])
    return out.getvalue()
