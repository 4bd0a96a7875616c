"""Min-max scaling, chronological train/test split and lookback windowing of close prices."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class DegenerateRange(ValueError):
    """Raised when min-max scaling is fit on a constant series."""


class SeriesTooShort(ValueError):
    pass


@dataclass(frozen=True)
class ScalerParams:
    min_value: float
    max_value: float

    def __post_init__(self):
        if not (np.isfinite(self.min_value) and np.isfinite(self.max_value)):
            raise ValueError("scaler bounds must be finite")
        if not self.max_value > self.min_value:
            raise DegenerateRange(f"max ({self.max_value}) must exceed min ({self.min_value})")

    @property
    def span(self) -> float:
        return self.max_value - self.min_value


@dataclass(frozen=True)
class SplitSpec:
    test_len: int = 200
    lookback: int = 60

    def __post_init__(self):
        if self.test_len < 1 or self.lookback < 1:
            raise ValueError("test_len and lookback must be >= 1")


@dataclass(frozen=True)
class WindowedDataset:
    """Supervised pairs: ``inputs[k]`` is the ``lookback`` values preceding ``targets[k]``.

    inputs has shape (n, lookback); targets has shape (n,).
    """

    inputs: np.ndarray
    targets: np.ndarray
    target_dates: tuple

    def __post_init__(self):
        if not (len(self.inputs) == len(self.targets) == len(self.target_dates)):
            raise ValueError("inputs, targets and target_dates must be aligned")

    def __len__(self) -> int:
        return len(self.targets)

    @property
    def lookback(self) -> int:
        return self.inputs.shape[1]


def fit_minmax(values: Sequence[float]) -> ScalerParams:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("cannot fit a scaler on an empty series")
    if not np.all(np.isfinite(arr)):
        raise ValueError("cannot fit a scaler on non-finite values")
    lo, hi = float(arr.min()), float(arr.max())
    if hi == lo:
        raise DegenerateRange(f"constant series (every value is {lo}); min-max scaling is undefined")
    return ScalerParams(lo, hi)


def transform(values, params: ScalerParams) -> np.ndarray:
    return (np.asarray(values, dtype=float) - params.min_value) / params.span


def inverse_transform(normalized, params: ScalerParams) -> np.ndarray:
    return np.asarray(normalized, dtype=float) * params.span + params.min_value


def chronological_split(values: Sequence[float], spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Last ``test_len`` values become the test slice; everything before is training data."""
    arr = np.asarray(values, dtype=float)
    if len(arr) <= spec.test_len + spec.lookback:
        raise SeriesTooShort(
            f"need more than test_len + lookback = {spec.test_len + spec.lookback} values, got {len(arr)}")
    cut = len(arr) - spec.test_len
    return arr[:cut], arr[cut:]


def make_windows(values: Sequence[float], lookback: int, start_offset: int = 0,
                 dates: Sequence[dt.date] | None = None) -> WindowedDataset:
    """Build (previous ``lookback`` values -> value) pairs for every target index
    ``t >= max(lookback, start_offset)``.

    With ``start_offset`` set to the train/test boundary the inputs of the first
    test windows reach back into the training region while targets stay in the
    test region.
    """
    arr = np.asarray(values, dtype=float)
    n = len(arr)
    if lookback < 1:
        raise ValueError("lookback must be >= 1")
    if n <= lookback:
        raise SeriesTooShort(f"need more than lookback={lookback} values, got {n}")
    if dates is not None and len(dates) != n:
        raise ValueError("dates must align with values")
    first = max(lookback, start_offset)
    if first >= n:
        raise SeriesTooShort(f"start_offset {start_offset} leaves no targets in {n} values")
    idx = np.arange(first, n)
    inputs = np.lib.stride_tricks.sliding_window_view(arr, lookback)[idx - lookback].copy()
    targets = arr[idx].copy()
    target_dates = tuple(dates[t] for t in idx) if dates is not None else tuple(int(t) for t in idx)
    return WindowedDataset(inputs, targets, target_dates)


@dataclass(frozen=True)
class PreparedData:
    scaler: ScalerParams
    train: WindowedDataset
    test: WindowedDataset
    train_values: np.ndarray
    test_values: np.ndarray


def prepare(values: Sequence[float], dates: Sequence[dt.date] | None, spec: SplitSpec) -> PreparedData:
    """Split, fit the scaler on the training slice only, and window both sets."""
    train_vals, test_vals = chronological_split(values, spec)
    scaler = fit_minmax(train_vals)
    norm = transform(values, scaler)
    cut = len(train_vals)
    train_dates = None if dates is None else list(dates)[:cut]
    train = make_windows(norm[:cut], spec.lookback, 0, train_dates)
    test = make_windows(norm, spec.lookback, cut, dates)
    return PreparedData(scaler, train, test, train_vals, test_vals)
