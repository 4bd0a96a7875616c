"""Daily OHLCV history: CSV parsing/serialization, the chart-API client, and close-price isolation."""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

import requests

CSV_HEADER = ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"]
DEFAULT_BASE_URL = "https://query1.finance.yahoo.com"
BASE_URL_ENV = "CRYPTOLSTM_API_BASE"


class MarketDataError(Exception):
    pass


class MissingHeader(MarketDataError):
    pass


class EmptySeries(MarketDataError):
    pass


class MalformedRow(MarketDataError):
    pass


class HttpError(MarketDataError):
    def __init__(self, status: int, url: str):
        super().__init__(f"HTTP {status} from {url}")
        self.status = status
        self.url = url


class ApiShapeError(MarketDataError):
    pass


@dataclass(frozen=True)
class Candle:
    date: dt.date
    open: float
    high: float
    low: float
    close: float
    adj_close: float
    volume: int

    def is_sane(self) -> bool:
        prices = (self.open, self.high, self.low, self.close, self.adj_close)
        if not all(math.isfinite(p) and p >= 0 for p in prices):
            return False
        if self.volume < 0:
            return False
        return self.low <= self.open <= self.high and self.low <= self.close <= self.high


@dataclass(frozen=True)
class CandleSeries:
    """Validated daily history for one ticker.

    ``dropped`` counts source rows discarded for null fields or OHLC sanity
    violations; it is bookkeeping and does not take part in equality.
    """

    ticker: str
    candles: tuple[Candle, ...]
    dropped: int = field(default=0, compare=False)

    def __post_init__(self):
        if not self.candles:
            raise EmptySeries(f"no valid rows for {self.ticker or 'series'}")
        for a, b in zip(self.candles, self.candles[1:]):
            if not a.date < b.date:
                raise ValueError(f"dates not strictly increasing at {b.date}")

    def __len__(self) -> int:
        return len(self.candles)

    @property
    def dates(self) -> list[dt.date]:
        return [c.date for c in self.candles]


@dataclass(frozen=True)
class PriceVector:
    ticker: str
    values: tuple[float, ...]
    dates: tuple[dt.date, ...]

    def __post_init__(self):
        if len(self.values) != len(self.dates):
            raise ValueError("values and dates must be aligned")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("non-finite close price")

    def __len__(self) -> int:
        return len(self.values)


def _num(text: str) -> float | None:
    text = text.strip()
    if text == "" or text.lower() in ("null", "nan", "none"):
        return None
    return float(text)


def _build(ticker: str, rows: Iterable[tuple], dropped: int) -> CandleSeries:
    # rows: (date, open, high, low, close, adj_close, volume) with None for missing
    by_date: dict[dt.date, Candle] = {}
    for date, o, h, l, c, a, v in rows:
        if None in (o, h, l, c, v):
            dropped += 1
            continue
        candle = Candle(date, o, h, l, c, c if a is None else a, int(v))
        if not candle.is_sane() or date in by_date:
            dropped += 1
            continue
        by_date[date] = candle
    candles = tuple(by_date[d] for d in sorted(by_date))
    return CandleSeries(ticker, candles, dropped)


def parse_ohlcv_csv(text: str | io.TextIOBase, ticker: str = "") -> CandleSeries:
    """Parse a Yahoo-style daily export.

    Rows with empty or ``null`` numeric fields, or whose OHLC values are
    inconsistent, are dropped and tallied in ``CandleSeries.dropped``.
    """
    stream = io.StringIO(text) if isinstance(text, str) else text
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != CSV_HEADER:
        raise MissingHeader(f"expected header {','.join(CSV_HEADER)!r}, got {header!r}")

    rows = []
    dropped = 0
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise MalformedRow(f"line {lineno}: expected {len(CSV_HEADER)} columns, got {len(row)}")
        try:
            date = dt.date.fromisoformat(row[0].strip())
            o, h, l, c, a, v = (_num(x) for x in row[1:])
        except ValueError:
            dropped += 1
            continue
        rows.append((date, o, h, l, c, a, v))
    return _build(ticker, rows, dropped)


def _fmt(x: float) -> str:
    return repr(float(x))


def serialize_csv(series: CandleSeries) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for c in series.candles:
        writer.writerow([c.date.isoformat(), _fmt(c.open), _fmt(c.high), _fmt(c.low),
                         _fmt(c.close), _fmt(c.adj_close), c.volume])
    return out.getvalue()


def parse_chart_json(doc: dict, ticker: str = "") -> CandleSeries:
    """Turn a v8 chart-API document into a series (nulls dropped, timestamps floored to UTC days)."""
    try:
        result = doc["chart"]["result"]
        if not result:
            raise ApiShapeError(f"chart.result is empty for {ticker!r}")
        res = result[0]
        stamps = res["timestamp"]
        quote = res["indicators"]["quote"][0]
        cols = [quote[k] for k in ("open", "high", "low", "close", "volume")]
    except (KeyError, IndexError, TypeError) as exc:
        raise ApiShapeError(f"missing chart path for {ticker!r}: {exc!r}") from exc

    adj = None
    try:
        adj = res["indicators"]["adjclose"][0]["adjclose"]
    except (KeyError, IndexError, TypeError):
        pass

    n = len(stamps)
    if any(len(col) != n for col in cols) or (adj is not None and len(adj) != n):
        raise ApiShapeError("timestamp and quote arrays differ in length")

    rows = []
    for i, ts in enumerate(stamps):
        date = dt.datetime.fromtimestamp(int(ts), tz=dt.timezone.utc).date()
        o, h, l, c, v = (col[i] for col in cols)
        a = adj[i] if adj is not None else c
        rows.append((date, *(None if x is None else float(x) for x in (o, h, l, c, a)), v))
    return _build(ticker, rows, 0)


def fetch_daily_history(ticker: str, base_url: str | None = None, range: str = "max",
                        timeout: float = 30.0, session: requests.Session | None = None) -> CandleSeries:
    """GET ``{base_url}/v8/finance/chart/{ticker}`` and parse the daily candles.

    ``base_url`` defaults to ``$CRYPTOLSTM_API_BASE`` or the public Yahoo host.
    Proxy variables (``HTTPS_PROXY`` etc.) are honored through requests.
    """
    if not ticker:
        raise ValueError("ticker must be non-empty")
    base = (base_url or os.environ.get(BASE_URL_ENV) or DEFAULT_BASE_URL).rstrip("/")
    url = f"{base}/v8/finance/chart/{ticker}"
    http = session or requests
    resp = http.get(url, params={"range": range, "interval": "1d"}, timeout=timeout,
                    headers={"Accept": "application/json", "User-Agent": "cryptolstm/0.1"})
    if resp.status_code != 200:
        raise HttpError(resp.status_code, url)
    try:
        doc = resp.json()
    except ValueError as exc:
        raise ApiShapeError(f"response for {ticker!r} is not JSON") from exc
    return parse_chart_json(doc, ticker)


def extract_close(series: CandleSeries) -> PriceVector:
    return PriceVector(series.ticker,
                       tuple(c.close for c in series.candles),
                       tuple(c.date for c in series.candles))


def price_vector(values: Sequence[float], start: dt.date = dt.date(2020, 1, 1),
                 ticker: str = "SYNTH") -> PriceVector:
    """Wrap a bare list of closes with consecutive daily dates; handy for synthetic data."""
    dates = tuple(start + dt.timedelta(days=i) for i in range(len(values)))
    return PriceVector(ticker, tuple(float(v) for v in values), dates)


FIXTURE_TICKERS = ("EOS-USD", "DOGE-USD", "ETH-USD", "BTC-USD")


def fixture_text(ticker: str = "EOS-USD", kind: str = "csv") -> str:
    """Raw text of a bundled frozen fixture (``kind`` is ``csv`` or ``chart.json``)."""
    return (resources.files("cryptolstm") / "data" / f"{ticker}.{kind}").read_text()


def load_fixture(ticker: str = "EOS-USD") -> CandleSeries:
    return parse_ohlcv_csv(fixture_text(ticker), ticker=ticker)
