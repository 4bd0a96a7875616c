"""Regenerate the frozen daily-history fixtures under src/cryptolstm/data.

The sandbox that produced this repository had no route to the chart API, so the
fixtures are seeded synthetic paths: a log-space Brownian bridge pinned to
approximate historical closing levels of each coin, with daily volatility in
the range those coins actually showed.  They are frozen; re-running this
script reproduces them byte for byte.

    python tools/make_fixtures.py
"""

from __future__ import annotations

import datetime as dt
import json
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "cryptolstm" / "data"

START = dt.date(2017, 11, 9)
END = dt.date(2022, 1, 13)

# (date, approximate close in USD)
ANCHORS = {
    "EOS-USD": (0.055, [
        ("2017-11-09", 0.86), ("2018-01-13", 16.0), ("2018-02-06", 6.5),
        ("2018-04-29", 21.5), ("2018-08-14", 4.3), ("2018-12-14", 1.7),
        ("2019-05-30", 8.2), ("2019-12-17", 2.2), ("2020-02-14", 5.0),
        ("2020-03-13", 1.8), ("2020-08-15", 3.3), ("2020-12-31", 2.6),
        ("2021-05-12", 13.0), ("2021-06-22", 3.4), ("2021-09-06", 6.0),
        ("2021-12-31", 3.0), ("2022-01-13", 3.1),
    ]),
    "DOGE-USD": (0.06, [
        ("2017-11-09", 0.0012), ("2018-01-07", 0.017), ("2018-12-14", 0.0019),
        ("2019-07-01", 0.0035), ("2020-03-13", 0.0016), ("2020-12-31", 0.0057),
        ("2021-02-08", 0.078), ("2021-05-08", 0.68), ("2021-07-20", 0.17),
        ("2021-10-28", 0.29), ("2022-01-13", 0.17),
    ]),
    "ETH-USD": (0.045, [
        ("2017-11-09", 320.0), ("2018-01-13", 1390.0), ("2018-12-14", 84.0),
        ("2019-06-26", 330.0), ("2020-03-13", 110.0), ("2020-12-31", 740.0),
        ("2021-05-12", 4170.0), ("2021-07-20", 1790.0), ("2021-11-08", 4810.0),
        ("2022-01-13", 3250.0),
    ]),
    "BTC-USD": (0.035, [
        ("2017-11-09", 7140.0), ("2017-12-17", 19500.0), ("2018-12-15", 3240.0),
        ("2019-06-26", 11800.0), ("2020-03-12", 4970.0), ("2020-12-31", 29000.0),
        ("2021-04-14", 63500.0), ("2021-07-20", 29800.0), ("2021-11-08", 67500.0),
        ("2022-01-13", 42600.0),
    ]),
}


def bridge_path(rng, anchors, sigma):
    days = [(dt.date.fromisoformat(d) - START).days for d, _ in anchors]
    logs = [np.log(p) for _, p in anchors]
    n = (END - START).days + 1
    out = np.empty(n)
    for (d0, l0), (d1, l1) in zip(zip(days, logs), zip(days[1:], logs[1:])):
        steps = d1 - d0
        walk = np.concatenate([[0.0], np.cumsum(rng.normal(0.0, sigma, steps))])
        frac = np.arange(steps + 1) / steps
        bridge = walk - frac * walk[-1]
        out[d0:d1 + 1] = l0 + frac * (l1 - l0) + bridge
    return np.exp(out)


def candles(rng, close):
    n = close.size
    open_ = np.concatenate([[close[0] * np.exp(rng.normal(0, 0.01))], close[:-1]])
    wick = np.abs(rng.normal(0, 0.02, size=(2, n)))
    high = np.maximum(open_, close) * (1 + wick[0])
    low = np.minimum(open_, close) * (1 - wick[1])
    volume = np.round(np.exp(rng.normal(20.5, 0.6, n))).astype(np.int64)
    return open_, high, low, close, volume


def sig(x):
    return float(f"{x:.6g}")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for k, (ticker, (sigma, anchors)) in enumerate(ANCHORS.items()):
        rng = np.random.default_rng(20220113 + k)
        close = bridge_path(rng, anchors, sigma)
        o, h, l, c, v = candles(rng, close)
        rows = []
        stamps = []
        for i in range(close.size):
            day = START + dt.timedelta(days=i)
            vals = [sig(o[i]), sig(h[i]), sig(l[i]), sig(c[i])]
            vals[1] = max(vals)
            vals[2] = min(vals)
            rows.append((day, *vals, int(v[i])))
            stamps.append(int(dt.datetime(day.year, day.month, day.day, tzinfo=dt.timezone.utc).timestamp()))
        lines = ["Date,Open,High,Low,Close,Adj Close,Volume"]
        for day, op, hi, lo, cl, vol in rows:
            lines.append(f"{day.isoformat()},{op!r},{hi!r},{lo!r},{cl!r},{cl!r},{vol}")
        (OUT / f"{ticker}.csv").write_text("\n".join(lines) + "\n")

        quote = {
            "open": [r[1] for r in rows], "high": [r[2] for r in rows],
            "low": [r[3] for r in rows], "close": [r[4] for r in rows],
            "volume": [r[5] for r in rows],
        }
        doc = {"chart": {"result": [{
            "meta": {"symbol": ticker, "currency": "USD", "dataGranularity": "1d", "range": "max"},
            "timestamp": stamps,
            "indicators": {"quote": [quote], "adjclose": [{"adjclose": quote["close"]}]},
        }], "error": None}}
        (OUT / f"{ticker}.chart.json").write_text(json.dumps(doc, separators=(",", ":")) + "\n")


if __name__ == "__main__":
    main()
