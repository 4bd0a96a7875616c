import datetime as dt
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cryptolstm import market_data as md

HEADER = "Date,Open,High,Low,Close,Adj Close,Volume\n"


def test_parse_two_rows_sorted():
    text = HEADER + "2020-01-02,2,3,1,2.5,2.5,10\n2020-01-01,1,2,0.5,1.5,1.5,20\n"
    s = md.parse_ohlcv_csv(text, "X")
    assert len(s) == 2
    assert s.dates == [dt.date(2020, 1, 1), dt.date(2020, 1, 2)]
    assert s.dropped == 0


def test_null_close_row_is_dropped_and_counted():
    text = HEADER + ("2020-01-01,1,2,0.5,1.5,1.5,20\n"
                     "2020-01-02,null,null,null,null,null,null\n"
                     "2020-01-03,2,3,1,2.5,2.5,10\n")
    s = md.parse_ohlcv_csv(text)
    assert len(s) == 2
    assert s.dropped == 1


def test_empty_field_counts_as_missing():
    text = HEADER + "2020-01-01,1,2,0.5,,1.5,20\n2020-01-02,2,3,1,2.5,2.5,10\n"
    assert md.parse_ohlcv_csv(text).dropped == 1


def test_header_only_is_empty_series():
    with pytest.raises(md.EmptySeries):
        md.parse_ohlcv_csv(HEADER)


@pytest.mark.parametrize("text", ["", "date,open,high\n2020-01-01,1,2\n", "Date,Open,High,Low,Close,Volume\n"])
def test_missing_header(text):
    with pytest.raises(md.MissingHeader):
        md.parse_ohlcv_csv(text)


def test_wrong_column_count_is_malformed():
    with pytest.raises(md.MalformedRow):
        md.parse_ohlcv_csv(HEADER + "2020-01-01,1,2,0.5,1.5,20\n")


def test_ohlc_violation_demoted_to_dropped():
    # low above high
    text = HEADER + "2020-01-01,1,2,3,1.5,1.5,20\n2020-01-02,2,3,1,2.5,2.5,10\n"
    s = md.parse_ohlcv_csv(text)
    assert len(s) == 1 and s.dropped == 1


def test_duplicate_dates_keep_first():
    text = HEADER + "2020-01-01,1,2,0.5,1.5,1.5,20\n2020-01-01,1,2,0.5,1.7,1.7,20\n"
    s = md.parse_ohlcv_csv(text)
    assert len(s) == 1 and s.candles[0].close == 1.5 and s.dropped == 1


def test_extract_close_projection():
    text = HEADER + "2020-01-01,3,3.2,3,3.1,3.1,1\n2020-01-02,3.1,3.5,3,3.4,3.4,1\n"
    pv = md.extract_close(md.parse_ohlcv_csv(text))
    assert pv.values == (3.1, 3.4)
    assert pv.dates == (dt.date(2020, 1, 1), dt.date(2020, 1, 2))


def test_extract_close_singleton():
    pv = md.extract_close(md.parse_ohlcv_csv(HEADER + "2020-01-01,3,3.2,3,3.1,3.1,1\n"))
    assert len(pv) == 1


def test_eos_fixture_span(eos_series, eos_prices):
    # row count of the frozen file, computed independently of the parser
    raw_rows = md.fixture_text("EOS-USD").strip().splitlines()[1:]
    assert len(eos_prices) == len(raw_rows) == 1527
    assert eos_prices.dates[0] == dt.date(2017, 11, 9)
    assert eos_prices.dates[-1] == dt.date(2022, 1, 13)
    assert eos_series.dropped == 0


@pytest.mark.parametrize("ticker", md.FIXTURE_TICKERS)
def test_fixture_csv_matches_recorded_api_response(ticker):
    from_csv = md.parse_ohlcv_csv(md.fixture_text(ticker), ticker)
    from_json = md.parse_chart_json(json.loads(md.fixture_text(ticker, "chart.json")), ticker)
    assert from_csv == from_json


candle_rows = st.lists(
    st.tuples(
        st.floats(0.001, 1e6, allow_nan=False),
        st.floats(0.0, 0.5), st.floats(0.0, 0.5), st.floats(-0.4, 0.4),
        st.integers(0, 10**12),
    ),
    min_size=1, max_size=30,
)


@given(candle_rows)
@settings(max_examples=60, deadline=None)
def test_csv_round_trip(rows):
    candles = []
    for k, (base, up, down, move, vol) in enumerate(rows):
        close = base * (1 + move)
        hi = max(base, close) * (1 + up)
        lo = min(base, close) * (1 - down)
        candles.append(md.Candle(dt.date(2019, 1, 1) + dt.timedelta(days=k), base, hi, lo, close, close, vol))
    series = md.CandleSeries("T", tuple(candles))
    again = md.parse_ohlcv_csv(md.serialize_csv(series), "T")
    assert again == series
    assert md.extract_close(again).values == tuple(c.close for c in candles)


def _chart_doc(stamps, closes, adj=True):
    quote = {"open": closes, "high": [None if c is None else c + 1 for c in closes],
             "low": [None if c is None else c - 0.5 for c in closes], "close": closes,
             "volume": [100] * len(closes)}
    res = {"timestamp": stamps, "indicators": {"quote": [quote]}}
    if adj:
        res["indicators"]["adjclose"] = [{"adjclose": closes}]
    return {"chart": {"result": [res], "error": None}}


def test_fetch_replays_recorded_fixture(chart_server):
    doc = json.loads(md.fixture_text("EOS-USD", "chart.json"))
    res = doc["chart"]["result"][0]
    res["timestamp"] = res["timestamp"][:3]
    for k in res["indicators"]["quote"][0]:
        res["indicators"]["quote"][0][k] = res["indicators"]["quote"][0][k][:3]
    res["indicators"]["adjclose"][0]["adjclose"] = res["indicators"]["adjclose"][0]["adjclose"][:3]
    chart_server.add("EOS-USD", doc)
    s = md.fetch_daily_history("EOS-USD", base_url=chart_server.base_url)
    assert len(s) == 3 and s.ticker == "EOS-USD"
    assert s.candles[0].date == dt.date(2017, 11, 9)
    path = chart_server.requests[-1]
    assert path.startswith("/v8/finance/chart/EOS-USD?")
    assert "range=max" in path and "interval=1d" in path


def test_fetch_drops_null_close(chart_server):
    stamps = [1577836800 + 86400 * k + 3600 for k in range(5)]  # intraday stamps floor to the day
    chart_server.add("X", _chart_doc(stamps, [1.0, 2.0, None, 4.0, 5.0]))
    s = md.fetch_daily_history("X", base_url=chart_server.base_url)
    assert len(s) == 4 and s.dropped == 1
    assert s.candles[0].date == dt.date(2020, 1, 1)


def test_adjclose_mirrors_close_when_absent(chart_server):
    chart_server.add("X", _chart_doc([1577836800, 1577923200], [1.0, 2.0], adj=False))
    s = md.fetch_daily_history("X", base_url=chart_server.base_url)
    assert [c.adj_close for c in s.candles] == [1.0, 2.0]


def test_empty_result_is_shape_error(chart_server):
    chart_server.add("NOPE", {"chart": {"result": [], "error": None}})
    with pytest.raises(md.ApiShapeError):
        md.fetch_daily_history("NOPE", base_url=chart_server.base_url)


def test_missing_quote_is_shape_error():
    with pytest.raises(md.ApiShapeError):
        md.parse_chart_json({"chart": {"result": [{"timestamp": [1]}]}})


def test_non_200_is_http_error(chart_server):
    with pytest.raises(md.HttpError) as info:
        md.fetch_daily_history("UNKNOWN", base_url=chart_server.base_url)
    assert info.value.status == 404


def test_all_null_response_is_empty(chart_server):
    chart_server.add("X", _chart_doc([1577836800], [None]))
    with pytest.raises(md.EmptySeries):
        md.fetch_daily_history("X", base_url=chart_server.base_url)


def test_base_url_from_environment(chart_server, monkeypatch):
    chart_server.add("X", _chart_doc([1577836800], [1.0]))
    monkeypatch.setenv(md.BASE_URL_ENV, chart_server.base_url)
    assert len(md.fetch_daily_history("X")) == 1
