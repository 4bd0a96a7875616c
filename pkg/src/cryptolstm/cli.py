"""Command-line driver: fetch, run, sweep, diagnose and batch.

Exit codes: 0 success, 1 every batch ticker failed, 2 network/API failure,
3 output not writable, 4 unusable series (too short, constant, bad CSV).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import requests

from . import market_data as md
from .evaluation import epoch_sweep, lag_diagnostic, persistence_baseline, sweep_csv
from .forecast import TrainConfig, fit_and_forecast, persistence_model
from .preprocess import DegenerateRange, SeriesTooShort
from .reporting import Timers, benchmark_report, forecast_chart, loss_chart, render_chart

EXIT_API = 2
EXIT_OUTPUT = 3
EXIT_DATA = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    ticker: str = "EOS-USD"
    csv: str | None = None
    fixture: bool = False
    lookback: int = 60
    test_len: int = 200
    epochs: int = 50
    batch_size: int = 32
    hidden: int = 50
    dropout: float = 0.2
    seed: int = 42
    out: str = "out"

    def train_config(self, **overrides) -> TrainConfig:
        kw = dict(epochs=self.epochs, batch_size=self.batch_size, lookback=self.lookback,
                  hidden_size=self.hidden, dropout=self.dropout, seed=self.seed)
        kw.update(overrides)
        return TrainConfig(**kw)


def load_prices(ticker: str, csv_path: str | None = None, fixture: bool = False) -> md.PriceVector:
    try:
        if csv_path:
            series = md.parse_ohlcv_csv(Path(csv_path).read_text(), ticker=ticker)
        elif fixture:
            series = md.load_fixture(ticker)
        else:
            series = md.fetch_daily_history(ticker)
    except FileNotFoundError as exc:
        raise CliError(EXIT_DATA, f"cannot read {exc.filename}") from exc
    except (md.HttpError, md.ApiShapeError, requests.RequestException) as exc:
        raise CliError(EXIT_API, f"{ticker}: {exc}") from exc
    except md.EmptySeries as exc:
        code = EXIT_DATA if (csv_path or fixture) else EXIT_API
        raise CliError(code, f"{ticker}: no usable price history ({exc})") from exc
    except md.MarketDataError as exc:
        raise CliError(EXIT_DATA, f"{ticker}: {exc}") from exc
    return md.extract_close(series)


def _outdir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_OUTPUT, f"cannot create output directory {out}: {exc}") from exc
    return out


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise CliError(EXIT_OUTPUT, f"cannot write {path}: {exc}") from exc


def _forecast(prices, cfg: RunConfig, **kw):
    try:
        return fit_and_forecast(prices, cfg.train_config(), cfg.test_len, **kw)
    except DegenerateRange as exc:
        raise CliError(EXIT_DATA, f"DegenerateRange: {exc}") from exc
    except SeriesTooShort as exc:
        raise CliError(EXIT_DATA, f"SeriesTooShort: {exc}") from exc


def cmd_fetch(ticker: str, out_csv: str) -> int:
    try:
        series = md.fetch_daily_history(ticker)
    except (md.HttpError, md.ApiShapeError, md.EmptySeries, requests.RequestException) as exc:
        raise CliError(EXIT_API, f"{ticker}: {exc}") from exc
    _write(Path(out_csv), md.serialize_csv(series))
    print(f"{ticker}: wrote {len(series)} rows to {out_csv}"
          + (f" ({series.dropped} dropped)" if series.dropped else ""))
    return 0


def cmd_run(cfg: RunConfig, prices: md.PriceVector | None = None) -> int:
    out = _outdir(cfg.out)
    timers = Timers()
    timers.start("Overall time")
    if prices is None:
        prices = load_prices(cfg.ticker, cfg.csv, cfg.fixture)
    run = _forecast(prices, cfg, timers=timers)
    result = run.result

    _write(out / "forecast.csv", result.to_csv())
    chart = forecast_chart(prices.ticker, run.train_dates, run.train_values, result)
    _write(out / "forecast.svg", render_chart(chart))
    _write(out / "loss.svg", render_chart(loss_chart(prices.ticker, result.loss_history)))
    timers.stop("Overall time")

    bench = benchmark_report(timers)
    _write(out / "benchmark.txt", bench.table())
    _write(out / "benchmark.json", bench.to_json())
    timings = {sw.name: sw.elapsed for sw in timers}
    _write(out / "report.json", result.to_json({"timings": timings}))

    print(f"{prices.ticker}: RMSE over last {cfg.test_len} days = {result.rmse_usd:.3f} USD")
    for name, secs in timings.items():
        print(f"{name}: {secs:.3f} s")
    return 0


def cmd_sweep(cfg: RunConfig, epochs_list: list[int]) -> int:
    out = _outdir(cfg.out)
    prices = load_prices(cfg.ticker, cfg.csv, cfg.fixture)
    try:
        rows = epoch_sweep(prices, epochs_list, cfg.train_config(), cfg.test_len)
    except (DegenerateRange, SeriesTooShort) as exc:
        raise CliError(EXIT_DATA, f"{type(exc).__name__}: {exc}") from exc
    text = sweep_csv(rows)
    _write(out / "sweep.csv", text)
    print(f"{'Epochs':>6}  RMSE (USD)  wall time (s)")
    for r in rows:
        print(f"{r.epochs:>6}  {r.rmse_usd:10.3f}  {r.wall_time_s:13.2f}")
    return 0


def cmd_diagnose(cfg: RunConfig, model: str = "lstm", max_lag: int = 5) -> int:
    out = _outdir(cfg.out)
    prices = load_prices(cfg.ticker, cfg.csv, cfg.fixture)
    stub = persistence_model if model == "persistence" else None
    result = _forecast(prices, cfg, model=stub).result
    baseline = persistence_baseline(prices, cfg.test_len)
    diag = lag_diagnostic(result.actual_usd, result.predicted_usd, max_lag, baseline=baseline)
    doc = {"ticker": prices.ticker, "model": model, **diag.to_dict()}
    _write(out / "diagnostic.json", json.dumps(doc, indent=2) + "\n")
    print(f"{prices.ticker}: best_lag = {diag.best_lag} (correlation {diag.correlation_at_best:.4f}); "
          f"RMSE model {diag.rmse_model_usd:.3f} USD vs persistence {diag.rmse_persistence_usd:.3f} USD")
    return 0


def cmd_batch(cfg: RunConfig, tickers: list[str], csv_dir: str | None = None) -> int:
    out = _outdir(cfg.out)
    ok, failed = [], []
    for ticker in tickers:
        csv_path = str(Path(csv_dir) / f"{ticker}.csv") if csv_dir else None
        sub = RunConfig(**{**vars(cfg), "ticker": ticker, "csv": csv_path, "out": str(out / ticker)})
        try:
            cmd_run(sub)
            ok.append(ticker)
        except CliError as exc:
            print(f"{ticker}: failed ({exc})", file=sys.stderr)
            failed.append(ticker)
    print(f"batch: {len(ok)}/{len(tickers)} tickers succeeded"
          + (f"; failed: {', '.join(failed)}" if failed else ""))
    return 0 if ok else 1


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    d = RunConfig()
    p.add_argument("--ticker", default=d.ticker, help="symbol, e.g. EOS-USD")
    p.add_argument("--csv", default=None, help="read history from this CSV instead of fetching")
    p.add_argument("--fixture", action="store_true", help="use the bundled frozen fixture for --ticker")
    p.add_argument("--lookback", type=int, default=d.lookback, help="days per input window")
    p.add_argument("--test-len", type=int, default=d.test_len, help="trailing days held out and predicted")
    p.add_argument("--epochs", type=int, default=d.epochs, help="training epochs")
    p.add_argument("--batch-size", type=int, default=d.batch_size, help="minibatch size")
    p.add_argument("--hidden", type=int, default=d.hidden, help="LSTM hidden units")
    p.add_argument("--dropout", type=float, default=d.dropout, help="dropout rate after the LSTM")
    p.add_argument("--seed", type=int, default=d.seed, help="seed for init, shuffling and dropout")
    p.add_argument("--out", default=d.out, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="cryptolstm", formatter_class=fmt,
        description=f"LSTM close-price forecasting. API host override: ${md.BASE_URL_ENV}.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fetch", help="download daily history to CSV", formatter_class=fmt)
    p.add_argument("--ticker", required=True)
    p.add_argument("--out", required=True, help="CSV file to write")

    p = sub.add_parser("run", help="train, predict and write all artifacts", formatter_class=fmt)
    _add_run_flags(p)

    p = sub.add_parser("sweep", help="RMSE against number of epochs", formatter_class=fmt)
    _add_run_flags(p)
    p.add_argument("--epochs-list", default="5,15,25,50,100", help="comma-separated epoch counts")

    p = sub.add_parser("diagnose", help="one-day-lag diagnostic", formatter_class=fmt)
    _add_run_flags(p)
    p.add_argument("--model", choices=["lstm", "persistence"], default="lstm")
    p.add_argument("--max-lag", type=int, default=5)

    p = sub.add_parser("batch", help="run several tickers", formatter_class=fmt)
    _add_run_flags(p)
    p.add_argument("--tickers", default="EOS-USD,DOGE-USD,ETH-USD,BTC-USD", help="comma-separated")
    p.add_argument("--csv-dir", default=None, help="directory holding TICKER.csv files")
    return parser


def _run_config(args) -> RunConfig:
    return RunConfig(args.ticker, args.csv, args.fixture, args.lookback, args.test_len, args.epochs,
                     args.batch_size, args.hidden, args.dropout, args.seed, args.out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fetch":
            return cmd_fetch(args.ticker, args.out)
        cfg = _run_config(args)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg, [int(e) for e in args.epochs_list.split(",") if e.strip()])
        if args.command == "diagnose":
            return cmd_diagnose(cfg, args.model, args.max_lag)
        if args.command == "batch":
            return cmd_batch(cfg, [t.strip() for t in args.tickers.split(",") if t.strip()], args.csv_dir)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
