"""Static SVG line charts and phase-timing benchmark tables."""

from __future__ import annotations

import datetime as dt
import json
import math
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

ROLE_COLORS = {
    "history": "#2ca02c",
    "actual": "#1f77b4",
    "predicted": "#d62728",
    "loss": "#9467bd",
}


class EmptyChart(ValueError):
    pass


class TimerMisuse(RuntimeError):
    pass


@dataclass(frozen=True)
class Series:
    name: str
    x: Sequence  # dates or numbers
    values: Sequence[float]
    role: str = "actual"

    def __post_init__(self):
        if len(self.x) != len(self.values):
            raise ValueError(f"series {self.name!r}: x and values differ in length")
        if self.role not in ROLE_COLORS:
            raise ValueError(f"unknown color role {self.role!r}")


@dataclass(frozen=True)
class ChartSpec:
    title: str
    series: tuple[Series, ...]
    path: str | None = None
    x_label: str = "Date"
    y_label: str = "Close (USD)"
    width: int = 960
    height: int = 480


def _xnum(v) -> float:
    if isinstance(v, dt.datetime):
        return v.timestamp() / 86400.0
    if isinstance(v, dt.date):
        return float(v.toordinal())
    return float(v)


def _padded(lo: float, hi: float, frac: float = 0.05) -> tuple[float, float]:
    if hi == lo:
        pad = abs(lo) * frac or 1.0
    else:
        pad = (hi - lo) * frac
    return lo - pad, hi + pad


def _label(v, is_date: bool) -> str:
    if is_date:
        return dt.date.fromordinal(int(round(v))).isoformat()
    return f"{v:.4g}"


def render_chart(spec: ChartSpec) -> str:
    """Render ``spec`` as an SVG 1.1 document; identical specs give identical bytes."""
    series = [s for s in spec.series if len(s.values)]
    if not series:
        raise EmptyChart("chart needs at least one non-empty series")

    xs = [[_xnum(v) for v in s.x] for s in series]
    ys = [[float(v) for v in s.values] for s in series]
    flat_y = [v for col in ys for v in col if math.isfinite(v)]
    flat_x = [v for col in xs for v in col]
    if not flat_y:
        raise EmptyChart("no finite values to plot")
    is_date = isinstance(series[0].x[0], dt.date)
    x0, x1 = _padded(min(flat_x), max(flat_x), 0.01)
    y0, y1 = _padded(min(flat_y), max(flat_y))

    W, H = spec.width, spec.height
    left, right, top, bottom = 80, 150, 40, 50
    pw, ph = W - left - right, H - top - bottom

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (y1 - v) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2:.2f}" y="24" text-anchor="middle" font-size="16">{escape(spec.title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for k in range(5):
        yv = y0 + (y1 - y0) * k / 4
        xv = x0 + (x1 - x0) * k / 4
        out.append(f'<text x="{left - 6}" y="{sy(yv) + 4:.2f}" text-anchor="end">{_label(yv, False)}</text>')
        out.append(f'<text x="{sx(xv):.2f}" y="{top + ph + 18}" text-anchor="middle">{_label(xv, is_date)}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{H - 8}" text-anchor="middle">{escape(spec.x_label)}</text>')
    out.append(f'<text x="16" y="{top + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {top + ph / 2:.2f})">{escape(spec.y_label)}</text>')

    for s, col_x, col_y in zip(series, xs, ys):
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(col_x, col_y))
        out.append(f'<polyline fill="none" stroke="{ROLE_COLORS[s.role]}" stroke-width="1.5" '
                   f'data-series="{escape(s.name)}" points="{pts}"/>')

    lx = left + pw + 16
    for k, s in enumerate(series):
        yy = top + 10 + 20 * k
        out.append(f'<line x1="{lx}" y1="{yy}" x2="{lx + 24}" y2="{yy}" '
                   f'stroke="{ROLE_COLORS[s.role]}" stroke-width="3"/>')
        out.append(f'<text x="{lx + 30}" y="{yy + 4}">{escape(s.name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_chart(spec: ChartSpec, path=None) -> Path:
    target = Path(path or spec.path)
    target.write_text(render_chart(spec))
    return target


def forecast_chart(ticker: str, train_dates, train_values, result, path=None) -> ChartSpec:
    return ChartSpec(
        title=f"{ticker} close price and LSTM prediction",
        series=(
            Series("history", list(train_dates), list(train_values), "history"),
            Series("actual", list(result.dates), list(result.actual_usd), "actual"),
            Series("predicted", list(result.dates), list(result.predicted_usd), "predicted"),
        ),
        path=path,
    )


def loss_chart(ticker: str, loss_history, path=None) -> ChartSpec:
    values = list(loss_history.values)
    return ChartSpec(
        title=f"{ticker} model loss",
        series=(Series("loss", list(range(1, len(values) + 1)), values, "loss"),),
        path=path, x_label="Epoch", y_label="Loss (MSE, normalized)",
    )


class Stopwatch:
    """One named phase timer: start once, stop once.

    Elapsed time comes from ``time.perf_counter``; the wall-clock start is
    kept only for display.
    """

    def __init__(self, name: str):
        self.name = name
        self._t0: float | None = None
        self._elapsed: float | None = None
        self.started_at: dt.datetime | None = None

    def start(self) -> "Stopwatch":
        if self._t0 is not None:
            raise TimerMisuse(f"timer {self.name!r} already started")
        self.started_at = dt.datetime.now().replace(microsecond=0)
        self._t0 = time.perf_counter()
        return self

    def stop(self) -> float:
        if self._t0 is None:
            raise TimerMisuse(f"timer {self.name!r} stopped before it was started")
        if self._elapsed is not None:
            raise TimerMisuse(f"timer {self.name!r} already stopped")
        self._elapsed = time.perf_counter() - self._t0
        return self._elapsed

    @property
    def elapsed(self) -> float:
        if self._elapsed is None:
            raise TimerMisuse(f"timer {self.name!r} has not been stopped")
        return self._elapsed

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()


def stopwatch(name: str) -> Stopwatch:
    return Stopwatch(name)


class Timers:
    """Ordered collection of stopwatches addressed by phase name."""

    def __init__(self):
        self._watches: dict[str, Stopwatch] = {}

    def start(self, name: str) -> Stopwatch:
        if name in self._watches:
            raise TimerMisuse(f"timer {name!r} already started")
        sw = self._watches[name] = Stopwatch(name)
        return sw.start()

    def stop(self, name: str) -> float:
        if name not in self._watches:
            raise TimerMisuse(f"timer {name!r} stopped before it was started")
        return self._watches[name].stop()

    def __iter__(self):
        return iter(self._watches.values())

    def __len__(self):
        return len(self._watches)

    def __getitem__(self, name: str) -> Stopwatch:
        return self._watches[name]


def _gib(n) -> str:
    return f"{n / 2 ** 30:.1f} GiB"


def collect_sysinfo() -> dict[str, str]:
    """Best-effort machine description; anything unavailable is ``unknown``."""
    info = dict.fromkeys([
        "cpu cores", "cpu threads", "cpu frequency", "mem.available", "mem.percent",
        "mem.total", "mem.used", "python", "python.pip", "python.version",
        "uname.processor", "uname.system", "uname.version"], "unknown")
    try:
        import psutil

        info["cpu cores"] = str(psutil.cpu_count(logical=False) or "unknown")
        info["cpu threads"] = str(psutil.cpu_count(logical=True) or "unknown")
        try:
            freq = psutil.cpu_freq()
            if freq and freq.max:
                info["cpu frequency"] = f"{freq.max:.1f} MHz"
            elif freq and freq.current:
                info["cpu frequency"] = f"{freq.current:.1f} MHz"
        except (OSError, NotImplementedError):
            pass
        mem = psutil.virtual_memory()
        info["mem.available"] = _gib(mem.available)
        info["mem.percent"] = f"{mem.percent} %"
        info["mem.total"] = _gib(mem.total)
        info["mem.used"] = _gib(mem.used)
    except Exception:  # psutil missing or unsupported platform
        pass
    try:
        from importlib.metadata import version

        info["python.pip"] = version("pip")
    except Exception:
        pass
    info["python"] = sys.version.replace("\n", " ")
    info["python.version"] = platform.python_version()
    uname = platform.uname()
    info["uname.processor"] = uname.processor or uname.machine or "unknown"
    info["uname.system"] = uname.system or "unknown"
    info["uname.version"] = uname.release or "unknown"
    return info


@dataclass
class BenchmarkRow:
    name: str
    seconds: float
    start: str
    os: str


@dataclass
class BenchmarkReport:
    rows: list[BenchmarkRow]
    sysinfo: dict = field(default_factory=dict)

    def table(self) -> str:
        head = ("Name", "Time", "Start", "OS Version")
        body = [(r.name, f"{r.seconds:.3f} s", r.start, r.os) for r in self.rows]
        widths = [max(len(row[i]) for row in [head, *body]) for i in range(4)]
        fmt = lambda row: " | ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()
        lines = [fmt(head), "-+-".join("-" * w for w in widths)]
        lines += [fmt(row) for row in body]
        if self.sysinfo:
            lines.append("")
            kw = max(len(k) for k in self.sysinfo)
            lines.append("Attribute".ljust(kw) + " | Value")
            lines.append("-" * kw + "-+-" + "-" * 20)
            lines += [f"{k.ljust(kw)} | {v}" for k, v in self.sysinfo.items()]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"phases": [vars(r) for r in self.rows], "system": dict(self.sysinfo)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def benchmark_report(timers, sysinfo: dict | None = None) -> BenchmarkReport:
    """Tabulate stopped timers in the order they were started."""
    os_desc = f"{platform.system()} {platform.release()}".strip() or "unknown"
    rows = []
    for sw in timers:
        if sw.elapsed < 0:  # perf_counter is monotonic; kept as a hard guard
            raise TimerMisuse(f"negative elapsed time for {sw.name!r}")
        start = sw.started_at.strftime("%Y-%m-%d %H:%M:%S") if sw.started_at else "unknown"
        rows.append(BenchmarkRow(sw.name, sw.elapsed, start, os_desc))
    return BenchmarkReport(rows, collect_sysinfo() if sysinfo is None else sysinfo)
