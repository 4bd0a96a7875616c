import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import urlsplit

import numpy as np
import pytest

from cryptolstm import market_data as md


@pytest.fixture(scope="session")
def eos_series():
    return md.load_fixture("EOS-USD")


@pytest.fixture(scope="session")
def eos_prices(eos_series):
    return md.extract_close(eos_series)


def sine_prices(n=300, period=40.0, level=10.0, amp=3.0, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    t = np.arange(n)
    vals = level + amp * np.sin(2 * np.pi * t / period) + noise * rng.standard_normal(n)
    return md.price_vector(vals, ticker="SINE")


def sine_csv(path, **kw):
    prices = sine_prices(**kw)
    lines = [",".join(md.CSV_HEADER)]
    for d, v in zip(prices.dates, prices.values):
        lines.append(f"{d.isoformat()},{v!r},{v!r},{v!r},{v!r},{v!r},1000")
    path.write_text("\n".join(lines) + "\n")
    return path


class ChartReplay:
    """Serves canned chart-API responses keyed by ticker."""

    def __init__(self):
        self.routes = {}
        self.requests = []

    def add(self, ticker, body, status=200):
        self.routes[ticker] = (status, body if isinstance(body, str) else json.dumps(body))


@pytest.fixture
def chart_server():
    replay = ChartReplay()

    class Handler(BaseHTTPRequestHandler):
        def do_GET(self):
            parts = urlsplit(self.path)
            replay.requests.append(self.path)
            ticker = parts.path.rsplit("/", 1)[-1]
            status, body = replay.routes.get(ticker, (404, '{"chart":{"result":null,"error":"Not Found"}}'))
            data = body.encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def log_message(self, *args):
            pass

    server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    replay.base_url = f"http://127.0.0.1:{server.server_address[1]}"
    yield replay
    server.shutdown()
    server.server_close()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
