"""Shared fixtures: a local HTTP server for fetch tests, object factories,
and a terminal summary that reports each acceptance criterion on its own line."""

from __future__ import annotations

import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from morpes.profile import Profile, ProfileTerm
from morpes.segmenter import Image, Link, Segment

_acceptance_results: list[tuple[str, bool]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.location[0].endswith("test_acceptance.py"):
        label = getattr(item.function, "_criterion", item.name)
        _acceptance_results.append((label, report.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_results:
        terminalreporter.section("acceptance criteria")
        for label, passed in _acceptance_results:
            terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {label}")


class CannedHandler(BaseHTTPRequestHandler):
    """Serves whatever the test put into ``server.responses``."""

    def do_GET(self):
        entry = self.server.responses.get(self.path)  # type: ignore[attr-defined]
        if entry is None:
            self.send_response(404)
            self.send_header("Content-Type", "text/plain")
            self.end_headers()
            self.wfile.write(b"not found")
            return
        if callable(entry):
            entry(self)
            return
        status, content_type, body = entry
        if isinstance(body, str):
            body = body.encode("utf-8")
        self.send_response(status)
        if content_type:
            self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


class LocalServer:
    def __init__(self):
        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), CannedHandler)
        self.httpd.responses = {}  # type: ignore[attr-defined]
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    @property
    def responses(self) -> dict:
        return self.httpd.responses  # type: ignore[attr-defined]

    def url(self, path: str) -> str:
        host, port = self.httpd.server_address
        return f"http://{host}:{port}{path}"

    def close(self):
        self.httpd.shutdown()
        self.httpd.server_close()


@pytest.fixture
def local_server():
    server = LocalServer()
    yield server
    server.close()


def make_segment(
    segment_id: str = "seg-0",
    order_index: int = 0,
    text: str = "",
    links: tuple = (),
    images: tuple = (),
    heading_level: int = 0,
    emphasis_count: int = 0,
    dom_depth: int = 1,
    html_fragment: str | None = None,
) -> Segment:
    return Segment(
        id=segment_id,
        order_index=order_index,
        html_fragment=html_fragment if html_fragment is not None else f"<div>{text}</div>",
        text=text,
        links=tuple(Link(href=href, anchor_text=anchor) for href, anchor in links),
        images=tuple(Image(src=src, alt_text=alt) for src, alt in images),
        char_count=len(text),
        heading_level=heading_level,
        emphasis_count=emphasis_count,
        dom_depth=dom_depth,
    )


def make_profile(user_id: str = "u1", at: float = 0.0, **weights: float) -> Profile:
    return Profile(
        user_id=user_id,
        terms={
            term: ProfileTerm(term=term, weight=weight, updated_at=at)
            for term, weight in weights.items()
        },
    )
