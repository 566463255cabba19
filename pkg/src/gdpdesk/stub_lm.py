"""Stub chat-completion endpoint for tests and offline demos.

Three modes:
  fixed -- every completion is ``fixed_text``
  echo  -- the completion repeats the last user message
  fault -- every request gets a 500

The server records each request payload so tests can assert on what was
sent (temperature passthrough, message layout). Runs on an ephemeral port
in a daemon thread; use as a context manager.
"""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class StubLmServer:
    def __init__(self, mode: str = "fixed", fixed_text: str = "stub summary",
                 delay_seconds: float = 0.0) -> None:
        if mode not in ("fixed", "echo", "fault"):
            raise ValueError(f"unknown stub mode {mode!r}")
        self.mode = mode
        self.fixed_text = fixed_text
        self.delay_seconds = delay_seconds
        self.requests: list[dict] = []
        self.peak_concurrency = 0
        self._active = 0
        self._counter_lock = threading.Lock()
        self._httpd: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        assert self._httpd is not None, "server not started"
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}/v1/chat/completions"

    def start(self) -> "StubLmServer":
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self) -> None:  # noqa: N802 (http.server API)
                with stub._counter_lock:
                    stub._active += 1
                    stub.peak_concurrency = max(stub.peak_concurrency, stub._active)
                try:
                    self._handle()
                finally:
                    with stub._counter_lock:
                        stub._active -= 1

            def _handle(self) -> None:
                length = int(self.headers.get("Content-Length", 0))
                try:
                    payload = json.loads(self.rfile.read(length) or b"{}")
                except json.JSONDecodeError:
                    payload = {}
                stub.requests.append(payload)
                if stub.delay_seconds:
                    time.sleep(stub.delay_seconds)

                if stub.mode == "fault":
                    self._reply(500, {"error": "injected failure"})
                    return
                if stub.mode == "echo":
                    users = [m for m in payload.get("messages", [])
                             if m.get("role") == "user"]
                    text = users[-1]["content"] if users else ""
                else:
                    text = stub.fixed_text
                self._reply(200, {
                    "choices": [{"message": {"role": "assistant", "content": text}}]
                })

            def _reply(self, status: int, body: dict) -> None:
                data = json.dumps(body).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args) -> None:   # keep test output quiet
                pass

        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._httpd:
            self._httpd.shutdown()
            self._httpd.server_close()
            self._httpd = None

    def __enter__(self) -> "StubLmServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
