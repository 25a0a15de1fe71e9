"""Minimal threaded HTTP server fronting the keyserver API.

Plain stdlib http.server: no framework, no state beyond the service object.
TLS termination is a deployment concern and lives outside this process.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qsl, urlsplit

from .api import ApiRequest, handle


class _Handler(BaseHTTPRequestHandler):
    server_version = "amakey-keyserver"
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):
        pass

    def _dispatch(self, method: str):
        split = urlsplit(self.path)
        query = dict(parse_qsl(split.query))
        body = None
        if method == "POST":
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            if raw:
                try:
                    body = json.loads(raw.decode("utf-8"))
                except Exception:
                    body = None
        response = handle(self.server.service, ApiRequest(method, split.path, query, body))
        payload = json.dumps(response.body, sort_keys=True, separators=(",", ":")).encode("utf-8")
        self.send_response(response.status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")


class KeyserverHttpServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, service, host: str = "127.0.0.1", port: int = 0):
        super().__init__((host, port), _Handler)
        self.service = service

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


def make_server(service, host: str = "127.0.0.1", port: int = 0) -> KeyserverHttpServer:
    return KeyserverHttpServer(service, host, port)
