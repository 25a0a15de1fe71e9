"""Client transports for the keyserver API.

``HttpTransport`` opens a fresh connection per request. The anonymous
profile carries no client-identifying headers and can route through a
proxy; it exists so self-checks cannot be special-cased by a keyserver
that recognizes the querying client.

``InProcessTransport`` drives a service object through the same dispatch
and JSON round-trip as the HTTP path, which keeps the wire semantics
bit-exact for tests and the attack harness.
"""

from __future__ import annotations

import json
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass
from typing import Protocol

from ..errors import TransportError
from ..server.api import ApiRequest, handle


@dataclass(frozen=True)
class ApiResult:
    status: int
    body: dict


class Transport(Protocol):
    def get(self, path: str, params: dict[str, str] | None = None) -> ApiResult: ...

    def post(self, path: str, body: dict) -> ApiResult: ...


class HttpTransport:
    def __init__(
        self,
        base_url: str,
        *,
        proxy_url: str | None = None,
        anonymous: bool = False,
        timeout: float = 10.0,
    ):
        parsed = urllib.parse.urlsplit(base_url)
        if not parsed.scheme or not parsed.netloc:
            raise TransportError(f"keyserver URL must be absolute: {base_url!r}")
        self.base_url = base_url.rstrip("/")
        self.proxy_url = proxy_url
        self.anonymous = anonymous
        self.timeout = timeout

    def _opener(self) -> urllib.request.OpenerDirector:
        handlers = []
        if self.proxy_url:
            handlers.append(urllib.request.ProxyHandler({"http": self.proxy_url, "https": self.proxy_url}))
        opener = urllib.request.build_opener(*handlers)
        if self.anonymous:
            opener.addheaders = []
        else:
            opener.addheaders = [("User-Agent", "amakey-client")]
        return opener

    def _request(self, req: urllib.request.Request) -> ApiResult:
        try:
            with self._opener().open(req, timeout=self.timeout) as resp:
                raw = resp.read()
                status = resp.status
        except urllib.error.HTTPError as exc:
            raw = exc.read()
            status = exc.code
        except Exception as exc:
            raise TransportError(f"keyserver unreachable: {exc}") from exc
        try:
            body = json.loads(raw.decode("utf-8")) if raw else {}
        except Exception as exc:
            raise TransportError(f"non-JSON response from keyserver: {exc}") from exc
        if not isinstance(body, dict):
            raise TransportError("keyserver response body is not a JSON object")
        return ApiResult(status, body)

    def get(self, path: str, params: dict[str, str] | None = None) -> ApiResult:
        url = self.base_url + path
        if params:
            url += "?" + urllib.parse.urlencode(params)
        return self._request(urllib.request.Request(url, method="GET"))

    def post(self, path: str, body: dict) -> ApiResult:
        data = json.dumps(body, sort_keys=True, separators=(",", ":")).encode("utf-8")
        req = urllib.request.Request(
            self.base_url + path,
            data=data,
            method="POST",
            headers={"Content-Type": "application/json; charset=utf-8"},
        )
        return self._request(req)


class InProcessTransport:
    """Drives a service object directly, round-tripping bodies through JSON bytes."""

    def __init__(self, service):
        self.service = service

    def _roundtrip(self, obj: dict) -> dict:
        return json.loads(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8"))

    def get(self, path: str, params: dict[str, str] | None = None) -> ApiResult:
        query = {k: str(v) for k, v in (params or {}).items()}
        response = handle(self.service, ApiRequest("GET", path, query, None))
        return ApiResult(response.status, self._roundtrip(response.body))

    def post(self, path: str, body: dict) -> ApiResult:
        response = handle(self.service, ApiRequest("POST", path, {}, self._roundtrip(body)))
        return ApiResult(response.status, self._roundtrip(response.body))
