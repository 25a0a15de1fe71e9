"""Loopback HTTP bridge for the rating UI.

Binds to localhost only. The browser UI talks to these endpoints and never
sees private key material; signing happens in this process.

    GET  /local/review?address=A  card summary, recomputed fingerprint and
                                  stats, ratings with verification badges,
                                  discrepancies, and a fresh challenge
    POST /local/rate              {address, identity, hash_match, authentic,
                                  comment, challenge_id, challenge_answer}

Static files from the configured UI directory are served at /.
"""

from __future__ import annotations

import json
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qsl, urlsplit

from ..errors import TransportError, ValidationError
from ..model import ContactAddress, TriState, fingerprint, format_fingerprint_groups, margin_ratio
from ..model.encoding import encode_timestamp
from .sdk import RATING_QUESTIONS, AmaClient, ReportOutcome, TrustReport


def _review_payload(client: AmaClient, report: TrustReport, address: ContactAddress) -> dict:
    challenge_id, puzzle = client.fetch_challenge()
    payload: dict = {
        "found": report.outcome is not ReportOutcome.NOT_FOUND,
        "address": address.value,
        "scheme": address.scheme.value,
        "outcome": report.outcome.value,
        "questions": list(RATING_QUESTIONS),
        "discrepancies": [{"kind": f.kind.value, "detail": f.detail} for f in report.discrepancies],
        "warnings": list(report.warnings),
        "stats": {f"s{i}": v for i, v in enumerate(report.recomputed_stats.as_tuple(), start=1)},
        "challenge": {"challenge_id": challenge_id, "puzzle": puzzle},
    }
    ratio = margin_ratio(report.recomputed_stats)
    payload["beta_ratio"] = None if ratio is None else f"{ratio.numerator}/{ratio.denominator}"
    if report.card is not None:
        card = report.card.card
        fp = fingerprint(card.public_key)
        payload.update(
            {
                "display_name": card.display_name or "",
                "fingerprint": fp.digest,
                "fingerprint_grouped": format_fingerprint_groups(fp),
                "attestment": {
                    "kind": card.attestment.kind.value,
                    "value": card.attestment.value,
                    "guidelines": card.attestment.guideline_checklist.as_dict(),
                },
                "ratings": [
                    {
                        "rater": detail.rater.value,
                        "identity": detail.answers[0].value,
                        "hash_match": detail.answers[1].value,
                        "authentic": detail.answers[2].value,
                        "comment": detail.comment,
                        "rated_at": encode_timestamp(detail.rated_at),
                        "verified": detail.verified,
                    }
                    for detail in report.rating_details
                ],
            }
        )
    return payload


class _BridgeHandler(BaseHTTPRequestHandler):
    server_version = "amakey-bridge"
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):
        pass

    def _send_json(self, status: int, body: dict):
        payload = json.dumps(body, sort_keys=True, separators=(",", ":")).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _send_file(self, path: Path):
        data = path.read_bytes()
        content_type = mimetypes.guess_type(str(path))[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):
        split = urlsplit(self.path)
        if split.path == "/local/review":
            query = dict(parse_qsl(split.query))
            self._review(query)
            return
        self._static(split.path)

    def do_POST(self):
        split = urlsplit(self.path)
        if split.path != "/local/rate":
            self._send_json(404, {"error": "not_found"})
            return
        length = int(self.headers.get("Content-Length") or 0)
        try:
            body = json.loads(self.rfile.read(length).decode("utf-8")) if length else {}
        except Exception:
            self._send_json(400, {"error": "bad_request", "detail": "body must be JSON"})
            return
        self._rate(body)

    # -- endpoints ---------------------------------------------------------------

    def _review(self, query: dict):
        client: AmaClient = self.server.client
        value = query.get("address", "")
        if not value:
            self._send_json(400, {"error": "bad_request", "detail": "missing address"})
            return
        try:
            address = ContactAddress.parse(value, scheme=query.get("scheme"))
            report = client.fetch_and_validate(address)
        except ValidationError as exc:
            self._send_json(400, {"error": exc.code, "detail": exc.detail})
            return
        except TransportError as exc:
            self._send_json(502, {"error": "transport", "detail": str(exc)})
            return
        if report.card is not None:
            self.server.last_served[address.key()] = report.card
        self._send_json(200, _review_payload(client, report, address))

    def _rate(self, body: dict):
        client: AmaClient = self.server.client
        try:
            address = ContactAddress.parse(str(body.get("address", "")), scheme=body.get("scheme"))
            answers = tuple(TriState(str(body.get(q, ""))) for q in ("identity", "hash_match", "authentic"))
        except (ValidationError, ValueError):
            self._send_json(400, {"error": "bad_request", "detail": "answer all three questions (yes/no/unsure)"})
            return
        subject_card = self.server.last_served.get(address.key())
        try:
            # Refuse to vouch for a card the validating fetch flagged.
            report = client.fetch_and_validate(address)
            if report.outcome is ReportOutcome.INVALID:
                self._send_json(
                    409, {"error": "invalid_response", "detail": "current lookup has discrepancies; not rating"}
                )
                return
            client.review_and_rate(
                address,
                answers,
                str(body.get("comment", "")),
                str(body.get("challenge_id", "")),
                str(body.get("challenge_answer", "")),
                subject_card=subject_card,
            )
            refreshed = client.fetch_and_validate(address)
        except ValidationError as exc:
            challenge_id, puzzle = client.fetch_challenge()
            self._send_json(
                400,
                {
                    "error": exc.code,
                    "detail": exc.detail,
                    "challenge": {"challenge_id": challenge_id, "puzzle": puzzle},
                },
            )
            return
        except TransportError as exc:
            self._send_json(502, {"error": "transport", "detail": str(exc)})
            return
        if refreshed.card is not None:
            self.server.last_served[address.key()] = refreshed.card
        self._send_json(
            200,
            {
                "accepted": True,
                "stats": {f"s{i}": v for i, v in enumerate(refreshed.recomputed_stats.as_tuple(), start=1)},
            },
        )

    def _static(self, path: str):
        ui_dir: Path | None = self.server.ui_dir
        if ui_dir is None:
            self._send_json(404, {"error": "not_found", "detail": "no UI bundle configured"})
            return
        relative = path.lstrip("/") or "index.html"
        target = (ui_dir / relative).resolve()
        if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
            self._send_json(404, {"error": "not_found"})
            return
        self._send_file(target)


class BridgeServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, client: AmaClient, host: str = "127.0.0.1", port: int = 0, ui_dir: str | None = None):
        super().__init__((host, port), _BridgeHandler)
        self.client = client
        self.ui_dir = Path(ui_dir) if ui_dir else None
        self.last_served = {}

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


def make_bridge(client: AmaClient, host: str = "127.0.0.1", port: int = 0, ui_dir: str | None = None) -> BridgeServer:
    return BridgeServer(client, host, port, ui_dir)
