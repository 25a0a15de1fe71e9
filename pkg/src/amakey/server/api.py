"""Transport-agnostic request dispatch for the keyserver HTTP/JSON API.

Both the real HTTP server and the in-process transport route through
``handle``, so a client exercises exactly the same wire semantics either
way.

Endpoints:
    POST /v1/register        {signed_identity_card}            -> 202 {pending: true}
    GET  /v1/verify          ?nonce=H                          -> 200 {verified: true}
    GET  /v1/lookup          ?address=A[&scheme=S]             -> 200 {signed_identity_card, ratings, stats, fingerprint} | 404
    GET  /v1/challenge                                         -> 200 {challenge_id, puzzle}
    POST /v1/rating          {signed_rating_card, challenge_id, challenge_answer} -> 201
    POST /v1/remove          {address, signed_removal_request} -> 200
    POST /v1/remove/begin    {address}                         -> 202
    POST /v1/remove/confirm  {nonce}                           -> 200
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConflictError, NotFoundError, ValidationError
from ..model import ContactAddress
from . import wire


@dataclass(frozen=True)
class ApiRequest:
    method: str
    path: str
    query: dict[str, str]
    body: dict | None


@dataclass(frozen=True)
class ApiResponse:
    status: int
    body: dict


def _require_body(request: ApiRequest) -> dict:
    if not isinstance(request.body, dict):
        raise ValidationError("bad_request", "request body must be a JSON object")
    return request.body


def _parse_query_address(request: ApiRequest) -> ContactAddress:
    value = request.query.get("address")
    if not value:
        raise ValidationError("bad_request", "missing address parameter")
    return ContactAddress.parse(value, scheme=request.query.get("scheme"))


def _register(service, request: ApiRequest) -> ApiResponse:
    body = _require_body(request)
    signed_card = wire.signed_card_from_wire(body.get("signed_identity_card"))
    return ApiResponse(202, service.begin_registration(signed_card))


def _verify(service, request: ApiRequest) -> ApiResponse:
    nonce = request.query.get("nonce")
    if not nonce:
        raise ValidationError("bad_request", "missing nonce parameter")
    return ApiResponse(200, service.confirm_registration(nonce))


def _lookup(service, request: ApiRequest) -> ApiResponse:
    result = service.lookup(_parse_query_address(request))
    return ApiResponse(200, wire.lookup_response_to_wire(result.signed_card, result.ratings, result.stats))


def _challenge(service, request: ApiRequest) -> ApiResponse:
    return ApiResponse(200, service.issue_challenge().public_view())


def _rating(service, request: ApiRequest) -> ApiResponse:
    body = _require_body(request)
    signed_rating = wire.signed_rating_from_wire(body.get("signed_rating_card"))
    challenge_id = body.get("challenge_id")
    challenge_answer = body.get("challenge_answer")
    if not isinstance(challenge_id, str) or not isinstance(challenge_answer, str):
        raise ValidationError("bad_request", "challenge_id and challenge_answer must be strings")
    return ApiResponse(201, service.submit_rating(signed_rating, challenge_id, challenge_answer))


def _remove(service, request: ApiRequest) -> ApiResponse:
    body = _require_body(request)
    address = wire.address_from_wire(body.get("address"))
    signed_removal = wire.signed_removal_from_wire(body.get("signed_removal_request"))
    return ApiResponse(200, service.remove_signed(address, signed_removal))


def _remove_begin(service, request: ApiRequest) -> ApiResponse:
    body = _require_body(request)
    address = wire.address_from_wire(body.get("address"))
    return ApiResponse(202, service.begin_removal(address))


def _remove_confirm(service, request: ApiRequest) -> ApiResponse:
    body = _require_body(request)
    nonce = body.get("nonce")
    if not isinstance(nonce, str):
        raise ValidationError("bad_request", "nonce must be a string")
    return ApiResponse(200, service.confirm_removal(nonce))


_ROUTES = {
    ("POST", "/v1/register"): _register,
    ("GET", "/v1/verify"): _verify,
    ("GET", "/v1/lookup"): _lookup,
    ("GET", "/v1/challenge"): _challenge,
    ("POST", "/v1/rating"): _rating,
    ("POST", "/v1/remove"): _remove,
    ("POST", "/v1/remove/begin"): _remove_begin,
    ("POST", "/v1/remove/confirm"): _remove_confirm,
}

KNOWN_PATHS = {path for _, path in _ROUTES}


def handle(service, request: ApiRequest) -> ApiResponse:
    """Dispatch one API request, mapping domain errors to status codes."""
    route = _ROUTES.get((request.method, request.path))
    if route is None:
        if request.path in KNOWN_PATHS:
            return ApiResponse(405, {"error": "method_not_allowed"})
        return ApiResponse(404, {"error": "not_found", "detail": "unknown endpoint"})
    try:
        return route(service, request)
    except ValidationError as exc:
        return ApiResponse(400, {"error": exc.code, "detail": exc.detail})
    except NotFoundError as exc:
        return ApiResponse(404, {"error": "not_found", "detail": str(exc)})
    except ConflictError as exc:
        return ApiResponse(409, {"error": "conflict", "detail": str(exc)})
