"""Exception types shared across the package."""


class AmakeyError(Exception):
    """Base class for all errors raised by amakey."""


class ValidationError(AmakeyError):
    """A value violates its invariants or a protocol precondition.

    ``code`` is a short machine-readable identifier that survives the wire
    (servers put it in error bodies, clients re-raise it verbatim).
    """

    def __init__(self, code: str, detail: str = ""):
        super().__init__(detail or code)
        self.code = code
        self.detail = detail or code


class NotFoundError(AmakeyError):
    """No verified record exists for the requested address."""


class ConflictError(AmakeyError):
    """The operation conflicts with existing verified state."""


class TransportError(AmakeyError):
    """The keyserver could not be reached or returned a non-protocol response."""


class UnsupportedAlgorithmError(AmakeyError):
    """The key's algorithm is not in the registry or lacks the capability."""


class EnvelopeError(AmakeyError):
    """Message envelope could not be decrypted or failed authentication."""
