"""Key fingerprints: 128-bit MD5 digests of the canonical key encoding.

MD5 is kept as the default fingerprint because its short output is what a
person reads aloud and writes out in an attestment video; the algorithm
registry allows stronger digests for keys without touching this display
convention.
"""

from __future__ import annotations

import hashlib

from ..errors import ValidationError
from .types import KeyFingerprint, PublicKeyMaterial

MIN_GROUP_SIZE = 2
MAX_GROUP_SIZE = 8


def md5_hex(data: bytes) -> str:
    """Raw digest path: lowercase hex MD5 of arbitrary bytes."""
    return hashlib.md5(data).hexdigest()


def fingerprint(key: PublicKeyMaterial) -> KeyFingerprint:
    """Fingerprint of a public key (digest of its canonical key bytes)."""
    return KeyFingerprint(md5_hex(key.key_bytes))


def format_fingerprint_groups(fp: KeyFingerprint, group_size: int = 4) -> str:
    """Split the hex digest into space-separated groups for reading aloud.

    The last group may be shorter when the group size does not divide 32.
    """
    if not isinstance(group_size, int) or not (MIN_GROUP_SIZE <= group_size <= MAX_GROUP_SIZE):
        raise ValidationError("bad_group_size", f"group size must be in [{MIN_GROUP_SIZE}, {MAX_GROUP_SIZE}]")
    digest = fp.digest
    return " ".join(digest[i : i + group_size] for i in range(0, len(digest), group_size))


def ungroup_fingerprint(text: str) -> KeyFingerprint:
    """Inverse of format_fingerprint_groups: strip the separators."""
    return KeyFingerprint(text.replace(" ", ""))
