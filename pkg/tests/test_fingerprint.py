"""Fingerprints: digest reference vectors and group formatting."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from amakey.errors import ValidationError
from amakey.model import (
    KeyFingerprint,
    PublicKeyMaterial,
    fingerprint,
    format_fingerprint_groups,
    md5_hex,
    ungroup_fingerprint,
)

# Published MD5 reference vectors.
REFERENCE_VECTORS = [
    (b"", "d41d8cd98f00b204e9800998ecf8427e"),
    (b"a", "0cc175b9c0f1b6a831c399e269772661"),
    (b"abc", "900150983cd24fb0d6963f7d28e17f72"),
    (b"message digest", "f96b697d7cb7938d525a2f31aaf161d0"),
    (b"abcdefghijklmnopqrstuvwxyz", "c3fcd3d76192e4007dfb496cca67e13b"),
    (
        b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789",
        "d174ab98d277d9f5a5611c2c9f419d9f",
    ),
    (
        b"12345678901234567890123456789012345678901234567890123456789012345678901234567890",
        "57edf4a22be3c955ac49da2e2107b67a",
    ),
]


@pytest.mark.parametrize("data,expected", REFERENCE_VECTORS)
def test_raw_digest_path_matches_reference_vectors(data, expected):
    assert md5_hex(data) == expected


def test_fingerprint_is_digest_of_key_bytes():
    key = PublicKeyMaterial("ed25519", b"abc")
    assert fingerprint(key).digest == "900150983cd24fb0d6963f7d28e17f72"


def test_fingerprint_deterministic():
    key = PublicKeyMaterial("ed25519", bytes(range(64)))
    assert fingerprint(key) == fingerprint(key)


def test_fingerprint_shape_is_enforced():
    with pytest.raises(ValidationError):
        KeyFingerprint("ABC")
    with pytest.raises(ValidationError):
        KeyFingerprint("g" * 32)
    with pytest.raises(ValidationError):
        KeyFingerprint("0" * 31)


def test_group_of_four_gives_eight_groups():
    fp = KeyFingerprint("00112233445566778899aabbccddeeff")
    text = format_fingerprint_groups(fp, 4)
    groups = text.split(" ")
    assert len(groups) == 8
    assert all(len(g) == 4 for g in groups)


def test_group_of_five_has_short_tail():
    fp = KeyFingerprint("00112233445566778899aabbccddeeff")
    groups = format_fingerprint_groups(fp, 5).split(" ")
    assert [len(g) for g in groups] == [5, 5, 5, 5, 5, 5, 2]


@pytest.mark.parametrize("bad", [1, 9, 0, -3])
def test_group_size_bounds(bad):
    fp = KeyFingerprint("00112233445566778899aabbccddeeff")
    with pytest.raises(ValidationError):
        format_fingerprint_groups(fp, bad)


@given(
    st.binary(min_size=0, max_size=64),
    st.integers(min_value=2, max_value=8),
)
def test_grouping_round_trips(data, group_size):
    fp = KeyFingerprint(md5_hex(data))
    assert ungroup_fingerprint(format_fingerprint_groups(fp, group_size)) == fp
