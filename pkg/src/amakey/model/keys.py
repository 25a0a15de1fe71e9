"""Key algorithm registry: generation, derivation, signing, verification, key wrap.

Two registry entries ship by default:

* ``rsa-pss-sha256`` - RSA keys, PSS signatures, OAEP key wrap. The default:
  one keypair both signs cards and receives encrypted messages.
* ``ed25519`` - small, fast signing-only keys.

Canonical public key bytes are the DER SubjectPublicKeyInfo encoding in both
cases, so fingerprints and wire forms are unambiguous.

Passphrase-derived keypairs run the passphrase through PBKDF2, then use the
output to key a ChaCha20 stream that stands in for the random source during
key generation. Identical inputs always reproduce the identical keypair,
which is what lets a user re-derive their key on any machine instead of
storing it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric import padding, rsa
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms

from ..errors import UnsupportedAlgorithmError, ValidationError
from .types import PublicKeyMaterial

ALGORITHM_RSA_PSS = "rsa-pss-sha256"
ALGORITHM_ED25519 = "ed25519"

DEFAULT_ALGORITHM = ALGORITHM_RSA_PSS
DEFAULT_RSA_BITS = 2048
_RSA_PUBLIC_EXPONENT = 65537

_PSS_PADDING_SIGN = padding.PSS(mgf=padding.MGF1(hashes.SHA256()), salt_length=32)
_PSS_PADDING_VERIFY = padding.PSS(mgf=padding.MGF1(hashes.SHA256()), salt_length=padding.PSS.AUTO)
_OAEP_PADDING = padding.OAEP(mgf=padding.MGF1(hashes.SHA256()), algorithm=hashes.SHA256(), label=None)


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    can_sign: bool
    can_encrypt: bool


REGISTRY: dict[str, AlgorithmSpec] = {
    ALGORITHM_RSA_PSS: AlgorithmSpec(ALGORITHM_RSA_PSS, can_sign=True, can_encrypt=True),
    ALGORITHM_ED25519: AlgorithmSpec(ALGORITHM_ED25519, can_sign=True, can_encrypt=False),
}


def known_algorithms() -> frozenset[str]:
    return frozenset(REGISTRY)


@dataclass(frozen=True)
class KeyExpansionParams:
    """PBKDF2 parameters for the passphrase expansion stage."""

    hash_name: str = "sha256"
    iterations: int = 600_000
    dk_len: int = 32

    def __post_init__(self):
        if self.hash_name not in hashlib.algorithms_available:
            raise ValidationError("bad_params", f"unknown hash: {self.hash_name}")
        if not isinstance(self.iterations, int) or self.iterations < 1:
            raise ValidationError("bad_params", "iterations must be a positive integer")
        if not isinstance(self.dk_len, int) or self.dk_len < 16:
            raise ValidationError("bad_params", "derived key length must be at least 16 bytes")


def expand_passphrase(passphrase: str, salt: bytes, params: KeyExpansionParams | None = None) -> bytes:
    """PBKDF2-HMAC expansion of a passphrase. This is the vector-testable stage."""
    params = params or KeyExpansionParams()
    if not isinstance(passphrase, str) or not passphrase:
        raise ValidationError("bad_passphrase", "passphrase must be non-empty")
    return hashlib.pbkdf2_hmac(
        params.hash_name, passphrase.encode("utf-8"), salt, params.iterations, params.dk_len
    )


class DeterministicStream:
    """Infinite deterministic byte stream: ChaCha20 keystream under a 32-byte seed."""

    def __init__(self, seed: bytes):
        if len(seed) != 32:
            raise ValidationError("bad_seed", "stream seed must be exactly 32 bytes")
        self._encryptor = Cipher(algorithms.ChaCha20(seed, b"\x00" * 16), mode=None).encryptor()

    def read(self, n: int) -> bytes:
        return self._encryptor.update(b"\x00" * n)


# --- deterministic prime generation ----------------------------------------

def _small_primes(limit: int = 2000) -> list[int]:
    flags = bytearray([1]) * limit
    primes = []
    for i in range(2, limit):
        if flags[i]:
            primes.append(i)
            for j in range(i * i, limit, i):
                flags[j] = 0
    return primes


_SMALL_PRIMES = _small_primes()


def _is_probable_prime(n: int, stream: DeterministicStream, rounds: int = 40) -> bool:
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    width = (n.bit_length() + 7) // 8
    for _ in range(rounds):
        a = int.from_bytes(stream.read(width), "big") % (n - 3) + 2
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = pow(x, 2, n)
            if x == n - 1:
                break
        else:
            return False
    return True


def _generate_prime(stream: DeterministicStream, bits: int, public_exponent: int) -> int:
    while True:
        candidate = int.from_bytes(stream.read(bits // 8), "big")
        candidate |= (1 << (bits - 1)) | (1 << (bits - 2)) | 1
        candidate &= (1 << bits) - 1
        if (candidate - 1) % public_exponent == 0:
            continue
        if _is_probable_prime(candidate, stream):
            return candidate


def _rsa_from_stream(stream: DeterministicStream, bits: int) -> rsa.RSAPrivateKey:
    e = _RSA_PUBLIC_EXPONENT
    p = _generate_prime(stream, bits // 2, e)
    q = _generate_prime(stream, bits // 2, e)
    while q == p:
        q = _generate_prime(stream, bits // 2, e)
    if p < q:
        p, q = q, p
    n = p * q
    d = pow(e, -1, (p - 1) * (q - 1))
    numbers = rsa.RSAPrivateNumbers(
        p=p,
        q=q,
        d=d,
        dmp1=d % (p - 1),
        dmq1=d % (q - 1),
        iqmp=pow(q, -1, p),
        public_numbers=rsa.RSAPublicNumbers(e, n),
    )
    return numbers.private_key()


# --- keypair handle ---------------------------------------------------------

def _public_material(private_key) -> PublicKeyMaterial:
    public = private_key.public_key()
    der = public.public_bytes(serialization.Encoding.DER, serialization.PublicFormat.SubjectPublicKeyInfo)
    algorithm = ALGORITHM_ED25519 if isinstance(public, Ed25519PublicKey) else ALGORITHM_RSA_PSS
    return PublicKeyMaterial(algorithm, der)


@dataclass(frozen=True)
class Keypair:
    """Local handle pairing a private key object with its public material.

    Never serialized onto the wire; the private half leaves the process only
    as an explicitly requested PEM export.
    """

    algorithm: str
    public: PublicKeyMaterial
    private_key: object

    def sign(self, data: bytes) -> bytes:
        return sign(self, data)

    def private_pem(self) -> bytes:
        return self.private_key.private_bytes(
            serialization.Encoding.PEM,
            serialization.PrivateFormat.PKCS8,
            serialization.NoEncryption(),
        )

    @classmethod
    def from_private_pem(cls, data: bytes) -> "Keypair":
        private_key = serialization.load_pem_private_key(data, password=None)
        if isinstance(private_key, Ed25519PrivateKey):
            algorithm = ALGORITHM_ED25519
        elif isinstance(private_key, rsa.RSAPrivateKey):
            algorithm = ALGORITHM_RSA_PSS
        else:
            raise UnsupportedAlgorithmError(f"unsupported private key type: {type(private_key).__name__}")
        return cls(algorithm, _public_material(private_key), private_key)


def generate_keypair(algorithm: str = DEFAULT_ALGORITHM, *, rsa_bits: int = DEFAULT_RSA_BITS) -> Keypair:
    """Fresh random keypair for the given registry algorithm."""
    if algorithm == ALGORITHM_ED25519:
        private_key = Ed25519PrivateKey.generate()
    elif algorithm == ALGORITHM_RSA_PSS:
        private_key = rsa.generate_private_key(public_exponent=_RSA_PUBLIC_EXPONENT, key_size=rsa_bits)
    else:
        raise UnsupportedAlgorithmError(f"unknown algorithm: {algorithm}")
    return Keypair(algorithm, _public_material(private_key), private_key)


def derive_keypair_from_passphrase(
    passphrase: str,
    salt: bytes,
    params: KeyExpansionParams | None = None,
    *,
    algorithm: str = DEFAULT_ALGORITHM,
    rsa_bits: int = DEFAULT_RSA_BITS,
) -> Keypair:
    """Deterministically derive a keypair from a passphrase and salt.

    Identical inputs yield a byte-identical keypair on every platform. The
    salt must be at least 16 bytes; it is not secret but must be stable for
    the key to be re-derivable.
    """
    if not isinstance(passphrase, str) or not passphrase:
        raise ValidationError("bad_passphrase", "passphrase must be non-empty")
    if not isinstance(salt, bytes) or len(salt) < 16:
        raise ValidationError("bad_salt", "salt must be at least 16 bytes")
    params = params or KeyExpansionParams()
    if params.dk_len != 32:
        raise ValidationError("bad_params", "keypair derivation requires a 32-byte expansion output")
    seed = expand_passphrase(passphrase, salt, params)
    stream = DeterministicStream(seed)
    if algorithm == ALGORITHM_ED25519:
        private_key = Ed25519PrivateKey.from_private_bytes(stream.read(32))
    elif algorithm == ALGORITHM_RSA_PSS:
        private_key = _rsa_from_stream(stream, rsa_bits)
    else:
        raise UnsupportedAlgorithmError(f"unknown algorithm: {algorithm}")
    return Keypair(algorithm, _public_material(private_key), private_key)


# --- signing and verification ----------------------------------------------

def sign(keypair: Keypair, data: bytes) -> bytes:
    """Detached signature over raw bytes with the keypair's scheme."""
    if keypair.algorithm == ALGORITHM_ED25519:
        return keypair.private_key.sign(data)
    if keypair.algorithm == ALGORITHM_RSA_PSS:
        return keypair.private_key.sign(data, _PSS_PADDING_SIGN, hashes.SHA256())
    raise UnsupportedAlgorithmError(f"unknown algorithm: {keypair.algorithm}")


def verify(key: PublicKeyMaterial, data: bytes, signature: bytes) -> bool:
    """True iff the signature over data verifies under the key. Never raises."""
    try:
        if key.algorithm not in REGISTRY:
            return False
        public = serialization.load_der_public_key(key.key_bytes)
        if key.algorithm == ALGORITHM_ED25519:
            if not isinstance(public, Ed25519PublicKey):
                return False
            public.verify(signature, data)
        elif key.algorithm == ALGORITHM_RSA_PSS:
            if not isinstance(public, rsa.RSAPublicKey):
                return False
            public.verify(signature, data, _PSS_PADDING_VERIFY, hashes.SHA256())
        else:
            return False
        return True
    except Exception:
        return False


# --- asymmetric key wrap (for message envelopes) -----------------------------

def supports_encryption(algorithm: str) -> bool:
    spec = REGISTRY.get(algorithm)
    return spec is not None and spec.can_encrypt


def wrap_key(recipient: PublicKeyMaterial, content_key: bytes) -> bytes:
    """Encrypt a symmetric content key to the recipient's public key."""
    if not supports_encryption(recipient.algorithm):
        raise UnsupportedAlgorithmError(f"{recipient.algorithm} keys cannot receive encrypted messages")
    public = serialization.load_der_public_key(recipient.key_bytes)
    if not isinstance(public, rsa.RSAPublicKey):
        raise UnsupportedAlgorithmError("recipient key does not match its declared algorithm")
    return public.encrypt(content_key, _OAEP_PADDING)


def unwrap_key(keypair: Keypair, wrapped: bytes) -> bytes:
    if not supports_encryption(keypair.algorithm):
        raise UnsupportedAlgorithmError(f"{keypair.algorithm} keys cannot receive encrypted messages")
    return keypair.private_key.decrypt(wrapped, _OAEP_PADDING)
