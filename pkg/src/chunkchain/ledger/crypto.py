"""Hashing, signing keys and the shared classroom message cipher.

Digests are SHA-256 (32 bytes, rendered as 64 lowercase hex chars).
Signatures are Ed25519 with raw 32-byte public keys and 64-byte signatures;
keys live on the node, students only ever hold a session token.
Chat payloads are sealed with AES-GCM under one classroom-wide key derived
from the teacher's passphrase, so the explorer shows real ciphertext while
every node of the same classroom can read the feed.
"""

from __future__ import annotations

import hashlib
import os

from cryptography.exceptions import InvalidSignature, InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import ed25519
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.pbkdf2 import PBKDF2HMAC
from cryptography.hazmat.primitives.serialization import (
    Encoding,
    PublicFormat,
)

DIGEST_SIZE = 32
ZERO_DIGEST = b"\x00" * DIGEST_SIZE
PUBLIC_KEY_SIZE = 32
SIGNATURE_SIZE = 64

_GCM_NONCE_SIZE = 12
_KDF_ITERATIONS = 200_000


def sha256(data: bytes) -> bytes:
    """SHA-256 digest of ``data``, always exactly 32 bytes."""
    return hashlib.sha256(data).digest()


class KeyPair:
    """An Ed25519 signing key with its raw public half."""

    def __init__(self, private_key: ed25519.Ed25519PrivateKey):
        self._private = private_key
        self.public_bytes: bytes = private_key.public_key().public_bytes(
            Encoding.Raw, PublicFormat.Raw
        )

    @classmethod
    def generate(cls) -> "KeyPair":
        return cls(ed25519.Ed25519PrivateKey.generate())

    @classmethod
    def from_seed(cls, seed: bytes) -> "KeyPair":
        """Deterministic key for reproducible simulations; not for real identities."""
        return cls(ed25519.Ed25519PrivateKey.from_private_bytes(sha256(seed)))

    def sign(self, data: bytes) -> bytes:
        return self._private.sign(data)


def verify_signature(public_key: bytes, signature: bytes, data: bytes) -> bool:
    """True iff ``signature`` is a valid Ed25519 signature over ``data``."""
    if len(public_key) != PUBLIC_KEY_SIZE or len(signature) != SIGNATURE_SIZE:
        return False
    try:
        ed25519.Ed25519PublicKey.from_public_bytes(public_key).verify(signature, data)
        return True
    except (InvalidSignature, ValueError):
        return False


class ClassroomCipher:
    """Authenticated symmetric cipher shared by all nodes of one classroom.

    The key is derived from the classroom passphrase with PBKDF2-HMAC-SHA256;
    the salt is fixed per classroom name so every node derives the same key
    without any exchange. Sealed payloads are nonce || ciphertext || tag.
    """

    def __init__(self, classroom_name: str, passphrase: str, iterations: int = _KDF_ITERATIONS):
        salt = sha256(b"chunkchain/classroom-key/" + classroom_name.encode("utf-8"))[:16]
        kdf = PBKDF2HMAC(
            algorithm=hashes.SHA256(),
            length=32,
            salt=salt,
            iterations=iterations,
        )
        self._aead = AESGCM(kdf.derive(passphrase.encode("utf-8")))

    def encrypt(self, plaintext: bytes) -> bytes:
        nonce = os.urandom(_GCM_NONCE_SIZE)
        return nonce + self._aead.encrypt(nonce, plaintext, None)

    def decrypt(self, sealed: bytes) -> bytes | None:
        """Plaintext, or None when the payload is not ours or was tampered with."""
        if len(sealed) < _GCM_NONCE_SIZE + 16:
            return None
        try:
            return self._aead.decrypt(sealed[:_GCM_NONCE_SIZE], sealed[_GCM_NONCE_SIZE:], None)
        except InvalidTag:
            return None
