import dataclasses

import pytest

from chunkchain.ledger import (
    ClassroomCipher,
    KeyPair,
    Transaction,
    TxKind,
    sha256,
    sign_transaction,
    verify_signature,
    verify_transaction,
)
from conftest import FAST_KDF_ITERATIONS, make_tx

# SHA-256 of the empty input, cross-checked against an independent tool
# (`printf '' | sha256sum`).
SHA256_EMPTY = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"


def test_sha256_primitive_against_known_vector():
    assert sha256(b"").hex() == SHA256_EMPTY
    assert len(sha256(b"anything")) == 32


def test_sign_verify_round_trip(keypair):
    tx = make_tx(keypair)
    assert verify_transaction(tx)


def test_single_byte_mutations_break_verification(keypair):
    tx = make_tx(keypair, payload=b"attack at dawn")
    for i in range(len(tx.payload)):
        mutated = bytearray(tx.payload)
        mutated[i] ^= 0x01
        assert not verify_transaction(dataclasses.replace(tx, payload=bytes(mutated)))
    assert not verify_transaction(dataclasses.replace(tx, timestamp=tx.timestamp + 1))
    assert not verify_transaction(dataclasses.replace(tx, kind=TxKind.SYSTEM))
    assert not verify_transaction(dataclasses.replace(tx, author_nick="imposter"))


def test_wrong_author_key_rejected(keypair):
    tx = make_tx(keypair)
    other = KeyPair.generate()
    assert not verify_transaction(dataclasses.replace(tx, author=other.public_bytes))


def test_id_recomputation_mismatch_rejected(keypair):
    tx = make_tx(keypair)
    assert not verify_transaction(dataclasses.replace(tx, id=sha256(b"other")))


def test_malformed_key_material():
    assert not verify_signature(b"short", b"\x00" * 64, b"data")
    assert not verify_signature(b"\x00" * 32, b"\x00" * 64, b"data")


def test_payload_size_cap(keypair):
    with pytest.raises(ValueError):
        sign_transaction(keypair, TxKind.CHAT, "n", b"x" * 4097, 0)
    tx = sign_transaction(keypair, TxKind.CHAT, "n", b"x" * 4096, 0)
    assert verify_transaction(tx)
    assert not verify_transaction(dataclasses.replace(tx, payload=b"x" * 4097))


def test_cipher_round_trip_and_tamper():
    cipher = ClassroomCipher("demo", "secret123", iterations=FAST_KDF_ITERATIONS)
    sealed = cipher.encrypt("grüße aus dem klassenzimmer".encode())
    assert cipher.decrypt(sealed) == "grüße aus dem klassenzimmer".encode()
    broken = bytearray(sealed)
    broken[-1] ^= 0xFF
    assert cipher.decrypt(bytes(broken)) is None
    assert cipher.decrypt(b"") is None


def test_cipher_same_classroom_same_key():
    a = ClassroomCipher("demo", "secret123", iterations=FAST_KDF_ITERATIONS)
    b = ClassroomCipher("demo", "secret123", iterations=FAST_KDF_ITERATIONS)
    assert b.decrypt(a.encrypt(b"shared")) == b"shared"


def test_cipher_wrong_passphrase_unreadable():
    a = ClassroomCipher("demo", "secret123", iterations=FAST_KDF_ITERATIONS)
    wrong = ClassroomCipher("demo", "different-pass", iterations=FAST_KDF_ITERATIONS)
    assert wrong.decrypt(a.encrypt(b"secret")) is None


def test_transaction_wire_round_trips(keypair):
    tx = make_tx(keypair, payload=b"\x00\x01binary\xff", nick="zoë")
    assert Transaction.decode(tx.encode()) == tx
    assert Transaction.from_json(tx.to_json()) == tx
