"""Ledger value types: transactions, headers, blocks and the chain state.

Everything here is an immutable value. State never mutates in place;
operations build a new state from the old one, which is what makes snapshot
reads safe and the protocol state machine exhaustively testable.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Mapping

from .crypto import (
    DIGEST_SIZE,
    PUBLIC_KEY_SIZE,
    SIGNATURE_SIZE,
    ZERO_DIGEST,
    KeyPair,
    sha256,
    verify_signature,
)
from .encoding import (
    EncodingError,
    Reader,
    from_hex,
    to_hex,
    write_bytes,
    write_count,
    write_str,
    write_u8,
    write_u64,
)

MAX_PAYLOAD_BYTES = 4096
MAX_BLOCK_TXS = 64
MAX_DIFFICULTY = 32


class TxKind(enum.IntEnum):
    CHAT = 0
    ACHIEVEMENT = 1
    SYSTEM = 2

    @property
    def wire_name(self) -> str:
        return self.name.lower()

    @classmethod
    def from_wire(cls, name: str) -> "TxKind":
        try:
            return cls[name.upper()]
        except KeyError:
            raise EncodingError(f"unknown transaction kind: {name!r}") from None


@dataclass(frozen=True)
class Transaction:
    """A signed ledger entry carrying a chat, achievement or system payload."""

    id: bytes
    kind: TxKind
    author: bytes
    author_nick: str
    payload: bytes
    timestamp: int
    signature: bytes

    def signing_bytes(self) -> bytes:
        return transaction_signing_bytes(
            self.kind, self.author, self.author_nick, self.payload, self.timestamp
        )

    def encode(self) -> bytes:
        out = bytearray()
        write_bytes(out, self.id)
        write_u8(out, int(self.kind))
        write_bytes(out, self.author)
        write_str(out, self.author_nick)
        write_bytes(out, self.payload)
        write_u64(out, self.timestamp)
        write_bytes(out, self.signature)
        return bytes(out)

    @classmethod
    def read(cls, reader: Reader) -> "Transaction":
        tx_id = reader.read_bytes()
        kind = reader.read_u8()
        author = reader.read_bytes()
        nick = reader.read_str()
        payload = reader.read_bytes()
        timestamp = reader.read_u64()
        signature = reader.read_bytes()
        try:
            kind_enum = TxKind(kind)
        except ValueError:
            raise EncodingError(f"unknown transaction kind byte: {kind}") from None
        return cls(tx_id, kind_enum, author, nick, payload, timestamp, signature)

    @classmethod
    def decode(cls, buf: bytes) -> "Transaction":
        reader = Reader(buf)
        tx = cls.read(reader)
        reader.expect_end()
        return tx

    def to_json(self) -> dict:
        return {
            "id": to_hex(self.id),
            "kind": self.kind.wire_name,
            "author": to_hex(self.author),
            "author_nick": self.author_nick,
            "payload": to_hex(self.payload),
            "timestamp": self.timestamp,
            "signature": to_hex(self.signature),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Transaction":
        try:
            return cls(
                id=from_hex(obj["id"], DIGEST_SIZE),
                kind=TxKind.from_wire(obj["kind"]),
                author=from_hex(obj["author"], PUBLIC_KEY_SIZE),
                author_nick=str(obj["author_nick"]),
                payload=from_hex(obj["payload"]),
                timestamp=int(obj["timestamp"]),
                signature=from_hex(obj["signature"], SIGNATURE_SIZE),
            )
        except (KeyError, TypeError) as exc:
            raise EncodingError(f"malformed transaction object: {exc}") from exc


def transaction_signing_bytes(
    kind: TxKind, author: bytes, author_nick: str, payload: bytes, timestamp: int
) -> bytes:
    """Canonical serialization of every field except id and signature."""
    out = bytearray()
    write_u8(out, int(kind))
    write_bytes(out, author)
    write_str(out, author_nick)
    write_bytes(out, payload)
    write_u64(out, timestamp)
    return bytes(out)


def sign_transaction(
    keypair: KeyPair, kind: TxKind, author_nick: str, payload: bytes, timestamp: int
) -> Transaction:
    """Build a transaction: id and signature both cover the same canonical bytes."""
    if len(payload) > MAX_PAYLOAD_BYTES:
        raise ValueError(f"payload exceeds {MAX_PAYLOAD_BYTES} bytes")
    body = transaction_signing_bytes(kind, keypair.public_bytes, author_nick, payload, timestamp)
    return Transaction(
        id=sha256(body),
        kind=kind,
        author=keypair.public_bytes,
        author_nick=author_nick,
        payload=payload,
        timestamp=timestamp,
        signature=keypair.sign(body),
    )


def verify_transaction(tx: Transaction) -> bool:
    """Total check: structure, recomputed id and signature must all hold."""
    if len(tx.author) != PUBLIC_KEY_SIZE or len(tx.signature) != SIGNATURE_SIZE:
        return False
    if len(tx.id) != DIGEST_SIZE or len(tx.payload) > MAX_PAYLOAD_BYTES:
        return False
    if tx.timestamp < 0:
        return False
    body = tx.signing_bytes()
    if sha256(body) != tx.id:
        return False
    return verify_signature(tx.author, tx.signature, body)


@dataclass(frozen=True)
class BlockHeader:
    index: int
    prev_hash: bytes
    tx_root: bytes
    timestamp: int
    difficulty: int
    nonce: int
    miner_nick: str

    def encode(self) -> bytes:
        out = bytearray()
        write_u64(out, self.index)
        write_bytes(out, self.prev_hash)
        write_bytes(out, self.tx_root)
        write_u64(out, self.timestamp)
        write_u64(out, self.difficulty)
        write_u64(out, self.nonce)
        write_str(out, self.miner_nick)
        return bytes(out)

    @classmethod
    def read(cls, reader: Reader) -> "BlockHeader":
        return cls(
            index=reader.read_u64(),
            prev_hash=reader.read_bytes(),
            tx_root=reader.read_bytes(),
            timestamp=reader.read_u64(),
            difficulty=reader.read_u64(),
            nonce=reader.read_u64(),
            miner_nick=reader.read_str(),
        )

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "prev_hash": to_hex(self.prev_hash),
            "tx_root": to_hex(self.tx_root),
            "timestamp": self.timestamp,
            "difficulty": self.difficulty,
            "nonce": self.nonce,
            "miner_nick": self.miner_nick,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BlockHeader":
        try:
            return cls(
                index=int(obj["index"]),
                prev_hash=from_hex(obj["prev_hash"], DIGEST_SIZE),
                tx_root=from_hex(obj["tx_root"], DIGEST_SIZE),
                timestamp=int(obj["timestamp"]),
                difficulty=int(obj["difficulty"]),
                nonce=int(obj["nonce"]),
                miner_nick=str(obj["miner_nick"]),
            )
        except (KeyError, TypeError) as exc:
            raise EncodingError(f"malformed header object: {exc}") from exc


def hash_header(header: BlockHeader) -> bytes:
    """Block hash: SHA-256 over the canonical header serialization."""
    return sha256(header.encode())


def compute_tx_root(transactions: tuple[Transaction, ...]) -> bytes:
    """Hash of the concatenated transaction ids in block order."""
    return sha256(b"".join(tx.id for tx in transactions))


@dataclass(frozen=True)
class Block:
    header: BlockHeader
    transactions: tuple[Transaction, ...]

    def encode(self) -> bytes:
        out = bytearray(self.header.encode())
        write_count(out, len(self.transactions))
        for tx in self.transactions:
            out += tx.encode()
        return bytes(out)

    @classmethod
    def decode(cls, buf: bytes) -> "Block":
        reader = Reader(buf)
        header = BlockHeader.read(reader)
        count = reader.read_count()
        if count > MAX_BLOCK_TXS:
            raise EncodingError(f"block claims {count} transactions")
        txs = tuple(Transaction.read(reader) for _ in range(count))
        reader.expect_end()
        return cls(header, txs)

    def to_json(self) -> dict:
        return {
            "header": self.header.to_json(),
            "transactions": [tx.to_json() for tx in self.transactions],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Block":
        try:
            header = BlockHeader.from_json(obj["header"])
            txs = tuple(Transaction.from_json(t) for t in obj["transactions"])
        except (KeyError, TypeError) as exc:
            raise EncodingError(f"malformed block object: {exc}") from exc
        return cls(header, txs)


@dataclass(frozen=True)
class ChainState:
    """The node's ledger view: confirmed blocks plus the pending mempool.

    blocks[0] is the deterministic genesis. The mempool dict is never
    mutated; operations replace it wholesale.
    """

    blocks: tuple[Block, ...]
    mempool: Mapping[bytes, Transaction]
    difficulty: int

    @property
    def tip(self) -> Block:
        return self.blocks[-1]

    @property
    def tip_index(self) -> int:
        return self.tip.header.index

    def confirmed_ids(self) -> set[bytes]:
        return {tx.id for block in self.blocks for tx in block.transactions}


def dump_block_json(block: Block) -> str:
    return json.dumps(block.to_json(), separators=(",", ":"), sort_keys=True)
