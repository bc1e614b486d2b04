"""Chat semantics over the ledger: sessions, posting, the merged feed and
the explorer read model.

Sessions are memory-only: a nickname, a node-held signing key and mission
progress. The feed merges confirmed chat transactions (in chain order) with
pending ones from the mempool; payloads that do not decrypt under the
classroom key render as a placeholder instead of failing.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass, field

from .errors import ApiError
from .ledger import (
    ChainState,
    ClassroomCipher,
    KeyPair,
    Transaction,
    TxKind,
    hash_header,
    sign_transaction,
    to_hex,
    verify_transaction,
)
from .missions import Progress
from .p2p import PeerState

MAX_NICKNAME_CHARS = 24
MAX_MESSAGE_CHARS = 512
POST_INTERVAL_MS = 500
UNREADABLE = "[unreadable]"


@dataclass
class Session:
    """One student's node-side identity. Never persisted anywhere."""

    token: str
    nickname: str
    keypair: KeyPair
    progress: Progress = field(default_factory=Progress)
    last_post_ms: int | None = None

    @property
    def level(self) -> int:
        return self.progress.level


class SessionRegistry:
    """Join handling with classroom-unique nicknames."""

    def __init__(self):
        self._by_token: dict[str, Session] = {}
        self._nicknames: set[str] = set()

    def join(self, nickname: str) -> Session:
        name = nickname.strip()
        if not name:
            raise ApiError("invalid-nickname", "nickname must not be empty")
        if len(name) > MAX_NICKNAME_CHARS:
            raise ApiError(
                "invalid-nickname", f"nickname longer than {MAX_NICKNAME_CHARS} characters"
            )
        unique = name
        suffix = 2
        while unique in self._nicknames:
            unique = f"{name}-{suffix}"
            suffix += 1
        session = Session(
            token=secrets.token_hex(16), nickname=unique, keypair=KeyPair.generate()
        )
        self._by_token[session.token] = session
        self._nicknames.add(unique)
        return session

    def get(self, token: str) -> Session:
        session = self._by_token.get(token)
        if session is None:
            raise ApiError("invalid-token", "unknown or expired session token")
        return session

    def __len__(self) -> int:
        return len(self._by_token)


def build_chat_transaction(
    session: Session, text: str, cipher: ClassroomCipher, now: int
) -> Transaction:
    """Validate, rate-limit, encrypt and sign one outgoing chat message."""
    if not text:
        raise ApiError("empty-message", "message must not be empty")
    if len(text) > MAX_MESSAGE_CHARS:
        raise ApiError(
            "message-too-long", f"message longer than {MAX_MESSAGE_CHARS} characters"
        )
    if session.last_post_ms is not None:
        elapsed = now - session.last_post_ms
        if elapsed < POST_INTERVAL_MS:
            raise ApiError(
                "rate-limited",
                "posting too fast",
                retry_after_ms=POST_INTERVAL_MS - elapsed,
            )
    payload = cipher.encrypt(text.encode("utf-8"))
    tx = sign_transaction(session.keypair, TxKind.CHAT, session.nickname, payload, now)
    session.last_post_ms = now
    return tx


@dataclass(frozen=True)
class ChatMessageView:
    tx_id: bytes
    nickname: str
    plaintext: str
    timestamp: int
    block_index: int | None  # None while pending

    @property
    def status(self) -> str:
        return "pending" if self.block_index is None else "confirmed"

    def to_json(self) -> dict:
        return {
            "tx_id": to_hex(self.tx_id),
            "nickname": self.nickname,
            "text": self.plaintext,
            "timestamp": self.timestamp,
            "status": self.status,
            "block_index": self.block_index,
        }


def message_feed(chain: ChainState, cipher: ClassroomCipher) -> list[ChatMessageView]:
    """Confirmed chat messages in chain order, then pending ones by
    (timestamp, id). Non-chat kinds are events, not feed entries."""
    feed: list[ChatMessageView] = []
    for block in chain.blocks:
        for tx in block.transactions:
            view = message_feed_entry(tx, cipher, block.header.index)
            if view is not None:
                feed.append(view)
    pending = sorted(chain.mempool.values(), key=lambda tx: (tx.timestamp, tx.id))
    for tx in pending:
        view = message_feed_entry(tx, cipher, None)
        if view is not None:
            feed.append(view)
    return feed


def message_feed_entry(
    tx: Transaction, cipher: ClassroomCipher, block_index: int | None = None
) -> ChatMessageView | None:
    """Feed view of one transaction, or None when it does not belong there."""
    if tx.kind != TxKind.CHAT:
        return None
    if not verify_transaction(tx):
        return None
    plaintext = cipher.decrypt(tx.payload)
    if plaintext is None:
        text = UNREADABLE
    else:
        try:
            text = plaintext.decode("utf-8")
        except UnicodeDecodeError:
            text = UNREADABLE
    return ChatMessageView(tx.id, tx.author_nick, text, tx.timestamp, block_index)


# -- explorer read model (level 2) -------------------------------------------

def get_block_view(chain: ChainState, index: int, cipher: ClassroomCipher) -> dict:
    if not 0 <= index < len(chain.blocks):
        raise ApiError("not-found", f"no block at index {index}")
    block = chain.blocks[index]
    return {
        "hash": to_hex(hash_header(block.header)),
        "header": block.header.to_json(),
        "transactions": [
            transaction_view(tx, cipher, block.header.index) for tx in block.transactions
        ],
    }


def get_transaction_view(chain: ChainState, tx_id: bytes, cipher: ClassroomCipher) -> dict:
    for block in chain.blocks:
        for tx in block.transactions:
            if tx.id == tx_id:
                return transaction_view(tx, cipher, block.header.index)
    tx = chain.mempool.get(tx_id)
    if tx is not None:
        return transaction_view(tx, cipher, None)
    raise ApiError("not-found", f"no transaction {to_hex(tx_id)}")


def transaction_view(tx: Transaction, cipher: ClassroomCipher, block_index: int | None) -> dict:
    """Everything the explorer shows: ciphertext and plaintext side by side."""
    if tx.kind == TxKind.CHAT:
        plaintext = cipher.decrypt(tx.payload)
        text = UNREADABLE if plaintext is None else plaintext.decode("utf-8", "replace")
    else:
        text = tx.payload.decode("utf-8", "replace")
    return {
        "id": to_hex(tx.id),
        "kind": tx.kind.wire_name,
        "author": to_hex(tx.author),
        "author_nick": tx.author_nick,
        "ciphertext": to_hex(tx.payload),
        "plaintext": text,
        "timestamp": tx.timestamp,
        "signature": to_hex(tx.signature),
        "signature_valid": verify_transaction(tx),
        "block_index": block_index,
    }


def chain_summary(chain: ChainState) -> list[dict]:
    return [
        {
            "index": block.header.index,
            "hash": to_hex(hash_header(block.header)),
            "prev_hash": to_hex(block.header.prev_hash),
            "nonce": block.header.nonce,
            "difficulty": block.header.difficulty,
            "tx_count": len(block.transactions),
            "timestamp": block.header.timestamp,
            "miner_nick": block.header.miner_nick,
        }
        for block in chain.blocks
    ]


def peer_table(peers: PeerState, now: int) -> list[dict]:
    return [
        {
            "address": address,
            "tip_index": info.tip_index,
            "last_seen_ms_ago": max(0, now - info.last_seen_ms),
        }
        for address, info in sorted(peers.peers.items())
    ]
