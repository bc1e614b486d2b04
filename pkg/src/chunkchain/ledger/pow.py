"""Proof of work: difficulty checks, the mining loop and the manual probe."""

from __future__ import annotations

from dataclasses import replace

from .crypto import sha256
from .types import Block, BlockHeader, Transaction, compute_tx_root, hash_header

DEFAULT_MAX_ATTEMPTS = 1 << 22
U64_WRAP = 1 << 64


def leading_zero_bits(digest: bytes) -> int:
    """Number of leading zero bits in a digest (256 for the all-zero digest)."""
    value = int.from_bytes(digest, "big")
    return len(digest) * 8 - value.bit_length()


def meets_difficulty(digest: bytes, difficulty: int) -> bool:
    return leading_zero_bits(digest) >= difficulty


def try_nonce(template: BlockHeader, nonce: int) -> tuple[bytes, bool]:
    """One manual mining guess: the resulting digest and whether it qualifies.

    Pure and side-effect free; the difficulty target comes from the template.
    """
    digest = hash_header(replace(template, nonce=nonce))
    return digest, meets_difficulty(digest, template.difficulty)


def mine(
    template: BlockHeader,
    difficulty: int,
    nonce_start: int = 0,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> int | None:
    """Search nonces sequentially from ``nonce_start``; None when exhausted.

    The search order is fixed so results are reproducible: the same template
    and start always find the same nonce.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    header = replace(template, difficulty=difficulty)
    for attempt in range(max_attempts):
        nonce = (nonce_start + attempt) % U64_WRAP
        if meets_difficulty(sha256(replace(header, nonce=nonce).encode()), difficulty):
            return nonce
    return None


def build_block(
    prev: Block,
    transactions: tuple[Transaction, ...],
    timestamp: int,
    difficulty: int,
    miner_nick: str,
    nonce_start: int = 0,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> Block | None:
    """Assemble and mine the next block on top of ``prev``; None if exhausted."""
    template = BlockHeader(
        index=prev.header.index + 1,
        prev_hash=hash_header(prev.header),
        tx_root=compute_tx_root(transactions),
        timestamp=timestamp,
        difficulty=difficulty,
        nonce=0,
        miner_nick=miner_nick,
    )
    nonce = mine(template, difficulty, nonce_start=nonce_start, max_attempts=max_attempts)
    if nonce is None:
        return None
    return Block(replace(template, nonce=nonce), transactions)
