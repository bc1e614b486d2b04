"""Block and chain validation.

Violations are returned as stable rule names, never raised; the first rule
that fails wins. Rule order: index, prev-hash link, tx root, proof of work,
transaction validity, timestamp skew, transaction count.
"""

from __future__ import annotations

from .crypto import ZERO_DIGEST
from .pow import meets_difficulty
from .types import (
    MAX_BLOCK_TXS,
    Block,
    compute_tx_root,
    hash_header,
    verify_transaction,
)

CLOCK_SKEW_MS = 120_000

V_INDEX = "index"
V_PREV_HASH = "prev-hash-mismatch"
V_TX_ROOT = "tx-root-mismatch"
V_POW = "pow"
V_TX_INVALID = "tx-invalid"
V_TIMESTAMP = "timestamp"
V_TX_COUNT = "tx-count"
V_GENESIS = "genesis-shape"


def validate_block(block: Block, prev: Block | None) -> str | None:
    """None when the block is valid on top of ``prev``, else the failed rule."""
    header = block.header
    if prev is None:
        if header.index != 0:
            return V_INDEX
        if header.prev_hash != ZERO_DIGEST:
            return V_PREV_HASH
        if block.transactions:
            return V_GENESIS
        if header.tx_root != compute_tx_root(()):
            return V_TX_ROOT
        return None
    if header.index != prev.header.index + 1:
        return V_INDEX
    if header.prev_hash != hash_header(prev.header):
        return V_PREV_HASH
    if header.tx_root != compute_tx_root(block.transactions):
        return V_TX_ROOT
    if not meets_difficulty(hash_header(header), header.difficulty):
        return V_POW
    for tx in block.transactions:
        if not verify_transaction(tx):
            return V_TX_INVALID
    if header.timestamp < prev.header.timestamp - CLOCK_SKEW_MS:
        return V_TIMESTAMP
    if len(block.transactions) > MAX_BLOCK_TXS:
        return V_TX_COUNT
    return None


def validate_chain(blocks: tuple[Block, ...]) -> tuple[int, str] | None:
    """First (block index position, violation) in the sequence, or None."""
    prev: Block | None = None
    for position, block in enumerate(blocks):
        violation = validate_block(block, prev)
        if violation is not None:
            return position, violation
        prev = block
    return None
