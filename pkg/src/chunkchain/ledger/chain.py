"""Chain-level operations: genesis, the mempool and fork choice.

Fork choice is longest-valid-chain; equal lengths break toward the
lexicographically smaller tip digest so every node resolves the same way.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .crypto import ZERO_DIGEST
from .types import (
    MAX_BLOCK_TXS,
    MAX_DIFFICULTY,
    Block,
    BlockHeader,
    ChainState,
    Transaction,
    compute_tx_root,
    hash_header,
    verify_transaction,
)
from .validation import validate_block


def make_genesis(classroom_name: str, difficulty: int) -> Block:
    """Deterministic genesis: same classroom name and difficulty, same block.

    Timestamp and nonce are pinned to zero so nodes agree without any clock
    sync; the genesis block is exempt from the proof-of-work check.
    """
    if not 0 <= difficulty <= MAX_DIFFICULTY:
        raise ValueError(f"difficulty must be in [0, {MAX_DIFFICULTY}]")
    header = BlockHeader(
        index=0,
        prev_hash=ZERO_DIGEST,
        tx_root=compute_tx_root(()),
        timestamp=0,
        difficulty=difficulty,
        nonce=0,
        miner_nick=classroom_name,
    )
    return Block(header, ())


def new_chain(classroom_name: str, difficulty: int) -> ChainState:
    return ChainState(blocks=(make_genesis(classroom_name, difficulty),), mempool={}, difficulty=difficulty)


def mempool_add(state: ChainState, tx: Transaction) -> ChainState:
    """Add a pending transaction; duplicates are a silent no-op."""
    if not verify_transaction(tx):
        raise ValueError("transaction does not verify")
    if tx.id in state.mempool or tx.id in state.confirmed_ids():
        return state
    mempool = dict(state.mempool)
    mempool[tx.id] = tx
    return ChainState(state.blocks, mempool, state.difficulty)


def drain_for_block(
    state: ChainState, max_tx: int = MAX_BLOCK_TXS
) -> tuple[ChainState, tuple[Transaction, ...]]:
    """Remove up to ``max_tx`` pending transactions, ordered by timestamp then id."""
    ordered = sorted(state.mempool.values(), key=lambda tx: (tx.timestamp, tx.id))
    drained = tuple(ordered[:max_tx])
    remaining = {tx.id: tx for tx in ordered[max_tx:]}
    return ChainState(state.blocks, remaining, state.difficulty), drained


def select_chain(local: ChainState, candidate: Sequence[Block]) -> ChainState:
    """Adopt the candidate chain iff it is fully valid and strictly better.

    The candidate must attach to the local chain (its first block's prev is
    a local block, or it restates our genesis). Better means longer, or the
    same length with a smaller tip digest. On adoption, transactions from
    the abandoned suffix that the new chain does not contain go back to the
    mempool; anything now confirmed leaves it. Otherwise ``local`` is
    returned untouched.
    """
    candidate = tuple(candidate)
    if not candidate:
        return local

    first = candidate[0].header
    if first.index == 0:
        if candidate[0] != local.blocks[0]:
            return local
        prefix: tuple[Block, ...] = ()
    else:
        if first.index > len(local.blocks):
            return local
        attach = local.blocks[first.index - 1]
        if first.prev_hash != hash_header(attach.header):
            return local
        prefix = local.blocks[: first.index]

    prev = prefix[-1] if prefix else None
    for block in candidate:
        if validate_block(block, prev) is not None:
            return local
        prev = block

    proposed = prefix + candidate
    if len(proposed) < len(local.blocks):
        return local
    if len(proposed) == len(local.blocks):
        if hash_header(proposed[-1].header) >= hash_header(local.tip.header):
            return local

    confirmed = {tx.id for block in proposed for tx in block.transactions}
    abandoned = _transactions(local.blocks[len(prefix) :])
    mempool = {tx_id: tx for tx_id, tx in local.mempool.items() if tx_id not in confirmed}
    for tx in abandoned:
        if tx.id not in confirmed:
            mempool[tx.id] = tx
    return ChainState(proposed, mempool, local.difficulty)


def _transactions(blocks: Iterable[Block]) -> list[Transaction]:
    return [tx for block in blocks for tx in block.transactions]
