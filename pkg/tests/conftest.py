"""Shared fixtures and small builders used across the suite."""

from __future__ import annotations

import numpy as np
import pytest

from chunkchain.ledger import (
    Block,
    ChainState,
    ClassroomCipher,
    KeyPair,
    TxKind,
    build_block,
    mempool_add,
    new_chain,
    select_chain,
    sign_transaction,
)

FAST_KDF_ITERATIONS = 1000  # keep per-test key derivation cheap


@pytest.fixture(scope="session")
def keypair() -> KeyPair:
    return KeyPair.generate()


@pytest.fixture(scope="session")
def cipher() -> ClassroomCipher:
    return ClassroomCipher("demo", "secret123", iterations=FAST_KDF_ITERATIONS)


def make_tx(
    keypair: KeyPair,
    payload: bytes = b"payload",
    timestamp: int = 1_000,
    nick: str = "tester",
    kind: TxKind = TxKind.CHAT,
):
    return sign_transaction(keypair, kind, nick, payload, timestamp)


def make_chain(
    keypair: KeyPair,
    n_blocks: int,
    txs_per_block: int = 3,
    difficulty: int = 4,
    classroom: str = "demo",
) -> ChainState:
    """A valid chain of ``n_blocks`` mined blocks on top of genesis."""
    state = new_chain(classroom, difficulty)
    counter = 0
    for height in range(1, n_blocks + 1):
        txs = []
        for _ in range(txs_per_block):
            counter += 1
            txs.append(
                make_tx(keypair, payload=f"message {counter}".encode(), timestamp=height * 1000)
            )
        for tx in txs:
            state = mempool_add(state, tx)
        block = build_block(
            prev=state.tip,
            transactions=tuple(txs),
            timestamp=height * 1000,
            difficulty=difficulty,
            miner_nick="miner",
        )
        assert block is not None
        state = select_chain(state, [block])
        assert state.tip_index == height
    return state


def dataset_with_exact_correlation(r: float, n: int, seed: int = 0):
    """Two samples whose Pearson correlation is exactly ``r`` (to fp rounding)."""
    rng = np.random.default_rng(seed)
    x = np.arange(n, dtype=float)
    helper = rng.normal(size=n)
    xc = x - x.mean()
    xc /= np.linalg.norm(xc)
    e = helper - helper.mean()
    e -= (e @ xc) * xc
    e /= np.linalg.norm(e)
    y = r * xc + np.sqrt(1.0 - r * r) * e
    return x, y
