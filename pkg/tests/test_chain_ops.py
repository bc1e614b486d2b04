import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chunkchain.ledger import (
    Block,
    BlockHeader,
    KeyPair,
    Transaction,
    TxKind,
    build_block,
    drain_for_block,
    hash_header,
    mempool_add,
    new_chain,
    select_chain,
    sign_transaction,
)
from conftest import make_chain, make_tx

KP = KeyPair.generate()


def test_mempool_add_idempotent(keypair):
    state = new_chain("demo", 0)
    tx = make_tx(keypair)
    state = mempool_add(state, tx)
    state = mempool_add(state, tx)
    assert len(state.mempool) == 1


def test_mempool_rejects_unverified(keypair):
    state = new_chain("demo", 0)
    tx = make_tx(keypair)
    bad = dataclasses.replace(tx, payload=tx.payload + b"x")
    with pytest.raises(ValueError):
        mempool_add(state, bad)


def test_mempool_skips_confirmed(keypair):
    state = make_chain(keypair, 1)
    confirmed = state.blocks[1].transactions[0]
    assert mempool_add(state, confirmed) is state


def test_drain_orders_by_timestamp_then_id(keypair):
    state = new_chain("demo", 0)
    txs = [make_tx(keypair, payload=f"p{i}".encode(), timestamp=t) for i, t in enumerate((3, 1, 2))]
    for tx in txs:
        state = mempool_add(state, tx)
    _, drained = drain_for_block(state)
    assert [tx.timestamp for tx in drained] == [1, 2, 3]


def test_drain_caps_at_64(keypair):
    state = new_chain("demo", 0)
    for i in range(70):
        state = mempool_add(state, make_tx(keypair, payload=f"p{i}".encode(), timestamp=i))
    state, drained = drain_for_block(state)
    assert len(drained) == 64
    assert len(state.mempool) == 6


def test_longer_candidate_adopted(keypair):
    local = make_chain(keypair, 5)
    longer = make_chain(keypair, 6)
    # Same genesis/difficulty; rebuild the longer chain on the local genesis.
    adopted = select_chain(local, longer.blocks[1:])
    assert len(adopted.blocks) == 7
    assert adopted.blocks[-1] == longer.blocks[-1]


def test_equal_length_smaller_tip_digest_wins(keypair):
    base = make_chain(keypair, 2)
    tip_a = build_block(base.tip, (), timestamp=9000, difficulty=4, miner_nick="a")
    tip_b = build_block(base.tip, (), timestamp=9000, difficulty=4, miner_nick="b")
    state_a = select_chain(base, [tip_a])
    state_b = select_chain(base, [tip_b])
    winner = min((tip_a, tip_b), key=lambda b: hash_header(b.header))
    assert select_chain(state_a, [tip_b]).tip == winner
    assert select_chain(state_b, [tip_a]).tip == winner


def test_invalid_candidate_leaves_local_untouched(keypair):
    local = make_chain(keypair, 3)
    longer = make_chain(keypair, 5)
    blocks = list(longer.blocks[1:])
    victim = blocks[2]
    tx = victim.transactions[0]
    bad_tx = dataclasses.replace(tx, payload=tx.payload + b"!")
    blocks[2] = Block(victim.header, (bad_tx,) + victim.transactions[1:])
    assert select_chain(local, blocks) is local


def test_unattached_candidate_rejected(keypair):
    local = make_chain(keypair, 2)
    foreign = make_chain(keypair, 4, classroom="other")
    assert select_chain(local, foreign.blocks[1:]) is local
    assert select_chain(local, foreign.blocks) is local  # foreign genesis


def test_reorg_returns_abandoned_txs_to_mempool(keypair):
    base = make_chain(keypair, 2)
    ours = make_tx(keypair, payload=b"only in our fork", timestamp=5000)
    with_ours = mempool_add(base, ours)
    with_ours, drained = drain_for_block(with_ours)
    our_tip = build_block(with_ours.tip, drained, 5000, 4, "us")
    local = select_chain(with_ours, [our_tip])
    assert ours.id in local.confirmed_ids()

    their_1 = build_block(base.tip, (), 5100, 4, "them")
    their_2 = build_block(their_1, (), 5200, 4, "them")
    adopted = select_chain(local, [their_1, their_2])
    assert len(adopted.blocks) == 5
    assert ours.id in adopted.mempool
    assert ours.id not in adopted.confirmed_ids()


def test_mempool_chain_disjoint_after_reorg(keypair):
    base = make_chain(keypair, 1)
    shared = make_tx(keypair, payload=b"in both forks", timestamp=4000)
    local = mempool_add(base, shared)
    local, drained = drain_for_block(local)
    local = select_chain(local, [build_block(local.tip, drained, 4000, 4, "us")])

    their_1 = build_block(base.tip, (shared,), 4100, 4, "them")
    their_2 = build_block(their_1, (), 4200, 4, "them")
    adopted = select_chain(local, [their_1, their_2])
    confirmed = adopted.confirmed_ids()
    assert shared.id in confirmed
    assert not set(adopted.mempool) & confirmed


def test_empty_candidate_is_noop(keypair):
    local = make_chain(keypair, 1)
    assert select_chain(local, []) is local


nick_strategy = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), min_size=0, max_size=24
)


@settings(max_examples=50, deadline=None)
@given(
    payload=st.binary(min_size=0, max_size=200),
    timestamp=st.integers(min_value=0, max_value=2**63),
    nick=nick_strategy,
    kind=st.sampled_from(list(TxKind)),
)
def test_transaction_byte_round_trip(payload, timestamp, nick, kind):
    tx = sign_transaction(KP, kind, nick, payload, timestamp)
    assert Transaction.decode(tx.encode()) == tx
    assert Transaction.from_json(tx.to_json()) == tx


@settings(max_examples=25, deadline=None)
@given(
    n_txs=st.integers(min_value=0, max_value=5),
    timestamp=st.integers(min_value=0, max_value=2**40),
    miner=nick_strategy,
)
def test_block_byte_round_trip(n_txs, timestamp, miner):
    txs = tuple(
        sign_transaction(KP, TxKind.CHAT, "n", f"m{i}".encode(), i) for i in range(n_txs)
    )
    genesis = new_chain("demo", 0).blocks[0]
    block = build_block(genesis, txs, timestamp, 0, miner)
    assert Block.decode(block.encode()) == block
    assert Block.from_json(block.to_json()) == block


def test_header_round_trip_via_block():
    header = BlockHeader(3, b"\x01" * 32, b"\x02" * 32, 77, 12, 999, "miner")
    assert BlockHeader.from_json(header.to_json()) == header
