import pytest

from chunkchain.chat import (
    MAX_MESSAGE_CHARS,
    POST_INTERVAL_MS,
    UNREADABLE,
    SessionRegistry,
    build_chat_transaction,
    chain_summary,
    get_block_view,
    get_transaction_view,
    message_feed,
    peer_table,
)
from chunkchain.errors import ApiError
from chunkchain.ledger import (
    ClassroomCipher,
    TxKind,
    build_block,
    drain_for_block,
    mempool_add,
    new_chain,
    select_chain,
    sign_transaction,
    verify_transaction,
)
from chunkchain.p2p import PeerInfo, new_peer_state
from conftest import FAST_KDF_ITERATIONS


@pytest.fixture
def registry():
    return SessionRegistry()


def test_join_deduplicates_nicknames(registry):
    names = [registry.join("alice").nickname for _ in range(3)]
    assert names == ["alice", "alice-2", "alice-3"]


def test_join_rejects_empty_and_too_long(registry):
    with pytest.raises(ApiError):
        registry.join("   ")
    with pytest.raises(ApiError):
        registry.join("x" * 25)
    assert registry.join("x" * 24).nickname == "x" * 24


def test_join_initial_state(registry):
    session = registry.join("bob")
    assert session.level == 1
    assert session.progress.completed == frozenset()


def test_unknown_token_rejected(registry):
    with pytest.raises(ApiError) as err:
        registry.get("nope")
    assert err.value.code == "invalid-token"


def test_post_length_boundary(registry, cipher):
    session = registry.join("alice")
    tx = build_chat_transaction(session, "x" * MAX_MESSAGE_CHARS, cipher, now=1000)
    assert verify_transaction(tx)
    session2 = registry.join("bob")
    with pytest.raises(ApiError) as err:
        build_chat_transaction(session2, "x" * (MAX_MESSAGE_CHARS + 1), cipher, now=1000)
    assert err.value.code == "message-too-long"


def test_post_rate_limit(registry, cipher):
    session = registry.join("alice")
    build_chat_transaction(session, "one", cipher, now=1000)
    with pytest.raises(ApiError) as err:
        build_chat_transaction(session, "two", cipher, now=1000 + POST_INTERVAL_MS - 1)
    assert err.value.code == "rate-limited"
    assert err.value.retry_after_ms == 1
    tx = build_chat_transaction(session, "two", cipher, now=1000 + POST_INTERVAL_MS)
    assert verify_transaction(tx)


def test_post_round_trips_through_cipher(registry, cipher):
    session = registry.join("alice")
    tx = build_chat_transaction(session, "döner time", cipher, now=1000)
    assert cipher.decrypt(tx.payload) == "döner time".encode()


def test_feed_empty_initially(cipher):
    assert message_feed(new_chain("demo", 0), cipher) == []


def test_feed_pending_then_confirmed_no_duplicates(registry, cipher):
    session = registry.join("alice")
    state = new_chain("demo", 0)
    tx = build_chat_transaction(session, "hello", cipher, now=1000)
    state = mempool_add(state, tx)
    feed = message_feed(state, cipher)
    assert [ (v.status, v.plaintext) for v in feed ] == [("pending", "hello")]

    state, drained = drain_for_block(state)
    state = select_chain(state, [build_block(state.tip, drained, 2000, 0, "m")])
    feed = message_feed(state, cipher)
    assert len(feed) == 1
    assert feed[0].status == "confirmed" and feed[0].block_index == 1


def test_feed_order_confirmed_before_pending(registry, cipher):
    state = new_chain("demo", 0)
    confirmed_sessions = [registry.join(f"c{i}") for i in range(3)]
    confirmed = [
        build_chat_transaction(s, f"confirmed {i}", cipher, now=1000 + i)
        for i, s in enumerate(confirmed_sessions)
    ]
    for tx in confirmed:
        state = mempool_add(state, tx)
    state, drained = drain_for_block(state)
    state = select_chain(state, [build_block(state.tip, drained, 2000, 0, "m")])
    pending_sessions = [registry.join(f"p{i}") for i in range(2)]
    # Pending with EARLIER timestamps than the confirmed batch still sorts after.
    for i, s in enumerate(pending_sessions):
        state = mempool_add(state, build_chat_transaction(s, f"pending {i}", cipher, now=500 + i))
    feed = message_feed(state, cipher)
    assert [v.status for v in feed] == ["confirmed"] * 3 + ["pending"] * 2
    assert [v.plaintext for v in feed[3:]] == ["pending 0", "pending 1"]


def test_feed_excludes_non_chat_kinds(keypair, cipher):
    state = new_chain("demo", 0)
    state = mempool_add(
        state, sign_transaction(keypair, TxKind.ACHIEVEMENT, "a", b"{}", 1)
    )
    state = mempool_add(state, sign_transaction(keypair, TxKind.SYSTEM, "s", b"note", 2))
    assert message_feed(state, cipher) == []


def test_feed_unreadable_placeholder(registry, cipher):
    foreign = ClassroomCipher("demo", "other-passphrase", iterations=FAST_KDF_ITERATIONS)
    session = registry.join("eve")
    state = new_chain("demo", 0)
    state = mempool_add(state, build_chat_transaction(session, "geheim", foreign, now=1))
    feed = message_feed(state, cipher)
    assert feed[0].plaintext == UNREADABLE


def test_feed_completeness(registry, cipher):
    state = new_chain("demo", 0)
    sessions = [registry.join(f"s{i}") for i in range(6)]
    sent = []
    for i, session in enumerate(sessions):
        tx = build_chat_transaction(session, f"m{i}", cipher, now=1000 + i)
        sent.append(tx.id)
        state = mempool_add(state, tx)
    state, drained = drain_for_block(state, max_tx=3)
    state = select_chain(state, [build_block(state.tip, drained, 5000, 0, "m")])
    feed = message_feed(state, cipher)
    assert sorted(v.tx_id for v in feed) == sorted(sent)
    assert len({v.tx_id for v in feed}) == 6


def test_explorer_views(registry, cipher):
    session = registry.join("alice")
    state = new_chain("demo", 0)
    tx = build_chat_transaction(session, "inspect me", cipher, now=1000)
    state = mempool_add(state, tx)
    state, drained = drain_for_block(state)
    state = select_chain(state, [build_block(state.tip, drained, 2000, 0, "m")])

    genesis = get_block_view(state, 0, cipher)
    assert genesis["header"]["prev_hash"] == "00" * 32

    view = get_transaction_view(state, tx.id, cipher)
    assert view["block_index"] == 1
    assert view["plaintext"] == "inspect me"
    assert view["ciphertext"] != ""
    assert view["signature_valid"]

    summary = chain_summary(state)
    assert [b["index"] for b in summary] == [0, 1]
    assert summary[1]["tx_count"] == 1
    assert summary[1]["prev_hash"] == genesis["hash"]

    with pytest.raises(ApiError) as err:
        get_block_view(state, 2, cipher)
    assert err.value.code == "not-found"
    with pytest.raises(ApiError):
        get_transaction_view(state, b"\x00" * 32, cipher)


def test_feed_drops_transactions_with_bad_signatures(registry, cipher):
    # Defense in depth: even a hand-built state with a tampered tx must not
    # surface it in the feed.
    import dataclasses

    session = registry.join("mallory")
    tx = build_chat_transaction(session, "forged", cipher, now=1)
    forged = dataclasses.replace(tx, author_nick="somebody-else")
    state = new_chain("demo", 0)
    state = dataclasses.replace(state, mempool={forged.id: forged})
    assert message_feed(state, cipher) == []


def test_peer_table_mirrors_state():
    peers = new_peer_state("me").with_peer("b:1", PeerInfo(900, tip_index=4))
    table = peer_table(peers, now=1000)
    assert table == [{"address": "b:1", "tip_index": 4, "last_seen_ms_ago": 100}]
