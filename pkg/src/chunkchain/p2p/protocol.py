"""The gossip protocol state machine.

``handle_message`` is a pure function: it maps (chain state, peer state,
message, now) to new states plus outbound messages, and never performs IO.
Transport adapters deliver messages into it sequentially per node.

Rules in brief: peers are admitted by a HELLO whose genesis hash matches
ours; transactions and blocks are flooded to every peer except the sender,
with a bounded seen-cache suppressing duplicates; a block beyond our tip
triggers a paged chain fetch; competing chains are settled by fork choice;
malformed traffic earns strikes, three strikes evict the peer, and so does
silence longer than the peer timeout.
"""

from __future__ import annotations

from dataclasses import replace

from ..ledger import (
    Block,
    ChainState,
    EncodingError,
    hash_header,
    mempool_add,
    select_chain,
    to_hex,
    validate_block,
    verify_transaction,
)
from . import messages as wire
from .messages import MsgType, PeerMessage
from .state import (
    BEACON_INTERVAL_MS,
    MAX_STRIKES,
    PEER_TIMEOUT_MS,
    SYNC_PAGE_SIZE,
    PeerInfo,
    PeerState,
    SyncState,
)

Outbound = list[tuple[str, PeerMessage]]


def genesis_hex(chain: ChainState) -> str:
    return to_hex(hash_header(chain.blocks[0].header))


def classroom_of(chain: ChainState) -> str:
    # The classroom name is pinned into the genesis header's miner_nick.
    return chain.blocks[0].header.miner_nick


def make_hello(chain: ChainState, peers: PeerState) -> PeerMessage:
    return wire.hello(peers.node_id, classroom_of(chain), genesis_hex(chain), chain.tip_index)


def handle_message(
    chain: ChainState, peers: PeerState, msg: PeerMessage, now: int
) -> tuple[ChainState, PeerState, Outbound]:
    """Advance the protocol state machine by one received message."""
    if msg.sender_id == peers.node_id:
        return chain, peers, []
    handler = _HANDLERS[msg.type]
    try:
        return handler(chain, peers, msg, now)
    except EncodingError:
        return chain, _strike(peers, msg.sender_id), []


def _strike(peers: PeerState, address: str) -> PeerState:
    info = peers.peers.get(address)
    if info is None:
        return peers
    if info.strikes + 1 >= MAX_STRIKES:
        return peers.without_peer(address)
    return peers.with_peer(address, replace(info, strikes=info.strikes + 1))


def _gossip_targets(peers: PeerState, exclude: str) -> list[str]:
    return [address for address in peers.peers if address != exclude]


def _handle_hello(chain, peers, msg, now):
    classroom, genesis, tip = wire.parse_hello(msg.body)
    if genesis != genesis_hex(chain):
        # Foreign classroom: never peer, and forget them if we had them.
        return chain, peers.without_peer(msg.sender_id), []
    known = peers.peers.get(msg.sender_id)
    strikes = known.strikes if known else 0
    peers = peers.with_peer(msg.sender_id, PeerInfo(now, tip, strikes))
    addresses = [a for a in peers.peers if a != msg.sender_id]
    reply = wire.peers_msg(peers.node_id, addresses)
    return chain, peers, [(msg.sender_id, reply)]


def _handle_peers(chain, peers, msg, now):
    addresses = wire.parse_peers(msg.body)
    # A PEERS frame is only ever a reply to our HELLO, so the sender has
    # accepted us; admit it even if we did not know it yet.
    if msg.sender_id not in peers.peers:
        peers = peers.with_peer(msg.sender_id, PeerInfo(now))
    peers = peers.touch(msg.sender_id, now)
    outbound: Outbound = []
    hello = None
    for address in addresses:
        if address == peers.node_id or address in peers.peers:
            continue
        if hello is None:
            hello = make_hello(chain, peers)
        outbound.append((address, hello))
    return chain, peers, outbound


def _handle_tx_gossip(chain, peers, msg, now):
    if msg.sender_id not in peers.peers:
        # Gossip only flows between peered nodes; genesis isolation depends on it.
        return chain, peers, []
    peers = peers.touch(msg.sender_id, now)
    tx = wire.parse_tx_gossip(msg.body)
    if tx.id in peers.seen_tx:
        return chain, peers, []
    peers = replace(peers, seen_tx=peers.seen_tx.add(tx.id))
    if not verify_transaction(tx):
        return chain, _strike(peers, msg.sender_id), []
    chain = mempool_add(chain, tx)
    forward = wire.tx_gossip(peers.node_id, tx)
    outbound = [(a, forward) for a in _gossip_targets(peers, msg.sender_id)]
    return chain, peers, outbound


def _handle_block_gossip(chain, peers, msg, now):
    if msg.sender_id not in peers.peers:
        return chain, peers, []
    block = wire.parse_block_gossip(msg.body)
    block_hash = hash_header(block.header)
    peers = peers.touch(msg.sender_id, now, tip_index=block.header.index)
    if block_hash in peers.seen_block:
        return chain, peers, []
    peers = replace(peers, seen_block=peers.seen_block.add(block_hash))

    tip_index = chain.tip_index
    index = block.header.index

    if index == tip_index + 1 and block.header.prev_hash == hash_header(chain.tip.header):
        if validate_block(block, chain.tip) is not None:
            return chain, _strike(peers, msg.sender_id), []
        chain = select_chain(chain, [block])
        forward = wire.block_gossip(peers.node_id, block)
        outbound = [(a, forward) for a in _gossip_targets(peers, msg.sender_id)]
        return chain, peers, outbound

    if index > tip_index + 1:
        # We are behind; fetch the gap.
        request = wire.chain_request(peers.node_id, tip_index + 1, index)
        peers = replace(peers, pending_sync=SyncState(msg.sender_id, index))
        return chain, peers, [(msg.sender_id, request)]

    if index <= tip_index and block_hash == hash_header(chain.blocks[index].header):
        return chain, peers, []  # already ours

    # A competing fork: fetch a window ending at the advertised block and
    # let fork choice decide once we can attach it.
    lo = max(1, index - (SYNC_PAGE_SIZE - 1))
    request = wire.chain_request(peers.node_id, lo, index)
    peers = replace(peers, pending_sync=SyncState(msg.sender_id, index))
    return chain, peers, [(msg.sender_id, request)]


def _handle_chain_request(chain, peers, msg, now):
    lo, hi = wire.parse_chain_request(msg.body)
    peers = peers.touch(msg.sender_id, now)
    page = list(chain.blocks[lo : min(hi + 1, lo + SYNC_PAGE_SIZE, len(chain.blocks))])
    return chain, peers, [(msg.sender_id, wire.chain_response(peers.node_id, page))]


def _handle_chain_response(chain, peers, msg, now):
    page = wire.parse_chain_response(msg.body)
    peers = peers.touch(msg.sender_id, now)
    if len(page) > SYNC_PAGE_SIZE or not _contiguous(page):
        return chain, _strike(peers, msg.sender_id), []
    if not page:
        return chain, replace(peers, pending_sync=None), []

    pending = peers.pending_sync
    window = pending.window if pending is not None and pending.peer == msg.sender_id else ()
    target = pending.target_index if pending is not None else page[-1].header.index
    buffer = _stitch(window, page)
    if buffer is None:
        return chain, replace(peers, pending_sync=None), []

    first = buffer[0].header
    attachable = first.index == 0 or (
        first.index <= chain.tip_index + 1
        and first.prev_hash == hash_header(chain.blocks[first.index - 1].header)
    )
    if not attachable:
        if first.index <= 1:
            # Nothing earlier to fetch; the fork claims a different genesis.
            return chain, _strike(replace(peers, pending_sync=None), msg.sender_id), []
        lo = max(1, first.index - SYNC_PAGE_SIZE)
        request = wire.chain_request(peers.node_id, lo, first.index - 1)
        peers = replace(peers, pending_sync=SyncState(msg.sender_id, target, buffer))
        return chain, peers, [(msg.sender_id, request)]

    new_chain = select_chain(chain, buffer)
    adopted = new_chain is not chain
    peers = replace(peers, pending_sync=None)
    if adopted and target > new_chain.tip_index:
        # Long gap: keep paging forward from the new tip.
        request = wire.chain_request(peers.node_id, new_chain.tip_index + 1, target)
        peers = replace(peers, pending_sync=SyncState(msg.sender_id, target))
        return new_chain, peers, [(msg.sender_id, request)]
    return new_chain, peers, []


def _contiguous(page: tuple[Block, ...]) -> bool:
    for prev, block in zip(page, page[1:]):
        if block.header.index != prev.header.index + 1:
            return False
        if block.header.prev_hash != hash_header(prev.header):
            return False
    return True


def _stitch(window: tuple[Block, ...], page: tuple[Block, ...]) -> tuple[Block, ...] | None:
    """Join a fetched page onto the collected window; None if they don't link."""
    if not window:
        return page
    if (
        page[-1].header.index + 1 == window[0].header.index
        and window[0].header.prev_hash == hash_header(page[-1].header)
    ):
        return page + window
    if (
        window[-1].header.index + 1 == page[0].header.index
        and page[0].header.prev_hash == hash_header(window[-1].header)
    ):
        return window + page
    return None


def _handle_ping(chain, peers, msg, now):
    peers = peers.touch(msg.sender_id, now)
    return chain, peers, [(msg.sender_id, wire.pong(peers.node_id))]


def _handle_pong(chain, peers, msg, now):
    return chain, peers.touch(msg.sender_id, now), []


_HANDLERS = {
    MsgType.HELLO: _handle_hello,
    MsgType.PEERS: _handle_peers,
    MsgType.TX_GOSSIP: _handle_tx_gossip,
    MsgType.BLOCK_GOSSIP: _handle_block_gossip,
    MsgType.CHAIN_REQUEST: _handle_chain_request,
    MsgType.CHAIN_RESPONSE: _handle_chain_response,
    MsgType.PING: _handle_ping,
    MsgType.PONG: _handle_pong,
}


def keepalive_tick(peers: PeerState, now: int) -> tuple[PeerState, Outbound]:
    """Evict peers silent past the timeout and ping the rest."""
    alive = {
        address: info
        for address, info in peers.peers.items()
        if now - info.last_seen_ms <= PEER_TIMEOUT_MS
    }
    state = replace(peers, peers=alive)
    if state.pending_sync is not None and state.pending_sync.peer not in alive:
        state = replace(state, pending_sync=None)
    outbound = [(address, wire.ping(peers.node_id)) for address in alive]
    return state, outbound


def discovery_tick(
    peers: PeerState, classroom: str, listen_address: str, now: int
) -> tuple[PeerState, list[bytes]]:
    """Emit one broadcast beacon per interval announcing this node."""
    last = peers.last_beacon_ms
    if last is not None and now - last < BEACON_INTERVAL_MS:
        return peers, []
    return replace(peers, last_beacon_ms=now), [wire.encode_beacon(classroom, listen_address)]


def handle_beacon(chain: ChainState, peers: PeerState, datagram: bytes) -> Outbound:
    """HELLO any unknown node of our own classroom announcing itself."""
    try:
        beacon_classroom, address = wire.decode_beacon(datagram)
    except EncodingError:
        return []
    if beacon_classroom != classroom_of(chain):
        return []
    if address == peers.node_id or address in peers.peers:
        return []
    return [(address, make_hello(chain, peers))]
