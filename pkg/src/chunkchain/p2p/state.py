"""Per-node protocol state: the peer table and recently-seen caches."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

from ..ledger import Block

SEEN_CACHE_CAPACITY = 4096
PEER_TIMEOUT_MS = 30_000
BEACON_INTERVAL_MS = 5_000
SYNC_PAGE_SIZE = 32
MAX_STRIKES = 3


@dataclass(frozen=True)
class FifoSet:
    """Bounded recently-seen id cache with FIFO eviction, immutable."""

    capacity: int
    order: tuple[bytes, ...] = ()
    members: frozenset[bytes] = frozenset()

    def __contains__(self, item: bytes) -> bool:
        return item in self.members

    def __len__(self) -> int:
        return len(self.order)

    def add(self, item: bytes) -> "FifoSet":
        if item in self.members:
            return self
        order = self.order + (item,)
        if len(order) > self.capacity:
            order = order[len(order) - self.capacity :]
        return FifoSet(self.capacity, order, frozenset(order))


@dataclass(frozen=True)
class PeerInfo:
    last_seen_ms: int
    tip_index: int = 0
    strikes: int = 0


@dataclass(frozen=True)
class SyncState:
    """An in-flight chain fetch: who we ask, how far, and what we collected."""

    peer: str
    target_index: int
    window: tuple[Block, ...] = ()


@dataclass(frozen=True)
class PeerState:
    """Protocol state of one node. A node is never its own peer."""

    node_id: str
    peers: Mapping[str, PeerInfo] = field(default_factory=dict)
    seen_tx: FifoSet = field(default_factory=lambda: FifoSet(SEEN_CACHE_CAPACITY))
    seen_block: FifoSet = field(default_factory=lambda: FifoSet(SEEN_CACHE_CAPACITY))
    pending_sync: SyncState | None = None
    last_beacon_ms: int | None = None

    def with_peer(self, address: str, info: PeerInfo) -> "PeerState":
        if address == self.node_id:
            return self
        peers = dict(self.peers)
        peers[address] = info
        return replace(self, peers=peers)

    def without_peer(self, address: str) -> "PeerState":
        if address not in self.peers:
            return self
        peers = dict(self.peers)
        del peers[address]
        state = replace(self, peers=peers)
        if state.pending_sync is not None and state.pending_sync.peer == address:
            state = replace(state, pending_sync=None)
        return state

    def touch(self, address: str, now: int, tip_index: int | None = None) -> "PeerState":
        """Refresh last_seen (and optionally the advertised tip) of a known peer."""
        info = self.peers.get(address)
        if info is None:
            return self
        new_tip = info.tip_index if tip_index is None else tip_index
        return self.with_peer(address, replace(info, last_seen_ms=now, tip_index=new_tip))


def new_peer_state(node_id: str) -> PeerState:
    return PeerState(node_id=node_id)
