"""LAN peer discovery, gossip and chain sync as a pure protocol state machine."""

from .messages import (
    DEFAULT_NODE_PORT,
    DISCOVERY_PORT,
    MsgType,
    PeerMessage,
    decode_beacon,
    decode_payload,
    encode_beacon,
    encode_frame,
)
from .protocol import (
    classroom_of,
    discovery_tick,
    genesis_hex,
    handle_beacon,
    handle_message,
    keepalive_tick,
    make_hello,
)
from .simulation import SimEvent, SimResult, Simulator
from .state import (
    BEACON_INTERVAL_MS,
    MAX_STRIKES,
    PEER_TIMEOUT_MS,
    SEEN_CACHE_CAPACITY,
    SYNC_PAGE_SIZE,
    FifoSet,
    PeerInfo,
    PeerState,
    SyncState,
    new_peer_state,
)

__all__ = [
    "BEACON_INTERVAL_MS",
    "DEFAULT_NODE_PORT",
    "DISCOVERY_PORT",
    "FifoSet",
    "MAX_STRIKES",
    "MsgType",
    "PEER_TIMEOUT_MS",
    "PeerInfo",
    "PeerMessage",
    "PeerState",
    "SEEN_CACHE_CAPACITY",
    "SYNC_PAGE_SIZE",
    "SimEvent",
    "SimResult",
    "Simulator",
    "SyncState",
    "classroom_of",
    "decode_beacon",
    "decode_payload",
    "discovery_tick",
    "encode_beacon",
    "encode_frame",
    "genesis_hex",
    "handle_beacon",
    "handle_message",
    "keepalive_tick",
    "make_hello",
    "new_peer_state",
]
