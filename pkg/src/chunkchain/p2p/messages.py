"""Peer wire protocol: message types, JSON framing and the discovery beacon.

Node-to-node frames are a 4-byte big-endian length prefix followed by a
UTF-8 JSON object with "type", "sender_id" and "body"; binary values travel
as lowercase hex strings. Discovery beacons are single JSON datagrams.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from ..ledger import Block, EncodingError, Transaction

MAX_FRAME_BYTES = 16 * 1024 * 1024
DISCOVERY_PORT = 40123
DEFAULT_NODE_PORT = 40124


class MsgType(enum.Enum):
    HELLO = "HELLO"
    PEERS = "PEERS"
    TX_GOSSIP = "TX_GOSSIP"
    BLOCK_GOSSIP = "BLOCK_GOSSIP"
    CHAIN_REQUEST = "CHAIN_REQUEST"
    CHAIN_RESPONSE = "CHAIN_RESPONSE"
    PING = "PING"
    PONG = "PONG"


@dataclass(frozen=True)
class PeerMessage:
    type: MsgType
    sender_id: str
    body: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"type": self.type.value, "sender_id": self.sender_id, "body": self.body}

    @classmethod
    def from_json(cls, obj: dict) -> "PeerMessage":
        if not isinstance(obj, dict):
            raise EncodingError("message is not an object")
        try:
            msg_type = MsgType(obj["type"])
            sender = obj["sender_id"]
            body = obj["body"]
        except (KeyError, ValueError) as exc:
            raise EncodingError(f"malformed message envelope: {exc}") from exc
        if not isinstance(sender, str) or not isinstance(body, dict):
            raise EncodingError("malformed message envelope")
        return cls(msg_type, sender, body)


def encode_frame(msg: PeerMessage) -> bytes:
    payload = json.dumps(msg.to_json(), separators=(",", ":")).encode("utf-8")
    if len(payload) > MAX_FRAME_BYTES:
        raise EncodingError("frame too large")
    return len(payload).to_bytes(4, "big") + payload


def decode_payload(payload: bytes) -> PeerMessage:
    try:
        obj = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise EncodingError(f"bad frame payload: {exc}") from exc
    return PeerMessage.from_json(obj)


# Typed body constructors and parsers. Parsing raises EncodingError on any
# structural problem; the protocol counts those as strikes.

def hello(sender_id: str, classroom: str, genesis_hex: str, tip_index: int) -> PeerMessage:
    return PeerMessage(
        MsgType.HELLO,
        sender_id,
        {"classroom": classroom, "genesis": genesis_hex, "tip": tip_index},
    )


def parse_hello(body: dict) -> tuple[str, str, int]:
    try:
        classroom = body["classroom"]
        genesis = body["genesis"]
        tip = body["tip"]
    except KeyError as exc:
        raise EncodingError(f"hello body missing {exc}") from exc
    if not isinstance(classroom, str) or not isinstance(genesis, str) or not isinstance(tip, int):
        raise EncodingError("hello body has wrong field types")
    if tip < 0:
        raise EncodingError("hello tip must be non-negative")
    return classroom, genesis, tip


def peers_msg(sender_id: str, addresses: list[str]) -> PeerMessage:
    return PeerMessage(MsgType.PEERS, sender_id, {"addresses": addresses})


def parse_peers(body: dict) -> list[str]:
    addresses = body.get("addresses")
    if not isinstance(addresses, list) or not all(isinstance(a, str) for a in addresses):
        raise EncodingError("peers body must carry a list of addresses")
    return addresses


def tx_gossip(sender_id: str, tx: Transaction) -> PeerMessage:
    return PeerMessage(MsgType.TX_GOSSIP, sender_id, {"tx": tx.to_json()})


def parse_tx_gossip(body: dict) -> Transaction:
    obj = body.get("tx")
    if not isinstance(obj, dict):
        raise EncodingError("tx gossip body must carry a tx object")
    return Transaction.from_json(obj)


def block_gossip(sender_id: str, block: Block) -> PeerMessage:
    return PeerMessage(MsgType.BLOCK_GOSSIP, sender_id, {"block": block.to_json()})


def parse_block_gossip(body: dict) -> Block:
    obj = body.get("block")
    if not isinstance(obj, dict):
        raise EncodingError("block gossip body must carry a block object")
    return Block.from_json(obj)


def chain_request(sender_id: str, from_index: int, to_index: int) -> PeerMessage:
    return PeerMessage(
        MsgType.CHAIN_REQUEST, sender_id, {"from_index": from_index, "to_index": to_index}
    )


def parse_chain_request(body: dict) -> tuple[int, int]:
    try:
        lo = body["from_index"]
        hi = body["to_index"]
    except KeyError as exc:
        raise EncodingError(f"chain request missing {exc}") from exc
    if not isinstance(lo, int) or not isinstance(hi, int) or lo < 0 or hi < lo:
        raise EncodingError("chain request range invalid")
    return lo, hi


def chain_response(sender_id: str, blocks: list[Block]) -> PeerMessage:
    return PeerMessage(
        MsgType.CHAIN_RESPONSE, sender_id, {"blocks": [b.to_json() for b in blocks]}
    )


def parse_chain_response(body: dict) -> tuple[Block, ...]:
    objs = body.get("blocks")
    if not isinstance(objs, list):
        raise EncodingError("chain response body must carry a block list")
    return tuple(Block.from_json(o) for o in objs)


def ping(sender_id: str) -> PeerMessage:
    return PeerMessage(MsgType.PING, sender_id, {})


def pong(sender_id: str) -> PeerMessage:
    return PeerMessage(MsgType.PONG, sender_id, {})


def encode_beacon(classroom: str, address: str) -> bytes:
    return json.dumps({"classroom": classroom, "address": address}).encode("utf-8")


def decode_beacon(datagram: bytes) -> tuple[str, str]:
    try:
        obj = json.loads(datagram.decode("utf-8"))
        classroom = obj["classroom"]
        address = obj["address"]
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise EncodingError(f"bad beacon: {exc}") from exc
    if not isinstance(classroom, str) or not isinstance(address, str):
        raise EncodingError("bad beacon field types")
    return classroom, address
