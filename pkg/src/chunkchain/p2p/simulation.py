"""Deterministic event-driven simulator for the gossip protocol.

Scripted events (peering, transaction injection, mining) and every message
delivery run through one seeded event queue with a random-latency, optional
drop model, so a whole multi-node network run is reproducible bit for bit.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, replace

from ..ledger import (
    Block,
    ChainState,
    KeyPair,
    TxKind,
    build_block,
    drain_for_block,
    hash_header,
    mempool_add,
    new_chain,
    select_chain,
    sign_transaction,
    to_hex,
)
from . import messages as wire
from .protocol import handle_message, keepalive_tick, make_hello
from .state import PeerState, new_peer_state


@dataclass(frozen=True)
class SimEvent:
    """One scripted action: 'mesh' peering, 'inject' a tx, 'mine', or 'tick'."""

    at: int
    kind: str
    node: str | None = None
    text: str = ""
    allow_empty: bool = True


@dataclass
class SimResult:
    chains: dict[str, ChainState]
    peers: dict[str, PeerState]
    trace: list[tuple[int, str]]
    mined: list[Block]
    delivered: int = 0
    dropped: int = 0

    def tip_hexes(self) -> dict[str, str]:
        return {n: to_hex(hash_header(c.tip.header)) for n, c in self.chains.items()}

    def chains_identical(self) -> bool:
        encoded = {tuple(b.encode() for b in c.blocks) for c in self.chains.values()}
        return len(encoded) == 1

    def abandoned_blocks(self) -> list[Block]:
        """Blocks that were mined but did not make the final canonical chain."""
        any_chain = next(iter(self.chains.values()))
        final = {hash_header(b.header) for b in any_chain.blocks}
        return [b for b in self.mined if hash_header(b.header) not in final]


@dataclass
class _Node:
    chain: ChainState
    peers: PeerState
    keypair: KeyPair


class Simulator:
    """A closed network of protocol nodes with seeded latency and loss."""

    def __init__(
        self,
        n_nodes: int,
        classroom: str = "sim",
        difficulty: int = 4,
        seed: int = 0,
        latency_ms: tuple[int, int] = (5, 50),
        drop_rate: float = 0.0,
    ):
        if n_nodes < 1:
            raise ValueError("need at least one node")
        self._rng = random.Random(seed)
        self._latency = latency_ms
        self._drop = drop_rate
        self.nodes: dict[str, _Node] = {}
        for i in range(n_nodes):
            node_id = f"n{i}"
            self.nodes[node_id] = _Node(
                chain=new_chain(classroom, difficulty),
                peers=new_peer_state(node_id),
                # Seed-derived identities keep whole runs bit-reproducible.
                keypair=KeyPair.from_seed(f"sim/{seed}/{node_id}".encode()),
            )
        self._queue: list[tuple[int, int, object]] = []
        self._seq = 0
        self._trace: list[tuple[int, str]] = []
        self._mined: list[Block] = []
        self._delivered = 0
        self._dropped = 0

    def run(self, schedule: list[SimEvent]) -> SimResult:
        for event in schedule:
            if event.node is not None and event.node not in self.nodes:
                raise ValueError(f"schedule references unknown node {event.node!r}")
            self._push(event.at, ("script", event))
        while self._queue:
            now, _, item = heapq.heappop(self._queue)
            tag, payload = item
            if tag == "script":
                self._run_script(payload, now)
            else:
                to, msg = payload
                self._deliver(to, msg, now)
        return SimResult(
            chains={n: node.chain for n, node in self.nodes.items()},
            peers={n: node.peers for n, node in self.nodes.items()},
            trace=self._trace,
            mined=self._mined,
            delivered=self._delivered,
            dropped=self._dropped,
        )

    # -- event execution ---------------------------------------------------

    def _run_script(self, event: SimEvent, now: int) -> None:
        if event.kind == "mesh":
            for sender_id, sender in self.nodes.items():
                hello = make_hello(sender.chain, sender.peers)
                for other in self.nodes:
                    if other != sender_id:
                        self._send(sender_id, other, hello, now)
        elif event.kind == "inject":
            self._inject(event.node, event.text, now)
        elif event.kind == "mine":
            self._mine(event.node, now, event.allow_empty)
        elif event.kind == "tick":
            for node_id, node in self.nodes.items():
                node.peers, outbound = keepalive_tick(node.peers, now)
                self._dispatch(node_id, outbound, now)
        else:
            raise ValueError(f"unknown scripted event kind {event.kind!r}")

    def _inject(self, node_id: str, text: str, now: int) -> None:
        node = self.nodes[node_id]
        tx = sign_transaction(
            node.keypair, TxKind.CHAT, node_id, text.encode("utf-8"), now
        )
        node.chain = mempool_add(node.chain, tx)
        node.peers = replace(node.peers, seen_tx=node.peers.seen_tx.add(tx.id))
        self._trace.append((now, f"{node_id} injects tx {to_hex(tx.id)[:12]}"))
        gossip = wire.tx_gossip(node_id, tx)
        self._dispatch(node_id, [(a, gossip) for a in node.peers.peers], now)

    def _mine(self, node_id: str, now: int, allow_empty: bool) -> None:
        node = self.nodes[node_id]
        drained_state, txs = drain_for_block(node.chain)
        if not txs and not allow_empty:
            return
        block = build_block(
            prev=drained_state.tip,
            transactions=txs,
            timestamp=now,
            difficulty=drained_state.difficulty,
            miner_nick=node_id,
        )
        if block is None:
            self._trace.append((now, f"{node_id} mining exhausted"))
            return
        adopted = select_chain(drained_state, [block])
        if adopted is drained_state:
            return
        node.chain = adopted
        node.peers = replace(
            node.peers, seen_block=node.peers.seen_block.add(hash_header(block.header))
        )
        self._mined.append(block)
        self._trace.append(
            (now, f"{node_id} mines block {block.header.index} ({len(txs)} tx)")
        )
        gossip = wire.block_gossip(node_id, block)
        self._dispatch(node_id, [(a, gossip) for a in node.peers.peers], now)

    def _deliver(self, to: str, msg: wire.PeerMessage, now: int) -> None:
        node = self.nodes.get(to)
        if node is None:
            return
        self._delivered += 1
        node.chain, node.peers, outbound = handle_message(node.chain, node.peers, msg, now)
        self._trace.append((now, f"{to} <- {msg.type.value} from {msg.sender_id}"))
        self._dispatch(to, outbound, now)

    def _dispatch(self, sender: str, outbound, now: int) -> None:
        for to, msg in outbound:
            self._send(sender, to, msg, now)

    def _send(self, sender: str, to: str, msg: wire.PeerMessage, now: int) -> None:
        if self._drop > 0.0 and self._rng.random() < self._drop:
            self._dropped += 1
            self._trace.append((now, f"{sender} -> {to} {msg.type.value} dropped"))
            return
        latency = self._rng.randint(*self._latency)
        self._push(now + latency, ("deliver", (to, msg)))

    def _push(self, at: int, item: object) -> None:
        self._seq += 1
        heapq.heappush(self._queue, (at, self._seq, item))
