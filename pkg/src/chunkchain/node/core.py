"""The node's single-writer core.

One NodeCore owns every piece of mutable state (chain, peer table,
sessions, mission progress). All of its methods must be invoked from one
sequential context; the async runtime funnels websocket requests, peer
frames, beacons and timer ticks through a single processing loop. Because
the ledger and protocol states are immutable values, readers always observe
a consistent snapshot.

State transitions emit client events (new_message, block_mined,
mission_completed, level_up, leaderboard_changed, peers_changed) by diffing
the old state against the new one, so locally posted and gossiped data
produce identical event streams.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable

from .. import chat
from ..errors import ApiError
from ..ledger import (
    BlockHeader,
    ChainState,
    ClassroomCipher,
    compute_tx_root,
    drain_for_block,
    hash_header,
    mempool_add,
    new_chain,
    select_chain,
    sign_transaction,
    to_hex,
    try_nonce,
    from_hex,
    build_block,
)
from ..missions import (
    ActionEvent,
    MissionPack,
    Progress,
    answer_quiz,
    build_achievement_transaction,
    leaderboard,
    load_default_pack,
    load_mission_pack,
    record_event,
)
from ..p2p import (
    PeerMessage,
    PeerState,
    discovery_tick,
    handle_beacon,
    handle_message,
    keepalive_tick,
    make_hello,
    new_peer_state,
)
from ..p2p import messages as wire
from .config import NodeConfig, detect_lan_ip

MANUAL_MINING_DIFFICULTY = 8
MINE_ATTEMPT_BUDGET = 1 << 20

EXPLORER_REQUESTS = {"get_block", "get_tx", "get_chain_summary", "get_peers"}
CLIENT_EVENTS = {
    ActionEvent.VIEWED_TRANSACTION,
    ActionEvent.VIEWED_BLOCK,
    ActionEvent.VIEWED_PEERS,
}


@dataclass(frozen=True)
class Event:
    """A server push; ``token`` targets one session, None broadcasts."""

    name: str
    body: dict
    token: str | None = None


def _now_ms() -> int:
    return int(time.time() * 1000)


class NodeCore:
    def __init__(self, config: NodeConfig, clock: Callable[[], int] = _now_ms):
        self.config = config
        self.clock = clock
        self.node_id = f"{config.advertise_host or detect_lan_ip()}:{config.listen_tcp}"
        self.cipher = ClassroomCipher(config.classroom_name, config.classroom_passphrase)
        self.chain: ChainState = new_chain(config.classroom_name, config.difficulty)
        self.peers: PeerState = new_peer_state(self.node_id)
        self.sessions = chat.SessionRegistry()
        if config.mission_pack_path:
            with open(config.mission_pack_path, encoding="utf-8") as fh:
                self.pack: MissionPack = load_mission_pack(fh.read())
        else:
            self.pack = load_default_pack()
        self._mining_templates: dict[str, BlockHeader] = {}
        self._last_mine_ms: int | None = None
        self._events: list[Event] = []
        self._outbox: list[tuple[str, PeerMessage]] = []

    # -- plumbing ------------------------------------------------------------

    def drain_events(self) -> list[Event]:
        events, self._events = self._events, []
        return events

    def drain_outbox(self) -> list[tuple[str, PeerMessage]]:
        outbox, self._outbox = self._outbox, []
        return outbox

    def _emit(self, name: str, body: dict, token: str | None = None) -> None:
        self._events.append(Event(name, body, token))

    def _gossip(self, message_for: Callable[[str], PeerMessage]) -> None:
        for address in self.peers.peers:
            self._outbox.append((address, message_for(address)))

    def _apply(self, new_chain_state: ChainState, new_peer_state_: PeerState) -> None:
        """Swap in new states and emit events for everything that changed."""
        old_chain, old_peers = self.chain, self.peers
        self.chain, self.peers = new_chain_state, new_peer_state_

        if new_chain_state is not old_chain:
            added_pending = [
                new_chain_state.mempool[tx_id]
                for tx_id in sorted(set(new_chain_state.mempool) - set(old_chain.mempool))
            ]
            for tx in added_pending:
                view = chat.message_feed_entry(tx, self.cipher)
                if view is not None:
                    self._emit("new_message", view.to_json())

            if len(new_chain_state.blocks) != len(old_chain.blocks) or (
                new_chain_state.blocks and new_chain_state.blocks[-1] != old_chain.blocks[-1]
            ):
                common = 0
                for a, b in zip(old_chain.blocks, new_chain_state.blocks):
                    if a != b:
                        break
                    common += 1
                for block in new_chain_state.blocks[common:]:
                    messages = [
                        v.to_json()
                        for tx in block.transactions
                        if (v := chat.message_feed_entry(tx, self.cipher, block.header.index))
                    ]
                    self._emit(
                        "block_mined",
                        {
                            "index": block.header.index,
                            "hash": to_hex(hash_header(block.header)),
                            "miner_nick": block.header.miner_nick,
                            "tx_ids": [to_hex(tx.id) for tx in block.transactions],
                            "messages": messages,
                        },
                    )

            old_board = leaderboard(old_chain)
            new_board = leaderboard(new_chain_state)
            if new_board != old_board:
                self._emit("leaderboard_changed", {"leaderboard": new_board})

        if set(new_peer_state_.peers) != set(old_peers.peers):
            self._emit(
                "peers_changed", {"peers": chat.peer_table(new_peer_state_, self.clock())}
            )

    # -- peer-facing entry points ---------------------------------------------

    def handle_peer_message(self, msg: PeerMessage) -> None:
        chain, peers, outbound = handle_message(self.chain, self.peers, msg, self.clock())
        self._apply(chain, peers)
        self._outbox.extend(outbound)

    def handle_beacon_datagram(self, datagram: bytes) -> None:
        self._outbox.extend(handle_beacon(self.chain, self.peers, datagram))

    def hello_for(self, address: str) -> tuple[str, PeerMessage]:
        return address, make_hello(self.chain, self.peers)

    def on_keepalive_tick(self) -> None:
        peers, outbound = keepalive_tick(self.peers, self.clock())
        self._apply(self.chain, peers)
        self._outbox.extend(outbound)

    def on_discovery_tick(self) -> list[bytes]:
        if not self.config.discovery:
            return []
        peers, beacons = discovery_tick(
            self.peers, self.config.classroom_name, self.node_id, self.clock()
        )
        self.peers = peers
        return beacons

    def on_mine_tick(self) -> None:
        """Mine pending transactions once the configured interval elapsed."""
        interval = self.config.auto_mine_interval_ms
        if interval <= 0 or not self.chain.mempool:
            return
        now = self.clock()
        if self._last_mine_ms is not None and now - self._last_mine_ms < interval:
            return
        self._last_mine_ms = now
        drained, txs = drain_for_block(self.chain)
        block = build_block(
            prev=drained.tip,
            transactions=txs,
            timestamp=now,
            difficulty=self.config.difficulty,
            miner_nick=self.node_id,
            max_attempts=MINE_ATTEMPT_BUDGET,
        )
        if block is None:
            return  # retry with a fresh timestamp on the next tick
        adopted = select_chain(drained, [block])
        if adopted is drained:
            return
        peers = replace(
            self.peers, seen_block=self.peers.seen_block.add(hash_header(block.header))
        )
        self._apply(adopted, peers)
        self._gossip(lambda _addr: wire.block_gossip(self.node_id, block))

    # -- client API -------------------------------------------------------------

    def handle_request(self, token: str | None, req_type: str, body: dict) -> dict:
        handler = _REQUESTS.get(req_type)
        if handler is None:
            raise ApiError("malformed", f"unknown request type {req_type!r}")
        if req_type != "join":
            session = self.sessions.get(token or "")
            if req_type in EXPLORER_REQUESTS and session.level < 2:
                raise ApiError("locked", "reach level 2 to unlock the explorer")
            return handler(self, session, body)
        return handler(self, None, body)

    def _req_join(self, _session, body: dict) -> dict:
        session = self.sessions.join(str(body.get("nickname", "")))
        return {
            "token": session.token,
            "nickname": session.nickname,
            "level": session.level,
            "classroom": self.config.classroom_name,
        }

    def _req_post(self, session: chat.Session, body: dict) -> dict:
        text = body.get("text")
        if not isinstance(text, str):
            raise ApiError("malformed", "post needs a text field")
        tx = chat.build_chat_transaction(session, text, self.cipher, self.clock())
        chain = mempool_add(self.chain, tx)
        peers = replace(self.peers, seen_tx=self.peers.seen_tx.add(tx.id))
        self._apply(chain, peers)
        self._gossip(lambda _addr: wire.tx_gossip(self.node_id, tx))
        self._record_event(session, ActionEvent.POSTED_MESSAGE)
        view = chat.message_feed_entry(tx, self.cipher)
        return view.to_json() if view else {"tx_id": to_hex(tx.id)}

    def _req_quiz_answer(self, session: chat.Session, body: dict) -> dict:
        mission_id = body.get("mission_id")
        answer = body.get("answer_index")
        if not isinstance(mission_id, str) or not isinstance(answer, int):
            raise ApiError("malformed", "quiz_answer needs mission_id and answer_index")
        before = session.progress
        progress, outcome = answer_quiz(self.pack, before, mission_id, answer)
        session.progress = progress
        if progress.completed - before.completed:
            self._emit(
                "mission_completed",
                {"mission_ids": sorted(progress.completed - before.completed)},
                token=session.token,
            )
        self._after_progress_change(session, before)
        return {"outcome": outcome.value, "level": session.level}

    def _req_action_event(self, session: chat.Session, body: dict) -> dict:
        name = body.get("event")
        try:
            event = ActionEvent(name)
        except ValueError:
            raise ApiError("malformed", f"unknown action event {name!r}") from None
        if event not in CLIENT_EVENTS:
            raise ApiError(
                "restricted-event", f"{event.value} is reported by the node, not the client"
            )
        self._record_event(session, event)
        return {"level": session.level}

    def _req_try_nonce(self, session: chat.Session, body: dict) -> dict:
        nonce = body.get("nonce")
        if not isinstance(nonce, int) or nonce < 0:
            raise ApiError("malformed", "try_nonce needs a non-negative integer nonce")
        template = self._mining_templates.get(session.token)
        if template is None:
            template = self._manual_template(session)
            self._mining_templates[session.token] = template
        digest, meets = try_nonce(template, nonce)
        if meets:
            del self._mining_templates[session.token]
            self._record_event(session, ActionEvent.MANUAL_NONCE_FOUND)
        return {
            "nonce": nonce,
            "digest": to_hex(digest),
            "meets": meets,
            "difficulty": template.difficulty,
            "template": template.to_json(),
        }

    def _manual_template(self, session: chat.Session) -> BlockHeader:
        tip = self.chain.tip
        return BlockHeader(
            index=tip.header.index + 1,
            prev_hash=hash_header(tip.header),
            tx_root=compute_tx_root(()),
            timestamp=self.clock(),
            difficulty=MANUAL_MINING_DIFFICULTY,
            nonce=0,
            miner_nick=session.nickname,
        )

    def _req_get_feed(self, _session, _body) -> dict:
        return {"messages": [v.to_json() for v in chat.message_feed(self.chain, self.cipher)]}

    def _req_get_missions(self, session: chat.Session, _body) -> dict:
        missions = []
        for mission in self.pack.missions:
            entry = {
                "id": mission.id,
                "level": mission.level,
                "kind": mission.kind,
                "prompt": mission.prompt,
                "completed": mission.id in session.progress.completed,
                "locked": mission.level > session.level,
            }
            if mission.quiz is not None:
                entry["choices"] = list(mission.quiz.choices)
            if mission.action_event is not None:
                entry["action_event"] = mission.action_event.value
            missions.append(entry)
        return {"title": self.pack.title, "level": session.level, "missions": missions}

    def _req_get_leaderboard(self, _session, _body) -> dict:
        return {"leaderboard": leaderboard(self.chain)}

    def _req_get_block(self, session: chat.Session, body: dict) -> dict:
        index = body.get("index")
        if not isinstance(index, int):
            raise ApiError("malformed", "get_block needs an integer index")
        view = chat.get_block_view(self.chain, index, self.cipher)
        self._record_event(session, ActionEvent.VIEWED_BLOCK)
        return view

    def _req_get_tx(self, session: chat.Session, body: dict) -> dict:
        tx_id = body.get("tx_id")
        if not isinstance(tx_id, str):
            raise ApiError("malformed", "get_tx needs a tx_id hex string")
        try:
            raw = from_hex(tx_id, 32)
        except Exception:
            raise ApiError("malformed", "tx_id must be 64 hex characters") from None
        view = chat.get_transaction_view(self.chain, raw, self.cipher)
        self._record_event(session, ActionEvent.VIEWED_TRANSACTION)
        return view

    def _req_get_chain_summary(self, session: chat.Session, _body) -> dict:
        summary = chat.chain_summary(self.chain)
        self._record_event(session, ActionEvent.VIEWED_BLOCK)
        return {"blocks": summary}

    def _req_get_peers(self, session: chat.Session, _body) -> dict:
        table = chat.peer_table(self.peers, self.clock())
        self._record_event(session, ActionEvent.VIEWED_PEERS)
        return {"peers": table}

    # -- mission/levels plumbing ---------------------------------------------

    def _record_event(self, session: chat.Session, event: ActionEvent) -> None:
        before = session.progress
        progress, completed = record_event(self.pack, before, event)
        session.progress = progress
        if completed:
            self._emit("mission_completed", {"mission_ids": completed}, token=session.token)
        self._after_progress_change(session, before)

    def _after_progress_change(self, session: chat.Session, before: Progress) -> None:
        if session.progress.level <= before.level:
            return
        self._emit(
            "level_up",
            {"level": session.progress.level, "nickname": session.nickname},
            token=session.token,
        )
        achievement = build_achievement_transaction(
            session.keypair, session.nickname, session.progress.level, self.clock()
        )
        chain = mempool_add(self.chain, achievement)
        peers = replace(self.peers, seen_tx=self.peers.seen_tx.add(achievement.id))
        self._apply(chain, peers)
        self._gossip(lambda _addr: wire.tx_gossip(self.node_id, achievement))

    # -- status ----------------------------------------------------------------

    def status(self) -> dict:
        return {
            "classroom": self.config.classroom_name,
            "node_id": self.node_id,
            "tip_index": self.chain.tip_index,
            "tip_hash": to_hex(hash_header(self.chain.tip.header)),
            "peer_count": len(self.peers.peers),
            "session_count": len(self.sessions),
            "mempool_size": len(self.chain.mempool),
            "difficulty": self.config.difficulty,
        }


_REQUESTS = {
    "join": NodeCore._req_join,
    "post": NodeCore._req_post,
    "quiz_answer": NodeCore._req_quiz_answer,
    "action_event": NodeCore._req_action_event,
    "try_nonce": NodeCore._req_try_nonce,
    "get_feed": NodeCore._req_get_feed,
    "get_missions": NodeCore._req_get_missions,
    "get_leaderboard": NodeCore._req_get_leaderboard,
    "get_block": NodeCore._req_get_block,
    "get_tx": NodeCore._req_get_tx,
    "get_chain_summary": NodeCore._req_get_chain_summary,
    "get_peers": NodeCore._req_get_peers,
}
