"""Async runtime: one writer loop plus transports around a NodeCore.

Network IO and timers run concurrently, but every state transition is a
callable executed by the single writer task, which then flushes outbound
peer frames and client events. That loop is the serialization point the
rest of the codebase assumes.

Nothing here touches the filesystem; logs go to stderr and all state dies
with the process.
"""

from __future__ import annotations

import asyncio
import logging
import socket
from dataclasses import dataclass, field
from typing import Awaitable, Callable

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from ..errors import ApiError
from ..p2p import (
    DISCOVERY_PORT,
    PeerMessage,
    decode_payload,
    encode_frame,
)
from ..p2p.messages import MAX_FRAME_BYTES
from .config import NodeConfig
from .core import Event, NodeCore

logger = logging.getLogger("chunkchain.node")

TIMER_STEP_S = 0.25
SLOW_TICK_EVERY = 20  # keepalive/discovery cadence: 20 * 0.25s = 5s

_PLACEHOLDER_PAGE = """<!doctype html>
<html><head><title>chunkchain node</title></head>
<body style="font-family: sans-serif; max-width: 40em; margin: 4em auto;">
<h1>chunkchain node is running</h1>
<p>No UI bundle is configured. Point the node at a built frontend with
<code>--ui-path</code>, or talk to the websocket API at <code>/ws</code>.</p>
</body></html>
"""


@dataclass(eq=False)
class _Subscriber:
    queue: asyncio.Queue = field(default_factory=asyncio.Queue)
    token: str | None = None


class NodeRuntime:
    """Owns the writer loop, transports and client event fan-out."""

    def __init__(self, core: NodeCore):
        self.core = core
        self._work: asyncio.Queue = asyncio.Queue()
        self._sendq: asyncio.Queue = asyncio.Queue()
        self._subscribers: set[_Subscriber] = set()
        self._conns: dict[str, asyncio.StreamWriter] = {}
        self._tasks: list[asyncio.Task] = []
        self._writer_task: asyncio.Task | None = None
        self._tcp_server: asyncio.AbstractServer | None = None
        self._udp_transport: asyncio.DatagramTransport | None = None
        self._stopped = asyncio.Event()

    # -- the single-writer entry point ---------------------------------------

    def _ensure_writer(self) -> None:
        # Lazily bind the writer task to whichever loop first submits work.
        if self._writer_task is None or self._writer_task.done():
            self._writer_task = asyncio.get_running_loop().create_task(self._writer_loop())
            self._tasks.append(self._writer_task)

    async def submit(self, fn: Callable[[NodeCore], object]):
        self._ensure_writer()
        fut: asyncio.Future = asyncio.get_running_loop().create_future()
        await self._work.put((fn, fut))
        return await fut

    def submit_nowait(self, fn: Callable[[NodeCore], object]) -> None:
        self._ensure_writer()
        self._work.put_nowait((fn, None))

    async def _writer_loop(self) -> None:
        while True:
            fn, fut = await self._work.get()
            try:
                result = fn(self.core)
            except ApiError as exc:
                if fut is not None and not fut.cancelled():
                    fut.set_exception(exc)
            except Exception as exc:
                logger.exception("state transition failed")
                if fut is not None and not fut.cancelled():
                    fut.set_exception(exc)
            else:
                if fut is not None and not fut.cancelled():
                    fut.set_result(result)
            finally:
                self._flush()

    def _flush(self) -> None:
        for address, msg in self.core.drain_outbox():
            self._sendq.put_nowait((address, msg))
        for event in self.core.drain_events():
            self._publish(event)

    def _publish(self, event: Event) -> None:
        frame = {"type": event.name, "body": event.body}
        for sub in self._subscribers:
            if event.token is None or sub.token == event.token:
                sub.queue.put_nowait(frame)

    # -- peer transport --------------------------------------------------------

    async def start_p2p(self) -> None:
        config = self.core.config
        self._ensure_writer()
        self._tasks.append(asyncio.create_task(self._sender_loop()))
        self._tcp_server = await asyncio.start_server(
            self._on_peer_connection, config.bind_host, config.listen_tcp
        )
        if config.discovery:
            await self._open_discovery()
        self._tasks.append(asyncio.create_task(self._timer_loop()))
        for address in config.static_peers:
            self._sendq.put_nowait(self.core.hello_for(address))
        await self._slow_tick()

    async def _on_peer_connection(
        self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter
    ) -> None:
        try:
            while True:
                header = await reader.readexactly(4)
                length = int.from_bytes(header, "big")
                if length > MAX_FRAME_BYTES:
                    break
                payload = await reader.readexactly(length)
                try:
                    msg = decode_payload(payload)
                except Exception:
                    continue  # unattributable garbage, drop the frame
                self.submit_nowait(lambda core, m=msg: core.handle_peer_message(m))
        except (asyncio.IncompleteReadError, ConnectionError, OSError):
            pass
        finally:
            writer.close()

    async def _sender_loop(self) -> None:
        while True:
            address, msg = await self._sendq.get()
            await self._send_frame(address, msg)

    async def _send_frame(self, address: str, msg: PeerMessage) -> None:
        writer = self._conns.get(address)
        if writer is None or writer.is_closing():
            host, _, port = address.rpartition(":")
            try:
                _, writer = await asyncio.open_connection(host, int(port))
            except (OSError, ValueError):
                return  # unreachable peer; eviction will clean it up
            self._conns[address] = writer
        try:
            writer.write(encode_frame(msg))
            await writer.drain()
        except (ConnectionError, OSError):
            self._conns.pop(address, None)

    async def _open_discovery(self) -> None:
        config = self.core.config
        sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        if hasattr(socket, "SO_REUSEPORT"):
            sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEPORT, 1)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_BROADCAST, 1)
        sock.bind((config.bind_host if config.bind_host != "0.0.0.0" else "", DISCOVERY_PORT))
        loop = asyncio.get_running_loop()
        transport, _ = await loop.create_datagram_endpoint(
            lambda: _DiscoveryProtocol(self), sock=sock
        )
        self._udp_transport = transport

    def _broadcast_beacons(self, beacons: list[bytes]) -> None:
        if self._udp_transport is None:
            return
        for beacon in beacons:
            try:
                self._udp_transport.sendto(beacon, ("255.255.255.255", DISCOVERY_PORT))
            except OSError:
                pass

    async def _timer_loop(self) -> None:
        step = 0
        while True:
            await asyncio.sleep(TIMER_STEP_S)
            step += 1
            self.submit_nowait(lambda core: core.on_mine_tick())
            if step % SLOW_TICK_EVERY == 0:
                await self._slow_tick()

    async def _slow_tick(self) -> None:
        self.submit_nowait(lambda core: core.on_keepalive_tick())
        beacons = await self.submit(lambda core: core.on_discovery_tick())
        self._broadcast_beacons(beacons)
        # re-greet static peers that have not answered yet
        known = set(self.core.peers.peers)
        for address in self.core.config.static_peers:
            if address not in known:
                self._sendq.put_nowait(self.core.hello_for(address))

    # -- client subscriptions ----------------------------------------------------

    def add_subscriber(self) -> _Subscriber:
        sub = _Subscriber()
        self._subscribers.add(sub)
        return sub

    def remove_subscriber(self, sub: _Subscriber) -> None:
        self._subscribers.discard(sub)

    # -- shutdown ----------------------------------------------------------------

    async def stop(self) -> None:
        for task in self._tasks:
            task.cancel()
        for task in self._tasks:
            try:
                await task
            except (asyncio.CancelledError, Exception):
                pass
        self._tasks.clear()
        if self._tcp_server is not None:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
        if self._udp_transport is not None:
            self._udp_transport.close()
        for writer in self._conns.values():
            writer.close()
        self._conns.clear()
        self._stopped.set()


def build_app(runtime: NodeRuntime) -> FastAPI:
    """The client-facing HTTP/WebSocket application."""
    app = FastAPI(title="chunkchain node", docs_url=None, redoc_url=None)

    @app.get("/healthz")
    async def healthz() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.get("/status")
    async def status() -> JSONResponse:
        return JSONResponse(await runtime.submit(lambda core: core.status()))

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket) -> None:
        await websocket.accept()
        sub = runtime.add_subscriber()
        pump = asyncio.create_task(_pump_frames(websocket, sub.queue))
        try:
            while True:
                frame = await websocket.receive_json()
                await _handle_client_frame(runtime, sub, frame)
        except WebSocketDisconnect:
            pass
        finally:
            runtime.remove_subscriber(sub)
            pump.cancel()

    ui_path = runtime.core.config.serve_ui_path
    if ui_path:
        app.mount("/", StaticFiles(directory=ui_path, html=True), name="ui")
    else:

        @app.get("/")
        async def index() -> HTMLResponse:
            return HTMLResponse(_PLACEHOLDER_PAGE)

    return app


async def _pump_frames(websocket: WebSocket, queue: asyncio.Queue) -> None:
    while True:
        frame = await queue.get()
        await websocket.send_json(frame)


async def _handle_client_frame(runtime: NodeRuntime, sub: _Subscriber, frame) -> None:
    if not isinstance(frame, dict):
        sub.queue.put_nowait(
            {"type": "error", "body": {"code": "malformed", "message": "frame must be an object"}}
        )
        return
    req_id = frame.get("req_id")
    req_type = frame.get("type")
    body = frame.get("body")
    if not isinstance(req_type, str) or not isinstance(body, (dict, type(None))):
        sub.queue.put_nowait(
            {
                "req_id": req_id,
                "type": "error",
                "body": {"code": "malformed", "message": "frame needs type and body"},
            }
        )
        return
    body = dict(body or {})
    token = body.pop("token", None)
    try:
        result = await runtime.submit(
            lambda core: core.handle_request(token, req_type, body)
        )
    except ApiError as exc:
        sub.queue.put_nowait({"req_id": req_id, "type": "error", "body": exc.to_json()})
        return
    except Exception:
        logger.exception("request failed")
        sub.queue.put_nowait(
            {
                "req_id": req_id,
                "type": "error",
                "body": {"code": "internal", "message": "internal error"},
            }
        )
        return
    if req_type == "join":
        sub.token = result["token"]
    elif isinstance(token, str):
        sub.token = token
    sub.queue.put_nowait({"req_id": req_id, "type": req_type, "body": result})


class _DiscoveryProtocol(asyncio.DatagramProtocol):
    def __init__(self, runtime: NodeRuntime):
        self._runtime = runtime

    def datagram_received(self, data: bytes, addr) -> None:
        self._runtime.submit_nowait(lambda core, d=data: core.handle_beacon_datagram(d))


async def run_node(config: NodeConfig) -> int:
    """Run a full node until interrupted. Returns the process exit code."""
    import uvicorn

    logging.basicConfig(level=config.log_level.upper())
    core = NodeCore(config)
    runtime = NodeRuntime(core)
    try:
        await runtime.start_p2p()
    except OSError as exc:
        print(
            f"cannot listen on {config.bind_host}:{config.listen_tcp} "
            f"or UDP {DISCOVERY_PORT}: {exc}. Is another node running? "
            "Pick a different --tcp-port or stop the other process."
        )
        return 1

    app = build_app(runtime)
    server = uvicorn.Server(
        uvicorn.Config(
            app,
            host=config.bind_host,
            port=config.client_api,
            log_level=config.log_level,
            lifespan="off",
            access_log=False,
        )
    )
    print(
        f"classroom {config.classroom_name!r}: client API on "
        f"http://{config.bind_host}:{config.client_api}, peers on "
        f"tcp/{config.listen_tcp}, discovery {'on' if config.discovery else 'off'}"
    )
    try:
        await server.serve()
    except OSError as exc:
        print(
            f"cannot serve the client API on port {config.client_api}: {exc}. "
            "Pick a different --api-port."
        )
        return 1
    finally:
        await runtime.stop()
    return 0
