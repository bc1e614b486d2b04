// WebSocket client: request/response matching by req_id, server-push
// delivery, and automatic reconnection with a visible retry state.

import type { ApiErrorBody, RequestType, ServerFrame } from "./protocol.js";

export class ApiError extends Error {
  readonly code: string;
  readonly retryAfterMs?: number;

  constructor(body: ApiErrorBody) {
    super(body.message);
    this.code = body.code;
    this.retryAfterMs = body.retry_after_ms;
  }
}

export type SocketFactory = (url: string) => WebSocket;

export interface ConnectionHandlers {
  onEvent: (frame: ServerFrame) => void;
  onStatus: (status: "connecting" | "open" | "retrying") => void;
}

const RETRY_DELAY_MS = 2000;

export class NodeConnection {
  private ws: WebSocket | null = null;
  private nextId = 1;
  private pending = new Map<number, { resolve: (v: never) => void; reject: (e: Error) => void }>();
  private closed = false;

  constructor(
    private readonly url: string,
    private readonly handlers: ConnectionHandlers,
    private readonly factory: SocketFactory = (u) => new WebSocket(u),
  ) {}

  connect(): void {
    this.handlers.onStatus(this.ws === null ? "connecting" : "retrying");
    const ws = this.factory(this.url);
    this.ws = ws;
    ws.onopen = () => this.handlers.onStatus("open");
    ws.onmessage = (event) => this.receive(String(event.data));
    ws.onclose = () => this.scheduleRetry();
    ws.onerror = () => {
      // onclose follows and owns the retry
    };
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }

  private scheduleRetry(): void {
    if (this.closed) {
      return;
    }
    for (const waiter of this.pending.values()) {
      waiter.reject(new ApiError({ code: "disconnected", message: "connection lost" }));
    }
    this.pending.clear();
    this.handlers.onStatus("retrying");
    setTimeout(() => {
      if (!this.closed) {
        this.connect();
      }
    }, RETRY_DELAY_MS);
  }

  private receive(raw: string): void {
    let frame: ServerFrame;
    try {
      frame = JSON.parse(raw) as ServerFrame;
    } catch {
      return;
    }
    if (frame.req_id !== undefined && this.pending.has(frame.req_id)) {
      const waiter = this.pending.get(frame.req_id)!;
      this.pending.delete(frame.req_id);
      if (frame.type === "error") {
        waiter.reject(new ApiError(frame.body as unknown as ApiErrorBody));
      } else {
        waiter.resolve(frame.body as never);
      }
      return;
    }
    this.handlers.onEvent(frame);
  }

  request<T = Record<string, unknown>>(
    type: RequestType,
    body: Record<string, unknown>,
  ): Promise<T> {
    const ws = this.ws;
    if (ws === null || ws.readyState !== ws.OPEN) {
      return Promise.reject(new ApiError({ code: "disconnected", message: "not connected" }));
    }
    const reqId = this.nextId++;
    const frame = { req_id: reqId, type, body };
    return new Promise<T>((resolve, reject) => {
      this.pending.set(reqId, { resolve: resolve as (v: never) => void, reject });
      ws.send(JSON.stringify(frame));
    });
  }
}
