// App bootstrap: one store, one socket, re-render on every change.
// Session and state live only in this module's closure; the page never
// touches cookies or storage APIs, so closing the tab erases everything.

import { MiningController } from "./mining.js";
import type { ServerFrame, TryNonceResult } from "./protocol.js";
import { ApiError, NodeConnection, type SocketFactory } from "./socket.js";
import {
  applyEvent,
  applyResponse,
  initialState,
  type ClientState,
  type ExplorerTab,
} from "./state.js";
import { getLang, setLang } from "./strings.js";
import { render, type Handlers } from "./views.js";

const TOAST_MS = 4000;

export function startApp(
  root: HTMLElement,
  wsUrl: string,
  socketFactory?: SocketFactory,
): { getState: () => ClientState; connection: NodeConnection } {
  let state = initialState();
  let toastTimer: ReturnType<typeof setTimeout> | null = null;

  const update = (next: ClientState) => {
    const toastAppeared = next.toast !== null && next.toast !== state.toast;
    state = next;
    render(root, state, handlers);
    if (toastAppeared) {
      if (toastTimer !== null) {
        clearTimeout(toastTimer);
      }
      toastTimer = setTimeout(() => update({ ...state, toast: null }), TOAST_MS);
    }
  };

  const connection = new NodeConnection(
    wsUrl,
    {
      onEvent: (frame: ServerFrame) => {
        const before = state;
        let next = applyEvent(state, frame);
        if (frame.type === "level_up" && before.session) {
          // Unlocked panels need fresh mission/leaderboard data.
          void refresh();
        }
        update(next);
      },
      onStatus: (status) => update({ ...state, connection: status }),
    },
    socketFactory,
  );

  const token = () => state.session?.token ?? "";

  async function call(type: Parameters<NodeConnection["request"]>[0], body: Record<string, unknown>) {
    const response = await connection.request(type, { ...body, token: token() });
    update(applyResponse(state, type, response as Record<string, unknown>));
    return response as Record<string, unknown>;
  }

  async function refresh(): Promise<void> {
    try {
      await call("get_missions", {});
      await call("get_feed", {});
      await call("get_leaderboard", {});
    } catch {
      // connection flaps are surfaced by the status banner
    }
  }

  const miner = new MiningController(
    async (nonce: number) => {
      const body = await connection.request("try_nonce", { nonce, token: token() });
      return body as unknown as TryNonceResult;
    },
    (result) => {
      update({
        ...applyResponse(state, "try_nonce", result as unknown as Record<string, unknown>),
        mining: {
          ...applyResponse(state, "try_nonce", result as unknown as Record<string, unknown>).mining,
          open: state.mining.open,
          nonce: miner.nonce,
        },
      });
    },
    () => update({ ...state, mining: { ...state.mining, auto: false } }),
  );

  const handlers: Handlers = {
    join(nickname: string) {
      connection
        .request("join", { nickname })
        .then(async (body) => {
          update(applyResponse(state, "join", body as Record<string, unknown>));
          await refresh();
        })
        .catch((error: unknown) => {
          const message = error instanceof ApiError ? error.message : String(error);
          update({ ...state, joinError: message });
        });
    },
    post(text: string) {
      void call("post", { text }).catch(() => undefined);
    },
    answerQuiz(missionId: string, answerIndex: number) {
      connection
        .request("quiz_answer", {
          mission_id: missionId,
          answer_index: answerIndex,
          token: token(),
        })
        .then((body) => {
          const outcome = (body as Record<string, unknown>)["outcome"] as string;
          let next = applyResponse(state, "quiz_answer", body as Record<string, unknown>);
          next = {
            ...next,
            quizFeedback: { missionId, correct: outcome === "correct" },
          };
          update(next);
          void refresh();
        })
        .catch(() => undefined);
    },
    focusMission(missionId: string) {
      update({ ...state, focusedMissionId: missionId, quizFeedback: null });
    },
    openExplorer(tab: ExplorerTab) {
      if ((state.session?.level ?? 1) < 2) {
        return; // locked: the panel shows the hint, no request is sent
      }
      if (tab === "chain") {
        void call("get_chain_summary", {}).catch(() => undefined);
      } else if (tab === "peers") {
        void call("get_peers", {}).catch(() => undefined);
      } else {
        update({ ...state, explorer: { ...state.explorer, tab } });
      }
    },
    openBlock(index: number) {
      void call("get_block", { index }).catch(() => undefined);
    },
    openTx(txId: string) {
      if ((state.session?.level ?? 1) < 2) {
        return;
      }
      void call("get_tx", { tx_id: txId }).catch(() => undefined);
    },
    openMining() {
      update({ ...state, mining: { ...state.mining, open: true } });
    },
    closeMining() {
      miner.stopAuto();
      update({ ...state, mining: { ...state.mining, open: false } });
    },
    guessOnce() {
      void miner.guessOnce();
    },
    toggleAuto() {
      if (miner.autoRunning) {
        miner.stopAuto();
      } else {
        miner.startAuto();
        update({ ...state, mining: { ...state.mining, auto: true } });
      }
    },
    toggleLang() {
      setLang(getLang() === "en" ? "de" : "en");
      update({ ...state });
    },
  };

  render(root, state, handlers);
  connection.connect();
  return { getState: () => state, connection };
}

declare global {
  interface Window {
    __chunkchainTest?: boolean;
  }
}

if (typeof window !== "undefined" && !window.__chunkchainTest) {
  const root = document.getElementById("app");
  if (root) {
    const proto = location.protocol === "https:" ? "wss" : "ws";
    startApp(root, `${proto}://${location.host}/ws`);
  }
}
