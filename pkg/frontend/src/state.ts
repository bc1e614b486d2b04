// Client state and the pure reducers that advance it.
//
// Everything on screen derives from server responses and events; the client
// holds no consensus logic and nothing survives a page reload. Reducers are
// idempotent: replaying a duplicated server event leaves the state unchanged.

import type {
  BlockSummary,
  ChatMessage,
  Leaderboard,
  MissionEntry,
  PeerRow,
  ServerFrame,
  TransactionView,
  TryNonceResult,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "retrying";

export type ExplorerTab = "chain" | "block" | "tx" | "peers";

export interface Session {
  token: string;
  nickname: string;
  level: number;
  classroom: string;
}

export interface MiningState {
  open: boolean;
  nonce: number;
  lastDigest: string | null;
  meets: boolean;
  difficulty: number;
  auto: boolean;
  found: boolean;
  guesses: number;
  templateSummary: string | null;
}

export interface ExplorerState {
  tab: ExplorerTab;
  chain: BlockSummary[] | null;
  block: { hash: string; header: Record<string, unknown>; transactions: TransactionView[] } | null;
  tx: TransactionView | null;
  peers: PeerRow[] | null;
}

export interface ClientState {
  connection: ConnectionStatus;
  session: Session | null;
  joinError: string | null;
  feed: ChatMessage[];
  packTitle: string;
  missions: MissionEntry[];
  focusedMissionId: string | null;
  leaderboard: Leaderboard;
  explorer: ExplorerState;
  mining: MiningState;
  toast: string | null;
  quizFeedback: { missionId: string; correct: boolean } | null;
}

export function initialState(): ClientState {
  return {
    connection: "connecting",
    session: null,
    joinError: null,
    feed: [],
    packTitle: "",
    missions: [],
    focusedMissionId: null,
    leaderboard: [],
    explorer: { tab: "chain", chain: null, block: null, tx: null, peers: null },
    mining: {
      open: false,
      nonce: 0,
      lastDigest: null,
      meets: false,
      difficulty: 8,
      auto: false,
      found: false,
      guesses: 0,
      templateSummary: null,
    },
    toast: null,
    quizFeedback: null,
  };
}

export function nextOpenMission(missions: MissionEntry[]): MissionEntry | null {
  return missions.find((m) => !m.completed && !m.locked) ?? null;
}

function upsertMessage(feed: ChatMessage[], message: ChatMessage): ChatMessage[] {
  const index = feed.findIndex((m) => m.tx_id === message.tx_id);
  if (index === -1) {
    return [...feed, message];
  }
  const existing = feed[index];
  // pending -> confirmed only; a stale duplicate never downgrades a message
  if (existing.status === "confirmed" && message.status === "pending") {
    return feed;
  }
  const copy = feed.slice();
  copy[index] = { ...existing, ...message };
  return copy;
}

export function applyEvent(state: ClientState, frame: ServerFrame): ClientState {
  const body = frame.body as Record<string, never>;
  switch (frame.type) {
    case "new_message":
      return { ...state, feed: upsertMessage(state.feed, body as unknown as ChatMessage) };
    case "block_mined": {
      const blockIndex = body["index"] as unknown as number;
      const txIds = new Set(body["tx_ids"] as unknown as string[]);
      let feed = state.feed.map((m) =>
        txIds.has(m.tx_id) ? { ...m, status: "confirmed" as const, block_index: blockIndex } : m,
      );
      for (const raw of (body["messages"] as unknown as ChatMessage[]) ?? []) {
        feed = upsertMessage(feed, raw);
      }
      return { ...state, feed, explorer: { ...state.explorer, chain: null } };
    }
    case "mission_completed": {
      const ids = new Set(body["mission_ids"] as unknown as string[]);
      const missions = state.missions.map((m) =>
        ids.has(m.id) ? { ...m, completed: true } : m,
      );
      const next = nextOpenMission(missions);
      return { ...state, missions, focusedMissionId: next ? next.id : null };
    }
    case "level_up": {
      const level = body["level"] as unknown as number;
      const session = state.session ? { ...state.session, level } : null;
      const missions = state.missions.map((m) =>
        m.level <= level ? { ...m, locked: false } : m,
      );
      const next = nextOpenMission(missions);
      return {
        ...state,
        session,
        missions,
        focusedMissionId: next ? next.id : state.focusedMissionId,
        toast: `level:${level}`,
      };
    }
    case "leaderboard_changed":
      return { ...state, leaderboard: body["leaderboard"] as unknown as Leaderboard };
    case "peers_changed":
      return {
        ...state,
        explorer: { ...state.explorer, peers: body["peers"] as unknown as PeerRow[] },
      };
    default:
      return state;
  }
}

export function applyResponse(
  state: ClientState,
  reqType: string,
  body: Record<string, unknown>,
): ClientState {
  switch (reqType) {
    case "join": {
      const session: Session = {
        token: body["token"] as string,
        nickname: body["nickname"] as string,
        level: body["level"] as number,
        classroom: body["classroom"] as string,
      };
      return { ...state, session, joinError: null };
    }
    case "post":
      return { ...state, feed: upsertMessage(state.feed, body as unknown as ChatMessage) };
    case "get_feed":
      return { ...state, feed: body["messages"] as ChatMessage[] };
    case "get_missions": {
      const missions = body["missions"] as unknown as MissionEntry[];
      const level = body["level"] as number;
      const session = state.session ? { ...state.session, level } : null;
      const focused =
        state.focusedMissionId && missions.some((m) => m.id === state.focusedMissionId)
          ? state.focusedMissionId
          : (nextOpenMission(missions)?.id ?? null);
      return {
        ...state,
        session,
        packTitle: body["title"] as string,
        missions,
        focusedMissionId: focused,
      };
    }
    case "get_leaderboard":
      return { ...state, leaderboard: body["leaderboard"] as unknown as Leaderboard };
    case "get_chain_summary":
      return {
        ...state,
        explorer: { ...state.explorer, tab: "chain", chain: body["blocks"] as BlockSummary[] },
      };
    case "get_block":
      return {
        ...state,
        explorer: {
          ...state.explorer,
          tab: "block",
          block: body as unknown as ExplorerState["block"],
        },
      };
    case "get_tx":
      return {
        ...state,
        explorer: { ...state.explorer, tab: "tx", tx: body as unknown as TransactionView },
      };
    case "get_peers":
      return {
        ...state,
        explorer: { ...state.explorer, tab: "peers", peers: body["peers"] as PeerRow[] },
      };
    case "quiz_answer": {
      const level = body["level"] as number;
      const session = state.session ? { ...state.session, level } : null;
      return { ...state, session };
    }
    case "try_nonce": {
      const result = body as unknown as TryNonceResult;
      return {
        ...state,
        mining: {
          ...state.mining,
          lastDigest: result.digest,
          meets: result.meets,
          difficulty: result.difficulty,
          found: state.mining.found || result.meets,
          auto: result.meets ? false : state.mining.auto,
          guesses: state.mining.guesses + 1,
          templateSummary:
            `#${result.template.index} <- ${result.template.prev_hash.slice(0, 12)}... ` +
            `by ${result.template.miner_nick}`,
        },
      };
    }
    default:
      return state;
  }
}

// The difficulty target rendered for students: 8 leading zero bits are two
// leading hex zeros of the digest.
export function hexZeroTarget(difficultyBits: number): number {
  return Math.ceil(difficultyBits / 4);
}

export function leadingZeroPrefix(digest: string): string {
  const match = digest.match(/^0*/);
  return match ? match[0] : "";
}
