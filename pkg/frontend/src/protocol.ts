// Frame and payload types for the node's websocket JSON protocol.
// The client never computes hashes or validity itself; every digest shown
// on screen arrives in one of these payloads.

export type RequestType =
  | "join"
  | "post"
  | "quiz_answer"
  | "action_event"
  | "try_nonce"
  | "get_feed"
  | "get_missions"
  | "get_leaderboard"
  | "get_block"
  | "get_tx"
  | "get_chain_summary"
  | "get_peers";

export type EventType =
  | "new_message"
  | "block_mined"
  | "mission_completed"
  | "level_up"
  | "leaderboard_changed"
  | "peers_changed";

export interface RequestFrame {
  req_id: number;
  type: RequestType;
  body: Record<string, unknown>;
}

export interface ServerFrame {
  req_id?: number;
  type: string;
  body: Record<string, unknown>;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  retry_after_ms?: number;
}

export interface ChatMessage {
  tx_id: string;
  nickname: string;
  text: string;
  timestamp: number;
  status: "pending" | "confirmed";
  block_index: number | null;
}

export interface MissionEntry {
  id: string;
  level: number;
  kind: "quiz" | "action";
  prompt: string;
  completed: boolean;
  locked: boolean;
  choices?: string[];
  action_event?: string;
}

export interface MiningTemplate {
  index: number;
  prev_hash: string;
  tx_root: string;
  timestamp: number;
  difficulty: number;
  nonce: number;
  miner_nick: string;
}

export interface TryNonceResult {
  nonce: number;
  digest: string;
  meets: boolean;
  difficulty: number;
  template: MiningTemplate;
}

export interface BlockSummary {
  index: number;
  hash: string;
  prev_hash: string;
  nonce: number;
  difficulty: number;
  tx_count: number;
  timestamp: number;
  miner_nick: string;
}

export interface TransactionView {
  id: string;
  kind: string;
  author: string;
  author_nick: string;
  ciphertext: string;
  plaintext: string;
  timestamp: number;
  signature: string;
  signature_valid: boolean;
  block_index: number | null;
}

export interface PeerRow {
  address: string;
  tip_index: number;
  last_seen_ms_ago: number;
}

export type Leaderboard = [string, number][];
