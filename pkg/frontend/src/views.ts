// DOM rendering. The whole app re-renders from ClientState on every change;
// user-supplied text always goes through textContent, never markup.

import type { ClientState, ExplorerTab } from "./state.js";
import { hexZeroTarget, leadingZeroPrefix } from "./state.js";
import type { MissionEntry } from "./protocol.js";
import { t } from "./strings.js";

export interface Handlers {
  join(nickname: string): void;
  post(text: string): void;
  answerQuiz(missionId: string, answerIndex: number): void;
  focusMission(missionId: string): void;
  openExplorer(tab: ExplorerTab): void;
  openBlock(index: number): void;
  openTx(txId: string): void;
  openMining(): void;
  closeMining(): void;
  guessOnce(): void;
  toggleAuto(): void;
  toggleLang(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function render(root: HTMLElement, state: ClientState, handlers: Handlers): void {
  root.textContent = "";
  root.appendChild(header(state, handlers));
  if (state.connection === "retrying") {
    root.appendChild(el("div", "banner retry", t("connectionRetrying")));
  }
  if (state.session === null) {
    root.appendChild(joinScreen(state, handlers));
    return;
  }
  const main = el("main", "layout");
  main.appendChild(missionSidebar(state, handlers));
  main.appendChild(chatPanel(state, handlers));
  main.appendChild(rightColumn(state, handlers));
  root.appendChild(main);
  if (state.mining.open) {
    root.appendChild(miningModal(state, handlers));
  }
  if (state.toast !== null) {
    const level = state.toast.startsWith("level:") ? state.toast.slice(6) : state.toast;
    root.appendChild(el("div", "toast", `${t("levelUpToast")} ${level}!`));
  }
}

function header(state: ClientState, handlers: Handlers): HTMLElement {
  const head = el("header", "topbar");
  head.appendChild(el("h1", "", t("appTitle")));
  if (state.session) {
    const who = el("span", "whoami");
    who.textContent =
      `${state.session.nickname} @ ${state.session.classroom} ` +
      `(${t("levelLabel")} ${state.session.level})`;
    head.appendChild(who);
  }
  const lang = el("button", "lang", t("langSwitch"));
  lang.onclick = () => handlers.toggleLang();
  head.appendChild(lang);
  return head;
}

function joinScreen(state: ClientState, handlers: Handlers): HTMLElement {
  const panel = el("section", "join");
  panel.appendChild(el("h2", "", t("joinHeading")));
  const input = el("input", "nickname");
  input.maxLength = 24;
  input.placeholder = "nickname";
  const button = el("button", "primary", t("joinButton"));
  button.onclick = () => handlers.join(input.value);
  input.onkeydown = (event) => {
    if (event.key === "Enter") {
      handlers.join(input.value);
    }
  };
  panel.appendChild(input);
  panel.appendChild(button);
  if (state.joinError) {
    panel.appendChild(el("p", "error", state.joinError));
  }
  panel.appendChild(el("p", "hint", t("joinHint")));
  return panel;
}

function missionSidebar(state: ClientState, handlers: Handlers): HTMLElement {
  const aside = el("aside", "missions");
  aside.appendChild(el("h2", "", t("missionsHeading")));
  if (state.packTitle) {
    aside.appendChild(el("p", "pack-title", state.packTitle));
  }
  for (const mission of state.missions) {
    aside.appendChild(missionCard(mission, state, handlers));
  }
  return aside;
}

function missionCard(
  mission: MissionEntry,
  state: ClientState,
  handlers: Handlers,
): HTMLElement {
  const classes = ["mission"];
  if (mission.completed) {
    classes.push("done");
  }
  if (mission.locked) {
    classes.push("locked");
  }
  if (state.focusedMissionId === mission.id) {
    classes.push("focused");
  }
  const card = el("div", classes.join(" "));
  card.dataset["missionId"] = mission.id;
  const title = el("div", "mission-title");
  title.appendChild(el("span", "status", mission.completed ? "✓" : mission.locked ? "🔒" : "•"));
  title.appendChild(el("span", "prompt", mission.prompt));
  card.appendChild(title);
  if (mission.locked) {
    card.appendChild(el("p", "hint", `${t("lockedMission")} ${mission.level}`));
    return card;
  }
  card.onclick = () => handlers.focusMission(mission.id);
  if (
    mission.kind === "quiz" &&
    !mission.completed &&
    state.focusedMissionId === mission.id &&
    mission.choices
  ) {
    const list = el("div", "choices");
    mission.choices.forEach((choice, index) => {
      const button = el("button", "choice", choice);
      button.onclick = (event) => {
        event.stopPropagation();
        handlers.answerQuiz(mission.id, index);
      };
      list.appendChild(button);
    });
    card.appendChild(list);
    if (state.quizFeedback && state.quizFeedback.missionId === mission.id) {
      card.appendChild(
        el(
          "p",
          state.quizFeedback.correct ? "feedback good" : "feedback bad",
          state.quizFeedback.correct ? t("quizCorrect") : t("quizIncorrect"),
        ),
      );
    }
  }
  if (
    mission.kind === "action" &&
    mission.action_event === "manual_nonce_found" &&
    !mission.completed &&
    state.focusedMissionId === mission.id
  ) {
    const open = el("button", "primary", t("miningHeading"));
    open.onclick = (event) => {
      event.stopPropagation();
      handlers.openMining();
    };
    card.appendChild(open);
  }
  return card;
}

function chatPanel(state: ClientState, handlers: Handlers): HTMLElement {
  const section = el("section", "chat");
  section.appendChild(el("h2", "", t("chatHeading")));
  const feed = el("div", "feed");
  for (const message of state.feed) {
    const row = el("div", `message ${message.status}`);
    row.dataset["txId"] = message.tx_id;
    const meta = el("div", "meta");
    meta.appendChild(el("span", "nick", message.nickname));
    const badge = el(
      "span",
      `badge ${message.status}`,
      message.status === "pending"
        ? t("pendingBadge")
        : `${t("confirmedBadge")} #${message.block_index}`,
    );
    meta.appendChild(badge);
    row.appendChild(meta);
    row.appendChild(el("p", "text", message.text));
    row.onclick = () => handlers.openTx(message.tx_id);
    feed.appendChild(row);
  }
  section.appendChild(feed);
  const composer = el("div", "composer");
  const input = el("input", "message-input");
  input.maxLength = 512;
  input.placeholder = t("composerPlaceholder");
  const send = el("button", "primary send", t("sendButton"));
  const submit = () => {
    if (input.value.trim()) {
      handlers.post(input.value);
      input.value = "";
    }
  };
  send.onclick = submit;
  input.onkeydown = (event) => {
    if (event.key === "Enter") {
      submit();
    }
  };
  composer.appendChild(input);
  composer.appendChild(send);
  section.appendChild(composer);
  return section;
}

function rightColumn(state: ClientState, handlers: Handlers): HTMLElement {
  const aside = el("aside", "right");
  aside.appendChild(leaderboardPanel(state));
  aside.appendChild(explorerPanel(state, handlers));
  return aside;
}

function leaderboardPanel(state: ClientState): HTMLElement {
  const panel = el("section", "leaderboard");
  panel.appendChild(el("h2", "", t("leaderboardHeading")));
  const list = el("ol");
  for (const [nickname, level] of state.leaderboard) {
    list.appendChild(el("li", "", `${nickname} - ${t("levelLabel")} ${level}`));
  }
  panel.appendChild(list);
  return panel;
}

function explorerPanel(state: ClientState, handlers: Handlers): HTMLElement {
  const panel = el("section", "explorer");
  panel.appendChild(el("h2", "", t("explorerHeading")));
  const locked = (state.session?.level ?? 1) < 2;
  if (locked) {
    const hint = el("div", "locked-hint");
    hint.appendChild(el("span", "lock-icon", "🔒"));
    hint.appendChild(el("span", "", t("explorerLockedHint")));
    panel.appendChild(hint);
    return panel;
  }
  const tabs = el("nav", "tabs");
  const defs: [ExplorerTab, string][] = [
    ["chain", t("tabChain")],
    ["block", t("tabBlock")],
    ["tx", t("tabTransaction")],
    ["peers", t("tabPeers")],
  ];
  for (const [tab, label] of defs) {
    const button = el("button", state.explorer.tab === tab ? "tab active" : "tab", label);
    button.onclick = () => handlers.openExplorer(tab);
    tabs.appendChild(button);
  }
  panel.appendChild(tabs);
  const body = el("div", "explorer-body");
  const explorer = state.explorer;
  if (explorer.tab === "chain" && explorer.chain) {
    for (const block of explorer.chain) {
      const row = el("div", "block-row");
      row.dataset["blockIndex"] = String(block.index);
      row.appendChild(el("span", "idx", `#${block.index}`));
      row.appendChild(el("code", "hash", `${block.hash.slice(0, 16)}...`));
      row.appendChild(el("span", "", `${block.tx_count} tx, nonce ${block.nonce}`));
      row.onclick = () => handlers.openBlock(block.index);
      body.appendChild(row);
    }
  } else if (explorer.tab === "block" && explorer.block) {
    const header = explorer.block.header as Record<string, unknown>;
    body.appendChild(el("h3", "", `#${header["index"]}`));
    body.appendChild(kv("hash", explorer.block.hash));
    body.appendChild(kv("prev_hash", String(header["prev_hash"])));
    body.appendChild(kv("nonce", String(header["nonce"])));
    body.appendChild(kv("difficulty", String(header["difficulty"])));
    for (const tx of explorer.block.transactions) {
      const row = el("div", "tx-row");
      row.appendChild(el("code", "", `${tx.id.slice(0, 16)}...`));
      row.appendChild(el("span", "", tx.author_nick));
      row.onclick = () => handlers.openTx(tx.id);
      body.appendChild(row);
    }
  } else if (explorer.tab === "tx" && explorer.tx) {
    const tx = explorer.tx;
    body.appendChild(kv("id", tx.id));
    body.appendChild(kv("author", `${tx.author_nick} (${tx.author.slice(0, 16)}...)`));
    body.appendChild(kv("ciphertext", tx.ciphertext));
    body.appendChild(kv("plaintext", tx.plaintext));
    body.appendChild(kv("signature", tx.signature));
    body.appendChild(kv("signature valid", String(tx.signature_valid)));
    body.appendChild(kv("block", tx.block_index === null ? "pending" : `#${tx.block_index}`));
  } else if (explorer.tab === "peers") {
    const peers = explorer.peers ?? [];
    if (peers.length === 0) {
      body.appendChild(el("p", "hint", t("peersEmpty")));
    }
    for (const peer of peers) {
      const row = el("div", "peer-row");
      row.appendChild(el("code", "", peer.address));
      row.appendChild(el("span", "", `tip #${peer.tip_index}`));
      body.appendChild(row);
    }
  }
  panel.appendChild(body);
  return panel;
}

function kv(key: string, value: string): HTMLElement {
  const row = el("div", "kv");
  row.appendChild(el("span", "k", key));
  const v = el("code", "v");
  v.textContent = value;
  row.appendChild(v);
  return row;
}

function miningModal(state: ClientState, handlers: Handlers): HTMLElement {
  const overlay = el("div", "overlay");
  const modal = el("div", "mining");
  modal.appendChild(el("h2", "", t("miningHeading")));
  const mining = state.mining;
  modal.appendChild(
    el(
      "p",
      "target",
      `${t("miningTarget")} ${hexZeroTarget(mining.difficulty)} ${t("miningZeros")} ` +
        `(difficulty ${mining.difficulty})`,
    ),
  );
  if (mining.templateSummary) {
    modal.appendChild(el("p", "template", mining.templateSummary));
  }
  modal.appendChild(el("p", "nonce", `nonce: ${mining.nonce} (guesses: ${mining.guesses})`));
  if (mining.lastDigest) {
    const digest = el("p", "digest");
    const prefix = leadingZeroPrefix(mining.lastDigest);
    const zeros = el("span", "zeros", prefix);
    const rest = el("span", "rest", mining.lastDigest.slice(prefix.length));
    digest.appendChild(zeros);
    digest.appendChild(rest);
    modal.appendChild(digest);
  }
  if (mining.found) {
    modal.appendChild(el("p", "found", t("miningFound")));
  } else {
    const tryButton = el("button", "primary try", t("tryNonce"));
    tryButton.onclick = () => handlers.guessOnce();
    modal.appendChild(tryButton);
    const auto = el("button", "auto", mining.auto ? t("stopAuto") : t("autoStep"));
    auto.onclick = () => handlers.toggleAuto();
    modal.appendChild(auto);
  }
  const close = el("button", "close", "×");
  close.onclick = () => handlers.closeMining();
  modal.appendChild(close);
  overlay.appendChild(modal);
  return overlay;
}
