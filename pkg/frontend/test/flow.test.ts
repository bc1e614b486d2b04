// The whole student journey against a scripted node: join, post and watch
// the pending badge confirm, answer a quiz, level up, unlock the explorer,
// and mine by hand until the mission completes.

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { startApp } from "../src/main.js";
import { setLang } from "../src/strings.js";
import { FakeNode, LOSING_DIGEST, MAGIC_NONCE, WINNING_DIGEST, flush } from "./fake_node.js";

let node: FakeNode;
let root: HTMLElement;

function text(selector: string): string {
  return root.querySelector(selector)?.textContent ?? "";
}

function click(selector: string): void {
  const target = root.querySelector(selector);
  if (!target) {
    throw new Error(`nothing matches ${selector}`);
  }
  (target as HTMLElement).click();
}

async function joinAs(nickname: string): Promise<void> {
  const input = root.querySelector("input.nickname") as HTMLInputElement;
  input.value = nickname;
  click("button.primary");
  await flush();
}

async function completeAllQuizzes(): Promise<void> {
  const answers: Record<string, number> = {
    "q-copies": 1,
    "q-links": 0,
    "q-longest": 2,
    "q-forever": 3,
  };
  for (const [missionId, answer] of Object.entries(answers)) {
    click(`[data-mission-id="${missionId}"]`);
    await flush();
    const buttons = root.querySelectorAll(
      `[data-mission-id="${missionId}"] button.choice`,
    );
    (buttons[answer] as HTMLElement).click();
    await flush();
  }
}

beforeEach(() => {
  setLang("en");
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app")!;
  node = new FakeNode();
  startApp(root, "ws://fake/ws", node.factory());
});

afterEach(() => {
  vi.useRealTimers();
});

describe("join", () => {
  it("shows only unlocked level-1 missions as playable after joining", async () => {
    await joinAs("alice");
    const cards = root.querySelectorAll(".mission");
    expect(cards).toHaveLength(6);
    const locked = root.querySelectorAll(".mission.locked");
    expect(locked).toHaveLength(2);
    for (const card of locked) {
      expect(card.textContent).toContain("Unlocks at level 2");
    }
  });

  it("shows the server's rejection inline", async () => {
    await joinAs("   ");
    expect(text(".join .error")).toContain("nickname");
    expect(root.querySelector(".layout")).toBeNull();
  });

  it("keeps the session in memory only", async () => {
    await joinAs("alice");
    expect(localStorage.length).toBe(0);
    expect(document.cookie).toBe("");
  });
});

describe("chat", () => {
  it("posts show a pending badge, then flip to confirmed on block_mined", async () => {
    await joinAs("alice");
    const input = root.querySelector("input.message-input") as HTMLInputElement;
    input.value = "hello chain";
    click("button.send");
    await flush();
    expect(text(".message .badge")).toContain("pending");

    node.confirmAll(4);
    await flush();
    const badge = text(".message .badge");
    expect(badge).toContain("sealed into block");
    expect(badge).toContain("#4");
    const rows = root.querySelectorAll(".message");
    expect(rows).toHaveLength(1);
  });

  it("replaying the block_mined event leaves the feed unchanged", async () => {
    await joinAs("alice");
    const input = root.querySelector("input.message-input") as HTMLInputElement;
    input.value = "only once";
    click("button.send");
    await flush();
    node.confirmAll(2);
    await flush();
    const before = root.querySelectorAll(".message").length;
    node.confirmAll(2);
    await flush();
    expect(root.querySelectorAll(".message")).toHaveLength(before);
  });
});

describe("missions and levels", () => {
  it("answering a quiz correctly focuses the next open mission", async () => {
    await joinAs("alice");
    click('[data-mission-id="q-copies"]');
    await flush();
    const buttons = root.querySelectorAll('[data-mission-id="q-copies"] button.choice');
    (buttons[1] as HTMLElement).click();
    await flush();
    const focused = root.querySelector(".mission.focused");
    expect(focused?.getAttribute("data-mission-id")).toBe("q-links");
  });

  it("explorer stays locked at level 1 and sends no explorer requests", async () => {
    await joinAs("alice");
    expect(text(".explorer")).toContain("Reach level 2");
    const sent = node.requests.filter((r) => r.type.startsWith("get_chain"));
    expect(sent).toHaveLength(0);
  });

  it("completing level 1 levels up, toasts and unlocks the explorer", async () => {
    await joinAs("alice");
    await completeAllQuizzes();
    expect(text(".toast")).toContain("level 2");
    expect(text(".whoami")).toContain("Level 2");
    expect(root.querySelector(".explorer .tabs")).not.toBeNull();
    click(".explorer .tab"); // first tab: chain summary
    await flush();
    expect(root.querySelector(".block-row")).not.toBeNull();
    // every digest on screen came from the server, never computed locally
    expect(text(".block-row code")).toContain("cc".repeat(8));
  });
});

describe("manual mining", () => {
  async function openMiningScreen(): Promise<void> {
    await joinAs("alice");
    await completeAllQuizzes();
    click('[data-mission-id="a-mine"]');
    await flush();
    click('[data-mission-id="a-mine"] button.primary');
    await flush();
  }

  it("renders the difficulty target in hex zeros and the digest prefix", async () => {
    await openMiningScreen();
    expect(text(".mining .target")).toContain("2 leading hex zeros");
    click(".mining button.try");
    await flush();
    expect(text(".mining .digest")).toBe(LOSING_DIGEST);
    expect(text(".mining .digest .zeros")).toBe("");
  });

  it("stepping to the magic nonce succeeds and completes the mission", async () => {
    await openMiningScreen();
    for (let guess = 0; guess <= MAGIC_NONCE; guess++) {
      click(".mining button.try");
      await flush();
    }
    expect(text(".mining .digest")).toBe(WINNING_DIGEST);
    expect(text(".mining .digest .zeros")).toBe("00");
    expect(text(".mining .found")).toContain("found a valid nonce");
    const card = root.querySelector('[data-mission-id="a-mine"]');
    expect(card?.classList.contains("done")).toBe(true);
  });

  it("auto mode finds the nonce at a student-visible pace", async () => {
    await openMiningScreen();
    vi.useFakeTimers();
    try {
      click(".mining button.auto");
      await vi.advanceTimersByTimeAsync(1000);
    } finally {
      vi.useRealTimers();
    }
    await flush();
    expect(text(".mining .found")).toContain("found a valid nonce");
  });
});

describe("connection loss", () => {
  it("shows a retry banner and keeps rendering", async () => {
    await joinAs("alice");
    node.sockets[0].close();
    await flush();
    expect(text(".banner.retry")).toContain("retrying");
    expect(root.querySelector(".layout")).not.toBeNull();
  });
});

describe("ephemerality and language", () => {
  it("never touches storage APIs during a full flow", async () => {
    const setItem = vi.spyOn(Storage.prototype, "setItem");
    await joinAs("alice");
    await completeAllQuizzes();
    expect(setItem).not.toHaveBeenCalled();
    expect(localStorage.length).toBe(0);
    expect(document.cookie).toBe("");
    setItem.mockRestore();
  });

  it("switches the string table to German and back", async () => {
    await joinAs("alice");
    click("button.lang");
    expect(text(".chat h2")).toBe("Chat");
    expect(text(".missions h2")).toBe("Missionen");
    click("button.lang");
    expect(text(".missions h2")).toBe("Missions");
  });
});
