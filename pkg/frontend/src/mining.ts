// Manual mining screen logic: one guess per click, or a slow auto-stepper
// capped well below machine speed so students watch the search happen.

import type { TryNonceResult } from "./protocol.js";

export const AUTO_GUESS_INTERVAL_MS = 50; // 20 guesses per second, max

export type TryNonceFn = (nonce: number) => Promise<TryNonceResult>;

export class MiningController {
  nonce = 0;
  private timer: ReturnType<typeof setInterval> | null = null;
  private busy = false;

  constructor(
    private readonly tryNonce: TryNonceFn,
    private readonly onResult: (result: TryNonceResult) => void,
    private readonly onStop: () => void,
  ) {}

  async guessOnce(): Promise<void> {
    if (this.busy) {
      return;
    }
    this.busy = true;
    try {
      const result = await this.tryNonce(this.nonce);
      this.nonce = result.nonce + 1;
      this.onResult(result);
      if (result.meets) {
        this.stopAuto();
      }
    } finally {
      this.busy = false;
    }
  }

  startAuto(): void {
    if (this.timer !== null) {
      return;
    }
    this.timer = setInterval(() => {
      void this.guessOnce();
    }, AUTO_GUESS_INTERVAL_MS);
  }

  stopAuto(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
      this.onStop();
    }
  }

  get autoRunning(): boolean {
    return this.timer !== null;
  }
}
