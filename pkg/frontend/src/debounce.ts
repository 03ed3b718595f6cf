/** Debounced single-flight runner for preview requests.
 *
 * Guarantees: a call only fires after `delayMs` of quiet, at most one
 * request is in flight per runner, and a change arriving mid-flight is
 * coalesced into exactly one trailing run with the latest payload.
 */

export type Clock = {
  setTimeout: (fn: () => void, ms: number) => unknown;
  clearTimeout: (handle: unknown) => void;
};

const realClock: Clock = {
  setTimeout: (fn, ms) => setTimeout(fn, ms),
  clearTimeout: (h) => clearTimeout(h as Parameters<typeof clearTimeout>[0]),
};

export class DebouncedRunner<T> {
  private timer: unknown = null;
  private inFlight = false;
  private pending: T | null = null;
  inFlightCount = 0; // exposed for tests

  constructor(
    private run: (payload: T) => Promise<void>,
    private delayMs = 300,
    private clock: Clock = realClock,
  ) {}

  schedule(payload: T): void {
    this.pending = payload;
    if (this.timer !== null) this.clock.clearTimeout(this.timer);
    this.timer = this.clock.setTimeout(() => {
      this.timer = null;
      void this.fire();
    }, this.delayMs);
  }

  private async fire(): Promise<void> {
    if (this.inFlight || this.pending === null) return;
    const payload = this.pending;
    this.pending = null;
    this.inFlight = true;
    this.inFlightCount++;
    try {
      await this.run(payload);
    } finally {
      this.inFlightCount--;
      this.inFlight = false;
      if (this.pending !== null && this.timer === null) void this.fire();
    }
  }
}
