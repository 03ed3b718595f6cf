import { describe, expect, it, vi } from "vitest";

import { DebouncedRunner } from "../src/debounce.js";

const clock = {
  setTimeout: (fn: () => void, ms: number) => setTimeout(fn, ms),
  clearTimeout: (h: unknown) => clearTimeout(h as ReturnType<typeof setTimeout>),
};

describe("DebouncedRunner", () => {
  it("fires once after the quiet period with the latest payload", async () => {
    vi.useFakeTimers();
    const runs: number[] = [];
    const runner = new DebouncedRunner<number>(async (n) => {
      runs.push(n);
    }, 300, clock);
    runner.schedule(1);
    vi.advanceTimersByTime(100);
    runner.schedule(2);
    vi.advanceTimersByTime(100);
    runner.schedule(3);
    vi.advanceTimersByTime(299);
    expect(runs).toEqual([]);
    await vi.advanceTimersByTimeAsync(1);
    expect(runs).toEqual([3]);
    vi.useRealTimers();
  });

  it("never has more than one request in flight", async () => {
    vi.useFakeTimers();
    let release: (() => void) | null = null;
    let peak = 0;
    const runner = new DebouncedRunner<number>(async () => {
      peak = Math.max(peak, runner.inFlightCount);
      await new Promise<void>((r) => {
        release = r;
      });
    }, 300, clock);

    runner.schedule(1);
    await vi.advanceTimersByTimeAsync(300); // first request now in flight
    runner.schedule(2); // arrives mid-flight
    await vi.advanceTimersByTimeAsync(1000); // its timer fires while busy
    expect(peak).toBe(1);
    expect(runner.inFlightCount).toBe(1);

    release!(); // finish the first request
    await vi.advanceTimersByTimeAsync(0);
    expect(runner.inFlightCount).toBe(1); // trailing run started, still alone
    expect(peak).toBe(1);
    release!();
    await vi.advanceTimersByTimeAsync(0);
    expect(runner.inFlightCount).toBe(0);
    vi.useRealTimers();
  });

  it("coalesces edits that arrive during a flight into one trailing run", async () => {
    vi.useFakeTimers();
    const runs: number[] = [];
    let release: (() => void) | null = null;
    const runner = new DebouncedRunner<number>(async (n) => {
      runs.push(n);
      await new Promise<void>((r) => {
        release = r;
      });
    }, 300, clock);

    runner.schedule(1);
    await vi.advanceTimersByTimeAsync(300);
    runner.schedule(2);
    runner.schedule(3);
    await vi.advanceTimersByTimeAsync(400);
    release!();
    await vi.advanceTimersByTimeAsync(0);
    release!();
    await vi.advanceTimersByTimeAsync(0);
    expect(runs).toEqual([1, 3]);
    vi.useRealTimers();
  });
});
