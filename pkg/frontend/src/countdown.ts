// Question countdown. Ticks every 100 ms; the server's clock is the
// deadline of record, this one only drives the bar and the auto-submit.

export const TICK_MS = 100;

export class Countdown {
  private remaining = 0;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly durationMs: number,
    private readonly onTick: (remainingMs: number) => void,
    private readonly onExpire: () => void,
  ) {}

  get remainingMs(): number {
    return this.remaining;
  }

  get running(): boolean {
    return this.timer !== null;
  }

  start(): void {
    this.stop();
    this.remaining = this.durationMs;
    this.onTick(this.remaining);
    this.resume();
  }

  pause(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  resume(): void {
    if (this.timer !== null || this.remaining <= 0) {
      return;
    }
    this.timer = setInterval(() => {
      this.remaining = Math.max(0, this.remaining - TICK_MS);
      this.onTick(this.remaining);
      if (this.remaining === 0) {
        this.pause();
        this.onExpire();
      }
    }, TICK_MS);
  }

  stop(): void {
    this.pause();
    this.remaining = 0;
  }
}
