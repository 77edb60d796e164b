/**
 * Request scheduling for the live preview loop: at most one request in
 * flight, and responses belonging to superseded state are never applied.
 */
export class SingleFlight<T> {
  private running = false;
  private version = 0;

  constructor(
    private readonly task: () => Promise<T>,
    private readonly apply: (result: T) => void,
    private readonly onError: (err: unknown) => void = () => {},
  ) {}

  /** Mark the state dirty; starts a run unless one is already in flight. */
  request(): void {
    this.version++;
    if (!this.running) void this.drain();
  }

  get inFlight(): boolean {
    return this.running;
  }

  private async drain(): Promise<void> {
    this.running = true;
    try {
      // Re-run until a result corresponding to the newest requested version
      // has been delivered; stale results are dropped on the floor.
      let served = -1;
      while (served !== this.version) {
        const v = this.version;
        try {
          const result = await this.task();
          if (v === this.version) {
            this.apply(result);
            served = v;
          }
        } catch (err) {
          if (v === this.version) {
            this.onError(err);
            served = v; // do not hammer a failing endpoint; wait for a new request
          }
        }
      }
    } finally {
      this.running = false;
    }
  }
}

/** Trailing-edge debouncer for mask stroke uploads. */
export class Debouncer {
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly delayMs: number,
    private readonly fn: () => void,
  ) {}

  schedule(): void {
    this.cancel();
    this.timer = setTimeout(() => {
      this.timer = null;
      this.fn();
    }, this.delayMs);
  }

  /** Run now if anything is pending. */
  flush(): void {
    if (this.timer !== null) {
      this.cancel();
      this.fn();
    }
  }

  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  get pending(): boolean {
    return this.timer !== null;
  }
}
