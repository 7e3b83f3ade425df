/** Debounced, single-flight request scheduling with stale-response dropping.
 *
 * Widgets that refire quickly (the speed slider driving the curve) go
 * through a Debouncer into a SingleFlight: at most one request is in flight
 * per widget, the latest pending argument replaces earlier ones, and a
 * response is applied only if no newer request superseded it (sequence
 * token). */

export class Debouncer {
  private handle: ReturnType<typeof setTimeout> | null = null;

  constructor(private readonly delayMs: number) {}

  schedule(action: () => void): void {
    if (this.handle !== null) {
      clearTimeout(this.handle);
    }
    this.handle = setTimeout(() => {
      this.handle = null;
      action();
    }, this.delayMs);
  }

  cancel(): void {
    if (this.handle !== null) {
      clearTimeout(this.handle);
      this.handle = null;
    }
  }
}

export class SingleFlight<A, R> {
  private sequence = 0;
  private running = false;
  private pending: A[] = [];

  constructor(
    private readonly task: (argument: A) => Promise<R>,
    private readonly apply: (result: R, argument: A) => void,
    private readonly onError: (error: unknown, argument: A) => void = () => {},
  ) {}

  /** Number of requests issued so far (diagnostic). */
  get issued(): number {
    return this.sequence;
  }

  request(argument: A): void {
    this.pending = [argument];
    if (!this.running) {
      void this.drain();
    }
  }

  private async drain(): Promise<void> {
    this.running = true;
    try {
      while (this.pending.length > 0) {
        const argument = this.pending.pop() as A;
        this.pending = [];
        const token = ++this.sequence;
        try {
          const result = await this.task(argument);
          if (this.isCurrent(token)) {
            this.apply(result, argument);
          }
        } catch (error) {
          if (this.isCurrent(token)) {
            this.onError(error, argument);
          }
        }
      }
    } finally {
      this.running = false;
    }
  }

  /** A response is stale when a newer request was issued or newer input is
   * already waiting. */
  private isCurrent(token: number): boolean {
    return token === this.sequence && this.pending.length === 0;
  }
}
