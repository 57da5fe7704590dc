/** Outgoing event queue with at-most-once delivery per user gesture.
 *
 * Each gesture enqueues exactly one event. A flush walks the queue in
 * order: delivered events (204) are removed for good, permanently rejected
 * ones (4xx) are dropped with a count, transient failures stay queued for
 * the next flush. Concurrent flush calls share one run.
 */

import type { PostOutcome } from './api.js';
import type { PendingEvent } from './state.js';

export interface FlushStats {
  delivered: number;
  rejected: number;
  retained: number;
}

export type EventSender = (event: PendingEvent) => Promise<PostOutcome>;

export class EventQueue {
  private pending: PendingEvent[] = [];
  private inFlight: Promise<FlushStats> | null = null;

  constructor(private readonly send: EventSender) {}

  get size(): number {
    return this.pending.length;
  }

  snapshot(): readonly PendingEvent[] {
    return [...this.pending];
  }

  enqueue(event: PendingEvent): void {
    this.pending.push(event);
  }

  flush(): Promise<FlushStats> {
    if (!this.inFlight) {
      this.inFlight = this.run().finally(() => {
        this.inFlight = null;
      });
    }
    return this.inFlight;
  }

  private async run(): Promise<FlushStats> {
    const stats: FlushStats = { delivered: 0, rejected: 0, retained: 0 };
    const batch = this.pending;
    this.pending = [];
    const retained: PendingEvent[] = [];
    for (const event of batch) {
      let outcome: PostOutcome;
      try {
        outcome = await this.send(event);
      } catch {
        outcome = 'retry';
      }
      if (outcome === 'delivered') {
        stats.delivered += 1;
      } else if (outcome === 'rejected') {
        stats.rejected += 1;
      } else {
        retained.push(event);
        stats.retained += 1;
      }
    }
    // Older events stay ahead of anything enqueued mid-flush.
    this.pending = [...retained, ...this.pending];
    return stats;
  }
}
