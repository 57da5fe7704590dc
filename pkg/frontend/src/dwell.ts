/** Dwell accounting: a segment continuously on screen for at least the
 * threshold earns one dwell report per shot view, emitted when it leaves
 * the screen or the user navigates away.
 */

export interface DwellReport {
  segmentId: string;
  dwellMs: number;
}

export class DwellTracker {
  private visibleSince = new Map<string, number>();
  private reported = new Set<string>();

  constructor(
    private readonly thresholdMs = 3000,
    private readonly now: () => number = () => Date.now(),
  ) {}

  /** Call when a new shot is displayed: prior view state is discarded. */
  beginView(): void {
    this.visibleSince.clear();
    this.reported.clear();
  }

  segmentShown(segmentId: string): void {
    if (!this.visibleSince.has(segmentId)) {
      this.visibleSince.set(segmentId, this.now());
    }
  }

  segmentHidden(segmentId: string): DwellReport | null {
    const since = this.visibleSince.get(segmentId);
    if (since === undefined) return null;
    this.visibleSince.delete(segmentId);
    const dwellMs = this.now() - since;
    if (dwellMs < this.thresholdMs || this.reported.has(segmentId)) {
      return null;
    }
    this.reported.add(segmentId);
    return { segmentId, dwellMs: Math.round(dwellMs) };
  }

  /** Close out everything still visible (navigation or page exit). */
  drain(): DwellReport[] {
    const reports: DwellReport[] = [];
    for (const segmentId of [...this.visibleSince.keys()]) {
      const report = this.segmentHidden(segmentId);
      if (report) reports.push(report);
    }
    return reports;
  }
}
