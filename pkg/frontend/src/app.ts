/** Shot-by-shot browsing controller.
 *
 * Owns its DOM chrome (address form, banner, viewport, nav), keeps the
 * client state machine, and turns gestures into proxy events: taps become
 * click events immediately, segments on screen >= 3 s become one dwell
 * event each when they leave the screen or the user navigates.
 *
 * Navigation trusts the proxy, not the shot label: "next" stays enabled
 * until a request comes back 410, which is the buffer-exhausted signal.
 */

import { ProxyApi, ProxyError, ShotPayload } from './api.js';
import { DwellTracker } from './dwell.js';
import { EventQueue, FlushStats } from './queue.js';
import { ClientState, initialState, PendingEvent } from './state.js';

export interface AppOptions {
  root: HTMLElement;
  api: ProxyApi;
  userId: string;
  deviceWidth?: number;
  dwellThresholdMs?: number;
  now?: () => number;
}

export class App {
  state: ClientState;
  readonly queue: EventQueue;
  readonly dwell: DwellTracker;

  private readonly api: ProxyApi;
  private readonly root: HTMLElement;
  private readonly doc: Document;
  private readonly now: () => number;
  private readonly deviceWidth: number | undefined;
  private observer: IntersectionObserver | null = null;
  private lastShotSeen = 0;
  private debugEnabled = false;

  private urlInput!: HTMLInputElement;
  private seedInput!: HTMLInputElement;
  private userInput!: HTMLInputElement;
  private banner!: HTMLElement;
  private viewport!: HTMLElement;
  private prevButton!: HTMLButtonElement;
  private nextButton!: HTMLButtonElement;
  private shotLabel!: HTMLElement;
  private queueWarning!: HTMLElement;

  constructor(options: AppOptions) {
    this.root = options.root;
    this.doc = options.root.ownerDocument;
    this.api = options.api;
    this.now = options.now ?? (() => Date.now());
    this.deviceWidth = options.deviceWidth ?? this.doc.defaultView?.innerWidth;
    this.state = initialState(options.userId);
    this.queue = new EventQueue((event) => this.api.postEvent(event));
    this.dwell = new DwellTracker(options.dwellThresholdMs ?? 3000, this.now);
    this.buildChrome();
  }

  async open(rawUrl: string, seedTerms = ''): Promise<void> {
    const url = rawUrl.trim();
    if (!url) {
      this.setBanner('Enter a page URL first.');
      return;
    }
    await this.reportDwells();
    let payload: ShotPayload;
    try {
      payload = await this.api.openPage(this.state.userId, url, {
        seed: seedTerms.trim() || undefined,
        width: this.deviceWidth,
        debug: this.debugEnabled,
      });
    } catch (error) {
      this.setBanner(error instanceof ProxyError ? error.message : 'proxy unreachable');
      return;
    }
    this.state = {
      ...initialState(this.state.userId),
      sessionToken: payload.sessionToken,
      pageUrl: url,
      currentShot: payload.shotIndex,
      totalShotsKnown: payload.totalShots,
    };
    this.lastShotSeen = payload.shotIndex;
    this.setBanner(null);
    this.showShot(payload);
  }

  async next(): Promise<void> {
    if (!this.state.sessionToken) return;
    if (this.state.endReached && this.state.currentShot >= this.lastShotSeen) return;
    await this.navigateTo(this.state.currentShot + 1);
  }

  async prev(): Promise<void> {
    if (!this.state.sessionToken || this.state.currentShot <= 1) return;
    await this.navigateTo(this.state.currentShot - 1);
  }

  tapSegment(segmentId: string): void {
    if (!this.state.sessionToken) return;
    this.queue.enqueue(this.buildEvent('click', segmentId, 0));
    void this.flushEvents();
  }

  async flushEvents(): Promise<FlushStats> {
    const stats = await this.queue.flush();
    this.updateQueueWarning();
    return stats;
  }

  private async navigateTo(index: number): Promise<void> {
    const token = this.state.sessionToken;
    if (!token) return;
    await this.reportDwells();
    try {
      const result = await this.api.getShot(token, index, this.debugEnabled);
      if (result.kind === 'end') {
        this.state = { ...this.state, endReached: true };
        this.updateNav();
        return;
      }
      this.state = {
        ...this.state,
        currentShot: result.payload.shotIndex,
        totalShotsKnown: result.payload.totalShots ?? this.state.totalShotsKnown,
      };
      this.lastShotSeen = Math.max(this.lastShotSeen, result.payload.shotIndex);
      this.setBanner(null);
      this.showShot(result.payload);
    } catch (error) {
      if (error instanceof ProxyError && error.status === 404) {
        this.setBanner('Session expired; open the page again.');
      } else {
        this.setBanner(error instanceof ProxyError ? error.message : 'proxy unreachable');
      }
    }
  }

  private buildEvent(kind: PendingEvent['kind'], segmentId: string, dwellMs: number): PendingEvent {
    return {
      user_id: this.state.userId,
      session_id: this.state.sessionToken ?? '',
      page_url: this.state.pageUrl ?? '',
      segment_id: segmentId,
      kind,
      dwell_ms: dwellMs,
      at: this.now() / 1000,
    };
  }

  private async reportDwells(): Promise<void> {
    const reports = this.dwell.drain();
    if (!this.state.sessionToken || reports.length === 0) return;
    for (const report of reports) {
      this.queue.enqueue(this.buildEvent('dwell', report.segmentId, report.dwellMs));
    }
    await this.flushEvents();
  }

  private showShot(payload: ShotPayload): void {
    this.dwell.beginView();
    this.observer?.disconnect();
    this.viewport.innerHTML = '';
    const scoreById = new Map((payload.scores ?? []).map((row) => [row.segment_id, row]));

    for (const segment of payload.segments) {
      const section = this.doc.createElement('section');
      section.className = 'client-segment';
      section.setAttribute('data-segment-id', segment.id);
      section.innerHTML = segment.html;
      section.addEventListener('click', () => this.tapSegment(segment.id));
      const score = scoreById.get(segment.id);
      if (this.debugEnabled && score) {
        const aside = this.doc.createElement('aside');
        aside.className = 'segment-scores';
        aside.textContent =
          `L ${score.link_w.toFixed(2)} I ${score.image_w.toFixed(2)} ` +
          `T ${score.theme_w.toFixed(2)} V ${score.visual_w.toFixed(2)} ` +
          `F ${score.fresh_w.toFixed(2)} = ${score.total.toFixed(2)}`;
        section.appendChild(aside);
      }
      this.viewport.appendChild(section);
    }
    this.observeSegments();
    this.updateNav();
  }

  private observeSegments(): void {
    const view = this.doc.defaultView as (Window & typeof globalThis) | null;
    if (!view || typeof view.IntersectionObserver === 'undefined') return;
    this.observer = new view.IntersectionObserver(
      (entries) => {
        for (const entry of entries) {
          const id = entry.target.getAttribute('data-segment-id');
          if (!id) continue;
          if (entry.isIntersecting) {
            this.dwell.segmentShown(id);
          } else {
            const report = this.dwell.segmentHidden(id);
            if (report && this.state.sessionToken) {
              this.queue.enqueue(this.buildEvent('dwell', id, report.dwellMs));
              void this.flushEvents();
            }
          }
        }
      },
      { threshold: 0.5 },
    );
    this.viewport.querySelectorAll('[data-segment-id]').forEach((el) => this.observer?.observe(el));
  }

  private buildChrome(): void {
    this.root.innerHTML = `
      <form class="open-form">
        <input class="user-input" placeholder="user id" aria-label="user id">
        <input class="url-input" placeholder="https://example.com/article" aria-label="page url">
        <input class="seed-input" placeholder="interests (comma separated)" aria-label="seed terms">
        <button type="submit" class="open-button">Open</button>
        <label class="debug-toggle"><input type="checkbox" class="debug-checkbox"> scores</label>
      </form>
      <div class="banner" hidden></div>
      <div class="viewport"></div>
      <nav class="shot-nav">
        <button class="prev" disabled>Previous</button>
        <span class="shot-label"></span>
        <button class="next" disabled>Next</button>
      </nav>
      <div class="queue-warning" hidden></div>
    `;
    this.urlInput = this.mustFind('.url-input');
    this.seedInput = this.mustFind('.seed-input');
    this.userInput = this.mustFind('.user-input');
    this.banner = this.mustFind('.banner');
    this.viewport = this.mustFind('.viewport');
    this.prevButton = this.mustFind('.prev');
    this.nextButton = this.mustFind('.next');
    this.shotLabel = this.mustFind('.shot-label');
    this.queueWarning = this.mustFind('.queue-warning');
    this.userInput.value = this.state.userId;

    this.mustFind<HTMLFormElement>('.open-form').addEventListener('submit', (event) => {
      event.preventDefault();
      if (this.userInput.value.trim()) {
        this.state = { ...this.state, userId: this.userInput.value.trim() };
      }
      void this.open(this.urlInput.value, this.seedInput.value);
    });
    this.mustFind<HTMLInputElement>('.debug-checkbox').addEventListener('change', (event) => {
      this.debugEnabled = (event.target as HTMLInputElement).checked;
    });
    this.prevButton.addEventListener('click', () => void this.prev());
    this.nextButton.addEventListener('click', () => void this.next());
  }

  private mustFind<T extends HTMLElement>(selector: string): T {
    const element = this.root.querySelector<T>(selector);
    if (!element) throw new Error(`app chrome is missing ${selector}`);
    return element;
  }

  private updateNav(): void {
    const { currentShot, totalShotsKnown, endReached, sessionToken } = this.state;
    this.prevButton.disabled = !sessionToken || currentShot <= 1;
    this.nextButton.disabled =
      !sessionToken || (endReached && currentShot >= this.lastShotSeen);
    if (!sessionToken) {
      this.shotLabel.textContent = '';
      return;
    }
    const suffix = totalShotsKnown ? ` of ${totalShotsKnown}` : '';
    const end = endReached && currentShot >= this.lastShotSeen ? ' — end of page' : '';
    this.shotLabel.textContent = `Shot ${currentShot}${suffix}${end}`;
  }

  private updateQueueWarning(): void {
    if (this.queue.size > 0) {
      this.queueWarning.hidden = false;
      this.queueWarning.textContent = `${this.queue.size} event(s) awaiting retry`;
    } else {
      this.queueWarning.hidden = true;
      this.queueWarning.textContent = '';
    }
  }

  private setBanner(message: string | null): void {
    if (message) {
      this.banner.hidden = false;
      this.banner.textContent = message;
    } else {
      this.banner.hidden = true;
      this.banner.textContent = '';
    }
  }
}
