/** Typed client for the proxy's HTTP API.
 *
 * The proxy returns full HTML documents per shot; this module extracts the
 * segment containers, the "Shot i of k" label, the session header, and the
 * optional debug score island. fetch and HTML parsing are injectable so
 * tests can run outside a browser.
 */

import type { PendingEvent } from './state.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;
export type HtmlParser = (html: string) => Document;

export interface SegmentView {
  id: string;
  html: string;
}

export interface ScoreRow {
  segment_id: string;
  link_w: number;
  image_w: number;
  theme_w: number;
  visual_w: number;
  fresh_w: number;
  total: number;
}

export interface ShotPayload {
  sessionToken: string;
  shotIndex: number;
  totalShots: number | null;
  segments: SegmentView[];
  scores: ScoreRow[] | null;
}

export type ShotResult = { kind: 'shot'; payload: ShotPayload } | { kind: 'end' };

export type PostOutcome = 'delivered' | 'retry' | 'rejected';

export class ProxyError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = 'ProxyError';
  }
}

export interface OpenPageOptions {
  seed?: string;
  template?: string;
  width?: number;
  debug?: boolean;
}

export interface ApiClientOptions {
  baseUrl?: string;
  fetchFn?: FetchLike;
  parseHtml?: HtmlParser;
}

export interface ProfileDoc {
  user_id: string;
  terms: Array<{ term: string; weight: number; updated_at?: number }>;
}

/** What the app layer needs from the proxy; ApiClient is the real thing. */
export interface ProxyApi {
  openPage(userId: string, url: string, options?: OpenPageOptions): Promise<ShotPayload>;
  getShot(sessionToken: string, index: number, debug?: boolean): Promise<ShotResult>;
  postEvent(event: PendingEvent): Promise<PostOutcome>;
  getProfile(userId: string): Promise<ProfileDoc>;
}

const SHOT_LABEL_RE = /Shot\s+(\d+)\s+of\s+(\d+)/;

function defaultParseHtml(html: string): Document {
  return new DOMParser().parseFromString(html, 'text/html');
}

async function errorMessage(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { error?: string };
    if (body && typeof body.error === 'string') return body.error;
  } catch {
    // not JSON; fall through
  }
  return `proxy responded ${response.status}`;
}

export class ApiClient implements ProxyApi {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;
  private readonly parseHtml: HtmlParser;

  constructor(options: ApiClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? '').replace(/\/$/, '');
    this.fetchFn = options.fetchFn ?? ((input, init) => fetch(input, init));
    this.parseHtml = options.parseHtml ?? defaultParseHtml;
  }

  async openPage(userId: string, url: string, options: OpenPageOptions = {}): Promise<ShotPayload> {
    const params = new URLSearchParams({ user: userId, url });
    if (options.template) params.set('template', options.template);
    if (options.width) params.set('width', String(options.width));
    if (options.seed) params.set('seed', options.seed);
    if (options.debug) params.set('debug', '1');
    const response = await this.fetchFn(`${this.baseUrl}/fetch?${params}`);
    if (response.status === 204) {
      throw new ProxyError(204, 'page has no visible content');
    }
    if (!response.ok) {
      throw new ProxyError(response.status, await errorMessage(response));
    }
    const token = response.headers.get('X-Morpes-Session') ?? '';
    return this.parseShot(await response.text(), token);
  }

  async getShot(sessionToken: string, index: number, debug = false): Promise<ShotResult> {
    const params = new URLSearchParams({ session: sessionToken, i: String(index) });
    if (debug) params.set('debug', '1');
    const response = await this.fetchFn(`${this.baseUrl}/shot?${params}`);
    if (response.status === 410) {
      return { kind: 'end' };
    }
    if (!response.ok) {
      throw new ProxyError(response.status, await errorMessage(response));
    }
    return { kind: 'shot', payload: this.parseShot(await response.text(), sessionToken) };
  }

  async postEvent(event: PendingEvent): Promise<PostOutcome> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}/event`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(event),
      });
    } catch {
      return 'retry';
    }
    if (response.status === 204) return 'delivered';
    if (response.status >= 400 && response.status < 500) return 'rejected';
    return 'retry';
  }

  async getProfile(userId: string): Promise<ProfileDoc> {
    const params = new URLSearchParams({ user: userId });
    const response = await this.fetchFn(`${this.baseUrl}/profile?${params}`);
    if (!response.ok) {
      throw new ProxyError(response.status, await errorMessage(response));
    }
    return (await response.json()) as ProfileDoc;
  }

  private parseShot(html: string, sessionToken: string): ShotPayload {
    const doc = this.parseHtml(html);
    const segments: SegmentView[] = [];
    doc.querySelectorAll('[data-segment-id]').forEach((element) => {
      segments.push({
        id: element.getAttribute('data-segment-id') ?? '',
        html: element.innerHTML,
      });
    });

    let shotIndex = 1;
    let totalShots: number | null = null;
    const label = doc.querySelector('.morpes-shot-label');
    if (label?.textContent) {
      const match = SHOT_LABEL_RE.exec(label.textContent);
      if (match) {
        shotIndex = Number(match[1]);
        totalShots = Number(match[2]);
      }
    }

    let scores: ScoreRow[] | null = null;
    const island = doc.querySelector('#morpes-scores');
    if (island?.textContent) {
      try {
        const parsed = JSON.parse(island.textContent) as { scores?: ScoreRow[] };
        scores = parsed.scores ?? null;
      } catch {
        scores = null;
      }
    }

    return { sessionToken, shotIndex, totalShots, segments, scores };
  }
}
