import { describe, expect, it } from 'vitest';

import { ApiClient, ProxyError } from '../src/api.js';
import { emptyResponse, htmlResponse, jsonResponse, makeWindow, shotDocument } from './helpers.js';

function client(responder: (url: string, init?: RequestInit) => Response) {
  const { parseHtml } = makeWindow();
  const requests: string[] = [];
  const api = new ApiClient({
    baseUrl: 'http://proxy.test',
    parseHtml,
    fetchFn: async (url, init) => {
      requests.push(url);
      return responder(url, init);
    },
  });
  return { api, requests };
}

describe('ApiClient.openPage', () => {
  it('parses segments, token, and shot label', async () => {
    const body = shotDocument({
      shotIndex: 1,
      totalShots: 3,
      segments: [
        { id: 'abc-0', html: '<p>first</p>' },
        { id: 'abc-1', html: '<p>second</p>' },
      ],
    });
    const { api, requests } = client(() =>
      htmlResponse(body, 200, { 'X-Morpes-Session': 'tok123' }),
    );
    const payload = await api.openPage('u1', 'http://site.test/page', { width: 320, seed: 'cricket' });
    expect(payload.sessionToken).toBe('tok123');
    expect(payload.shotIndex).toBe(1);
    expect(payload.totalShots).toBe(3);
    expect(payload.segments.map((s) => s.id)).toEqual(['abc-0', 'abc-1']);
    expect(payload.segments[0]!.html).toContain('first');
    expect(requests[0]).toContain('user=u1');
    expect(requests[0]).toContain('width=320');
    expect(requests[0]).toContain('seed=cricket');
  });

  it('raises ProxyError with the server message on failure', async () => {
    const { api } = client(() => jsonResponse({ error: 'HTTP 404 from upstream' }, 502));
    await expect(api.openPage('u1', 'http://site.test/')).rejects.toThrowError(ProxyError);
    await expect(api.openPage('u1', 'http://site.test/')).rejects.toThrow('HTTP 404 from upstream');
  });

  it('treats 204 as an error the UI can show', async () => {
    const { api } = client(() => emptyResponse(204));
    await expect(api.openPage('u1', 'http://site.test/')).rejects.toThrow('no visible content');
  });
});

describe('ApiClient.getShot', () => {
  it('returns the parsed shot', async () => {
    const { api } = client(() =>
      htmlResponse(shotDocument({ shotIndex: 2, totalShots: 3, segments: [{ id: 's', html: 'x' }] })),
    );
    const result = await api.getShot('tok', 2);
    expect(result.kind).toBe('shot');
    if (result.kind === 'shot') {
      expect(result.payload.shotIndex).toBe(2);
      expect(result.payload.sessionToken).toBe('tok');
    }
  });

  it('maps 410 to the end sentinel', async () => {
    const { api } = client(() => jsonResponse({ error: 'segment buffer exhausted' }, 410));
    expect(await api.getShot('tok', 9)).toEqual({ kind: 'end' });
  });

  it('extracts the debug score island when present', async () => {
    const scores = {
      page_url: 'http://site.test/',
      scores: [{ segment_id: 's', link_w: 1, image_w: 0, theme_w: 0.5, visual_w: 0.2, fresh_w: 0, total: 1.7 }],
    };
    const { api } = client(() =>
      htmlResponse(shotDocument({ segments: [{ id: 's', html: 'x' }], scores })),
    );
    const result = await api.getShot('tok', 1, true);
    if (result.kind !== 'shot') throw new Error('expected shot');
    expect(result.payload.scores).toHaveLength(1);
    expect(result.payload.scores![0]!.total).toBeCloseTo(1.7);
  });
});

describe('ApiClient.postEvent', () => {
  const event = {
    user_id: 'u1', session_id: 's', page_url: 'p', segment_id: 'seg',
    kind: 'click' as const, dwell_ms: 0, at: 1,
  };

  it('maps 204 to delivered', async () => {
    const { api } = client(() => emptyResponse(204));
    expect(await api.postEvent(event)).toBe('delivered');
  });

  it('maps 4xx to rejected and 5xx to retry', async () => {
    let status = 404;
    const { api } = client(() => emptyResponse(status));
    expect(await api.postEvent(event)).toBe('rejected');
    status = 503;
    expect(await api.postEvent(event)).toBe('retry');
  });

  it('maps network failure to retry', async () => {
    const { parseHtml } = makeWindow();
    const api = new ApiClient({
      parseHtml,
      fetchFn: async () => {
        throw new TypeError('fetch failed');
      },
    });
    expect(await api.postEvent(event)).toBe('retry');
  });
});
