/** Test scaffolding: a happy-dom window and a canned Response factory. */

import { Window } from 'happy-dom';

export function makeWindow() {
  const window = new Window({ url: 'http://client.test/app/' });
  return {
    window,
    document: window.document as unknown as Document,
    root: window.document.createElement('div') as unknown as HTMLElement,
    parseHtml: (html: string) =>
      new window.DOMParser().parseFromString(html, 'text/html') as unknown as Document,
  };
}

export function htmlResponse(body: string, status = 200, headers: Record<string, string> = {}): Response {
  return new Response(body, {
    status,
    headers: { 'Content-Type': 'text/html; charset=utf-8', ...headers },
  });
}

export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

export function emptyResponse(status: number): Response {
  return new Response(null, { status });
}

export function shotDocument(options: {
  sessionToken?: string;
  shotIndex?: number;
  totalShots?: number;
  segments?: Array<{ id: string; html: string }>;
  scores?: unknown;
  nav?: boolean;
}): string {
  const {
    sessionToken = 'tok',
    shotIndex = 1,
    totalShots = 1,
    segments = [],
    scores,
    nav = true,
  } = options;
  const sections = segments
    .map((s) => `<section class="morpes-segment" data-segment-id="${s.id}">${s.html}</section>`)
    .join('');
  const navHtml = nav
    ? `<nav class="morpes-nav"><span class="morpes-shot-label">Shot ${shotIndex} of ${totalShots}</span></nav>`
    : '';
  const island = scores
    ? `<script type="application/json" id="morpes-scores">${JSON.stringify(scores)}</script>`
    : '';
  return (
    `<!DOCTYPE html><html><head><meta charset="utf-8"><title>Shot ${shotIndex}</title></head>` +
    `<body>${sections}${navHtml}${island}</body></html>`
  );
}
