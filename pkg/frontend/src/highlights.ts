/**
 * Caption highlight handling. Captions arrive sanitized (span/b/i only) with
 * values wrapped in <span class="hl-N">; N is the color index shared with
 * the chart series, which is what keeps text and visualization in sync.
 */

const HL_RE = /<span class="hl-(\d+)">/g;

export function captionColorIndices(captionHtml: string): number[] {
  const out: number[] = [];
  for (const match of captionHtml.matchAll(HL_RE)) {
    out.push(Number(match[1]));
  }
  return out;
}

/** Multiset equality between caption highlight colors and chart series colors. */
export function highlightsMatchChart(captionHtml: string, seriesColorIndices: number[]): boolean {
  const a = [...captionColorIndices(captionHtml)].sort((x, y) => x - y);
  const b = [...seriesColorIndices].sort((x, y) => x - y);
  return a.length === b.length && a.every((v, i) => v === b[i]);
}

const ALLOWED_TAG_RE = /^<\/?(span( class="hl-\d+")?|b|i)>$/;

/**
 * Defense in depth before innerHTML: anything that is not one of the three
 * allowed tags (span with an hl class, b, i) gets entity-escaped.
 */
export function renderableCaption(captionHtml: string): string {
  return captionHtml.replace(/<[^>]*>/g, (tag) =>
    ALLOWED_TAG_RE.test(tag) ? tag : tag.replace(/</g, "&lt;").replace(/>/g, "&gt;"),
  );
}
