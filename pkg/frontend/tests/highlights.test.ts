/** Highlight/chart color agreement on every rendered unit of both fixtures. */

import { describe, expect, it } from "vitest";

import { captionColorIndices, highlightsMatchChart, renderableCaption } from "../src/highlights.js";
import { loadGoldenStory, loadTiktokStory } from "./fixtures.js";

describe("caption highlights", () => {
  for (const [name, doc] of [
    ["golden", loadGoldenStory()],
    ["tiktok", loadTiktokStory()],
  ] as const) {
    it(`caption highlight colors equal chart series colors on every unit (${name})`, () => {
      for (const unit of doc.units) {
        const seriesColors = unit.chart.series.map((s) => s.color_index);
        expect(
          highlightsMatchChart(unit.caption_html, seriesColors),
          `${unit.id}: caption ${captionColorIndices(unit.caption_html)} vs chart ${seriesColors}`,
        ).toBe(true);
      }
    });
  }

  it("extracts color indices in document order", () => {
    const caption = 'a <span class="hl-2">x</span> b <span class="hl-0">y</span>';
    expect(captionColorIndices(caption)).toEqual([2, 0]);
  });

  it("escapes anything outside the allowed tags before innerHTML", () => {
    const hostile = '<img src=x onerror=alert(1)> <span class="hl-0">57%</span> <b>ok</b>';
    const safe = renderableCaption(hostile);
    expect(safe).not.toContain("<img");
    expect(safe).toContain("&lt;img");
    expect(safe).toContain('<span class="hl-0">');
    expect(safe).toContain("<b>");
  });
});
