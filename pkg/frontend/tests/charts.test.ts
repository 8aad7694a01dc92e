/** Chart models for all six kinds, driven purely by the ChartSpec. */

import { describe, expect, it } from "vitest";

import { chartModel, valueText } from "../src/charts.js";
import type { ChartSpec } from "../src/types.js";
import { loadGoldenStory } from "./fixtures.js";

function spec(kind: ChartSpec["kind"], series: ChartSpec["series"]): ChartSpec {
  return { kind, x_label: "x", y_label: "y", series, annotations: [] };
}

function point(value: string, unit = "%", key: string | null = null, colorIndex = 0, label = "L") {
  return { series_key: key, label, value, unit, color_index: colorIndex };
}

describe("chart models", () => {
  it("bar fractions normalize to the largest magnitude", () => {
    const model = chartModel(spec("bar", [point("50", "%", null, 0), point("25", "%", null, 1)]));
    expect(model.kind).toBe("bar");
    if (model.kind === "bar") {
      expect(model.bars[0].fraction).toBeCloseTo(1);
      expect(model.bars[1].fraction).toBeCloseTo(0.5);
    }
  });

  it("pie slices cover the full circle in series order", () => {
    const model = chartModel(spec("pie", [point("60", "%", null, 0), point("40", "%", null, 1)]));
    if (model.kind === "pie") {
      expect(model.slices[0].endAngle).toBeCloseTo(model.slices[1].startAngle);
      const sweep = model.slices.reduce((acc, s) => acc + (s.endAngle - s.startAngle), 0);
      expect(sweep).toBeCloseTo(2 * Math.PI);
    }
  });

  it("line points sort by orderable key", () => {
    const model = chartModel(
      spec("line", [point("2.5", "million", "2020", 1), point("0.85", "million", "1999", 0)]),
    );
    if (model.kind === "line") {
      expect(model.points.map((p) => p.key)).toEqual(["1999", "2020"]);
      expect(model.points[0].yFraction).toBe(0);
      expect(model.points[1].yFraction).toBe(1);
    }
  });

  it("isotype fills icons proportional to the percentage", () => {
    const model = chartModel(spec("isotype", [point("57", "%", null, 0)]));
    if (model.kind === "isotype") {
      expect(model.rows[0].filled).toBe(6);
      expect(model.rows[0].total).toBe(10);
    }
  });

  it("range pairs points by shared key, low before high", () => {
    const model = chartModel(
      spec("range", [point("25", "", "score", 1, "High"), point("15", "", "score", 0, "Low")]),
    );
    if (model.kind === "range") {
      expect(model.pairs.length).toBe(1);
      expect(model.pairs[0].loText).toBe("15");
      expect(model.pairs[0].hiText).toBe("25");
    }
  });

  it("text statements keep the value surface form", () => {
    const model = chartModel(spec("text", [point("3.7", "million", null, 0, "Homeschooled Children")]));
    if (model.kind === "text") {
      expect(model.statements[0].valueText).toBe("3.7 million");
    }
  });

  it("value text renders percent and units naturally", () => {
    expect(valueText(point("23.1", "%"))).toBe("23.1%");
    expect(valueText(point("700", "$"))).toBe("700 $");
    expect(valueText(point("42", ""))).toBe("42");
  });

  it("builds a model for every chart in the golden story", () => {
    const golden = loadGoldenStory();
    for (const unit of golden.units) {
      const model = chartModel(unit.chart);
      expect(model.kind).toBe(unit.chart.kind);
    }
  });
});
