/**
 * ChartSpec -> declarative render model. No client-side re-aggregation: the
 * pipeline's series are the single source of truth, this module only
 * computes geometry (fractions, angles, sort order) for the six kinds.
 */

import type { ChartSeriesPoint, ChartSpec } from "./types.js";

export interface BarModel {
  kind: "bar";
  bars: { label: string; valueText: string; colorIndex: number; fraction: number }[];
}

export interface PieModel {
  kind: "pie";
  slices: { label: string; valueText: string; colorIndex: number; startAngle: number; endAngle: number }[];
}

export interface LineModel {
  kind: "line";
  points: { key: string; label: string; valueText: string; colorIndex: number; xFraction: number; yFraction: number }[];
}

export interface IsotypeModel {
  kind: "isotype";
  rows: { label: string; valueText: string; colorIndex: number; filled: number; total: number }[];
}

export interface RangeModel {
  kind: "range";
  pairs: {
    key: string;
    loText: string;
    hiText: string;
    loColorIndex: number;
    hiColorIndex: number;
    loFraction: number;
    hiFraction: number;
  }[];
}

export interface TextModel {
  kind: "text";
  statements: { label: string; valueText: string; colorIndex: number }[];
}

export type ChartModel = BarModel | PieModel | LineModel | IsotypeModel | RangeModel | TextModel;

export function valueText(point: ChartSeriesPoint): string {
  if (point.unit === "%") {
    return `${point.value}%`;
  }
  return point.unit ? `${point.value} ${point.unit}` : point.value;
}

function numeric(point: ChartSeriesPoint): number {
  return Number(point.value);
}

function keyOf(point: ChartSeriesPoint): string {
  return point.series_key ?? point.label;
}

export function chartModel(spec: ChartSpec): ChartModel {
  const series = spec.series;
  switch (spec.kind) {
    case "bar": {
      const max = Math.max(...series.map((p) => Math.abs(numeric(p))), 1e-9);
      return {
        kind: "bar",
        bars: series.map((p) => ({
          label: p.label,
          valueText: valueText(p),
          colorIndex: p.color_index,
          fraction: Math.abs(numeric(p)) / max,
        })),
      };
    }
    case "pie": {
      const total = series.reduce((acc, p) => acc + numeric(p), 0) || 1;
      let angle = -Math.PI / 2;
      return {
        kind: "pie",
        slices: series.map((p) => {
          const sweep = (numeric(p) / total) * 2 * Math.PI;
          const slice = {
            label: p.label,
            valueText: valueText(p),
            colorIndex: p.color_index,
            startAngle: angle,
            endAngle: angle + sweep,
          };
          angle += sweep;
          return slice;
        }),
      };
    }
    case "line": {
      const sorted = [...series].sort((a, b) => {
        const na = Number(keyOf(a));
        const nb = Number(keyOf(b));
        if (Number.isFinite(na) && Number.isFinite(nb) && na !== nb) {
          return na - nb;
        }
        return keyOf(a).localeCompare(keyOf(b));
      });
      const values = sorted.map(numeric);
      const min = Math.min(...values);
      const max = Math.max(...values);
      const span = max - min || 1;
      return {
        kind: "line",
        points: sorted.map((p, i) => ({
          key: keyOf(p),
          label: p.label,
          valueText: valueText(p),
          colorIndex: p.color_index,
          xFraction: sorted.length === 1 ? 0.5 : i / (sorted.length - 1),
          yFraction: (numeric(p) - min) / span,
        })),
      };
    }
    case "isotype": {
      return {
        kind: "isotype",
        rows: series.map((p) => ({
          label: p.label,
          valueText: valueText(p),
          colorIndex: p.color_index,
          filled: Math.max(0, Math.min(10, Math.round(numeric(p) / 10))),
          total: 10,
        })),
      };
    }
    case "range": {
      const byKey = new Map<string, ChartSeriesPoint[]>();
      for (const p of series) {
        const key = keyOf(p);
        byKey.set(key, [...(byKey.get(key) ?? []), p]);
      }
      const values = series.map(numeric);
      const min = Math.min(...values);
      const max = Math.max(...values);
      const span = max - min || 1;
      const pairs = [...byKey.entries()].map(([key, points]) => {
        const sorted = [...points].sort((a, b) => numeric(a) - numeric(b));
        const lo = sorted[0];
        const hi = sorted[sorted.length - 1];
        return {
          key,
          loText: valueText(lo),
          hiText: valueText(hi),
          loColorIndex: lo.color_index,
          hiColorIndex: hi.color_index,
          loFraction: (numeric(lo) - min) / span,
          hiFraction: (numeric(hi) - min) / span,
        };
      });
      return { kind: "range", pairs };
    }
    case "text":
      return {
        kind: "text",
        statements: series.map((p) => ({ label: p.label, valueText: valueText(p), colorIndex: p.color_index })),
      };
  }
}
