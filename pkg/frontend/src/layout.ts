/**
 * Geometry for the thematic overview: a static ring of fixed-size circles
 * (deterministic and stable under filtering, unlike a force layout), and the
 * per-circle model — year-colored fact dots on arcs in the lower semicircle,
 * fact-set connectors, and two radial bars normalized across the visible set.
 */

import type { Article, Cluster } from "./types.js";
import { UNDATED_COLOR } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

export interface RingLayout {
  center: Point;
  positions: Map<string, Point>;
  circleRadius: number;
}

export function ringLayout(clusterIds: string[], width: number, height: number): RingLayout {
  const center = { x: width / 2, y: height / 2 };
  const n = Math.max(1, clusterIds.length);
  const ringRadius = n === 1 ? 0 : Math.min(width, height) * 0.33;
  const circleRadius = Math.min(width, height) * (n <= 4 ? 0.16 : 0.13);
  const positions = new Map<string, Point>();
  clusterIds.forEach((id, i) => {
    const angle = -Math.PI / 2 + (2 * Math.PI * i) / n;
    positions.set(id, {
      x: center.x + ringRadius * Math.cos(angle),
      y: center.y + ringRadius * Math.sin(angle),
    });
  });
  return { center, positions, circleRadius };
}

export interface DotSpec {
  factId: string;
  factSetId: string;
  x: number;
  y: number;
  year: number;
  color: string;
}

export interface ConnectorSpec {
  factSetId: string;
  points: Point[];
}

export interface RadialBarSpec {
  /** 0..1 share of the maximum across visible clusters. */
  fraction: number;
  count: number;
}

export interface CircleModel {
  clusterId: string;
  topic: string;
  representativeText: string;
  radius: number;
  dots: DotSpec[];
  connectors: ConnectorSpec[];
  factBar: RadialBarSpec;
  articleBar: RadialBarSpec;
}

/** Sequential blue scale from oldest to newest year; undated stays gray. */
export function yearColor(year: number, minYear: number, maxYear: number): string {
  if (!year) {
    return UNDATED_COLOR;
  }
  const t = maxYear > minYear ? (year - minYear) / (maxYear - minYear) : 1;
  const light = 80 - Math.round(45 * t);
  return `hsl(215, 70%, ${light}%)`;
}

export function ellipsizeMiddle(text: string, maxChars: number): string {
  if (text.length <= maxChars) {
    return text;
  }
  const keep = Math.max(1, Math.floor((maxChars - 1) / 2));
  return `${text.slice(0, keep)}…${text.slice(text.length - keep)}`;
}

const FIRST_ARC_CAPACITY = 12;

export interface CircleModelOptions {
  radius: number;
  maxFactCount: number;
  maxArticleCount: number;
  articlesById: Map<string, Article>;
  minYear: number;
  maxYear: number;
}

export function articleCount(cluster: Cluster): number {
  return new Set(cluster.facts.map((f) => f.article_id)).size;
}

/**
 * Dots are sorted by (year, fact id) and laid out along one or two
 * concentric arcs spanning the lower 180 degrees of the circle; facts of a
 * multi-member set are joined by a connector polyline.
 */
export function thematicCircleModel(cluster: Cluster, opts: CircleModelOptions): CircleModel {
  const representative = cluster.facts.find((f) => f.id === cluster.representative_fact_id);
  const yearOf = (articleId: string) => opts.articlesById.get(articleId)?.published_year ?? 0;

  const ordered = [...cluster.facts].sort((a, b) => {
    const ya = yearOf(a.article_id);
    const yb = yearOf(b.article_id);
    if (ya !== yb) {
      return ya - yb;
    }
    return a.id.localeCompare(b.id, undefined, { numeric: true });
  });

  const setByFact = new Map<string, string>();
  for (const set of cluster.fact_sets) {
    for (const fid of set.fact_ids) {
      setByFact.set(fid, set.id);
    }
  }

  const dots: DotSpec[] = [];
  const firstArc = ordered.slice(0, FIRST_ARC_CAPACITY);
  const secondArc = ordered.slice(FIRST_ARC_CAPACITY);
  const place = (facts: typeof ordered, arcRadius: number) => {
    const n = facts.length;
    facts.forEach((fact, i) => {
      // angles sweep the lower semicircle, 0 = due "east", PI = due "west"
      const angle = n === 1 ? Math.PI / 2 : (Math.PI * (i + 0.5)) / n;
      const year = yearOf(fact.article_id);
      dots.push({
        factId: fact.id,
        factSetId: setByFact.get(fact.id) ?? "",
        x: Math.cos(Math.PI - angle) * arcRadius,
        y: Math.sin(angle) * arcRadius, // positive y = below center
        year,
        color: yearColor(year, opts.minYear, opts.maxYear),
      });
    });
  };
  place(firstArc, opts.radius * 0.78);
  if (secondArc.length) {
    place(secondArc, opts.radius * 0.58);
  }

  const dotByFact = new Map(dots.map((d) => [d.factId, d]));
  const connectors: ConnectorSpec[] = cluster.fact_sets
    .filter((s) => s.fact_ids.length > 1)
    .map((s) => ({
      factSetId: s.id,
      points: s.fact_ids
        .map((fid) => dotByFact.get(fid))
        .filter((d): d is DotSpec => d !== undefined)
        .map((d) => ({ x: d.x, y: d.y })),
    }));

  const articles = articleCount(cluster);
  return {
    clusterId: cluster.id,
    topic: cluster.topic,
    representativeText: representative ? representative.content : "",
    radius: opts.radius,
    dots,
    connectors,
    factBar: { fraction: opts.maxFactCount ? cluster.facts.length / opts.maxFactCount : 0, count: cluster.facts.length },
    articleBar: { fraction: opts.maxArticleCount ? articles / opts.maxArticleCount : 0, count: articles },
  };
}
