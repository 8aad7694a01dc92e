/**
 * Overview filtering: which circles and links are visible, and the summary
 * counts recomputed over exactly that visible set.
 */

import type { Cluster, ClusterLink, OverviewFilterState, StoryDocument } from "./types.js";

export interface VisibleStats {
  shownClusters: number;
  shownFacts: number;
  contributingArticles: number;
}

export interface VisibleOverview {
  clusters: Cluster[];
  links: ClusterLink[];
  stats: VisibleStats;
}

export function clampFilters(f: OverviewFilterState): OverviewFilterState {
  const maxTopics = Math.min(10, Math.max(1, Math.round(f.maxTopics)));
  const lo = Math.max(0, f.linkWeightRange[0]);
  const hi = Math.max(lo, f.linkWeightRange[1]);
  return { maxTopics, linkWeightRange: [lo, hi], showFactDots: f.showFactDots };
}

export function linkWeight(link: ClusterLink): number {
  return link.shared_article_ids.length;
}

/**
 * Visible clusters are the top maxTopics by relevance (document order is
 * already relevance non-increasing); a link survives when both endpoints are
 * visible and its weight falls inside the inclusive range. Stats are honest
 * recounts over the survivors, never cached document totals.
 */
export function applyOverviewFilters(doc: StoryDocument, filters: OverviewFilterState): VisibleOverview {
  const f = clampFilters(filters);
  const clusters = doc.clusters.slice(0, Math.min(f.maxTopics, doc.clusters.length));
  const visibleIds = new Set(clusters.map((c) => c.id));
  const [lo, hi] = f.linkWeightRange;
  const links = doc.links.filter(
    (l) =>
      visibleIds.has(l.cluster_a) &&
      visibleIds.has(l.cluster_b) &&
      linkWeight(l) >= lo &&
      linkWeight(l) <= hi,
  );
  const articleIds = new Set<string>();
  let facts = 0;
  for (const cluster of clusters) {
    facts += cluster.fact_ids.length;
    for (const fact of cluster.facts) {
      articleIds.add(fact.article_id);
    }
  }
  return {
    clusters,
    links,
    stats: { shownClusters: clusters.length, shownFacts: facts, contributingArticles: articleIds.size },
  };
}
