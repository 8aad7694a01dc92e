/**
 * Story Document wire format (v1) plus the UI's own state types.
 * Decimals travel as strings; parse with Number() at render time only.
 */

export interface DataPoint {
  label: string;
  value: string;
  unit: string;
  series_key: string | null;
}

export interface Fact {
  id: string;
  article_id: string;
  paragraph_index: number;
  content: string;
  data_points: DataPoint[];
  relevance: string;
  status: "extracted" | "validated" | "refined";
}

export interface FactSet {
  id: string;
  cluster_id: string;
  fact_ids: string[];
  canonical_content: string;
  conflicting: boolean;
}

export interface Cluster {
  id: string;
  topic: string;
  summary: string;
  fact_ids: string[];
  relevance: string;
  representative_fact_id: string;
  top_fact_ids: string[];
  facts: Fact[];
  fact_sets: FactSet[];
}

export type ChartKind = "bar" | "pie" | "line" | "isotype" | "range" | "text";

export interface ChartSeriesPoint {
  series_key: string | null;
  label: string;
  value: string;
  unit: string;
  color_index: number;
}

export interface ChartSpec {
  kind: ChartKind;
  x_label: string;
  y_label: string;
  series: ChartSeriesPoint[];
  annotations: string[];
}

export interface NarrativeUnit {
  id: string;
  cluster_id: string;
  fact_set_ids: string[];
  title: string;
  caption_html: string;
  chart: ChartSpec;
  source_article_ids: string[];
  order_in_cluster: number;
}

export interface ClusterLink {
  cluster_a: string;
  cluster_b: string;
  shared_article_ids: string[];
}

export interface SummaryStats {
  total_articles: number;
  total_facts: number;
  total_clusters: number;
  shown_clusters_default: number;
  shown_facts_default: number;
  contributing_articles_default: number;
}

export interface Article {
  id: string;
  url: string;
  title: string;
  snippet: string;
  source_domain: string;
  published_year: number;
  retrieved_at: string;
  paragraphs: string[];
  favicon_url: string;
}

export interface StoryDocument {
  story_id: string;
  query: string;
  expanded_queries: string[];
  articles: Article[];
  clusters: Cluster[];
  units: NarrativeUnit[];
  links: ClusterLink[];
  stats: SummaryStats;
  created_at: string;
}

export interface Job {
  job_id: string;
  query: string;
  state: "queued" | "retrieving" | "extracting" | "organizing" | "composing" | "ready" | "failed";
  progress: number;
  story_id: string | null;
  error_detail: string | null;
  timestamps: Record<string, string>;
}

/** Overview filter widget state. */
export interface OverviewFilterState {
  /** How many thematic circles to show, most relevant first (1..10). */
  maxTopics: number;
  /** Inclusive link-weight window; weight = number of shared articles. */
  linkWeightRange: [number, number];
  showFactDots: boolean;
}

export const DEFAULT_FILTERS: OverviewFilterState = {
  maxTopics: 6,
  linkWeightRange: [1, Number.POSITIVE_INFINITY],
  showFactDots: true,
};

export type ViewMode = "overview" | "story";

export interface ScrollPosition {
  mode: ViewMode;
  clusterIndex: number;
  /** Unit index within the cluster; meaningless in overview mode. */
  unitIndex: number;
}

export const OVERVIEW_POSITION: ScrollPosition = { mode: "overview", clusterIndex: -1, unitIndex: -1 };

/** Shared categorical palette; chart color_index values map through modulo. */
export const PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#e15759",
  "#76b7b2",
  "#59a14f",
  "#edc948",
  "#b07aa1",
  "#ff9da7",
  "#9c755f",
  "#bab0ac",
];

export function paletteColor(colorIndex: number): string {
  return PALETTE[((colorIndex % PALETTE.length) + PALETTE.length) % PALETTE.length];
}

/** Gray sentinel for articles whose publication year is unknown (stored 0). */
export const UNDATED_COLOR = "#b0b0b0";
