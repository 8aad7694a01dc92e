"""Domain types and the canonical Story Document wire format.

All types are immutable value objects; pipeline stages build new instances
with ``dataclasses.replace`` rather than mutating. Serialization is
deterministic: keys sorted, decimals rendered as plain strings, floats never
written raw.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace  # noqa: F401  (replace is part of the API)
from decimal import Decimal
from typing import Any, Optional

import json

__all__ = [
    "Article",
    "DataPoint",
    "Fact",
    "Cluster",
    "FactSet",
    "MergedFactSet",
    "ChartSeries",
    "ChartSpec",
    "NarrativeUnit",
    "ClusterLink",
    "SummaryStats",
    "StoryDocument",
    "CHART_KINDS",
    "FACT_STATUSES",
    "UNKNOWN_YEAR",
    "DEFAULT_VISIBLE_CLUSTERS",
    "favicon_url_for",
    "quantize_relevance",
    "mean_relevance",
    "format_decimal",
    "serialize_story",
    "deserialize_story",
    "compute_summary_stats",
]

CHART_KINDS = ("bar", "pie", "line", "isotype", "range", "text")
FACT_STATUSES = ("extracted", "validated", "refined")

# sentinel for articles whose publication year could not be scraped
UNKNOWN_YEAR = 0

# the overview shows the six most relevant clusters by default
DEFAULT_VISIBLE_CLUSTERS = 6


def favicon_url_for(source_domain: str) -> str:
    return f"https://{source_domain}/favicon.ico"


def quantize_relevance(cosine: float) -> Decimal:
    """Fix a raw cosine similarity at six significant digits for storage."""
    return Decimal(format(float(cosine), ".6g"))


def mean_relevance(values: list[Decimal]) -> Decimal:
    """Cluster relevance: the member mean, carried at 12 decimal places.

    Six significant digits would round the mean by up to 5e-7, which is
    coarser than the 1e-9 tolerance the mean invariant is checked at, so
    derived means keep extra precision.
    """
    if not values:
        raise ValueError("mean of zero relevances")
    return (sum(values) / Decimal(len(values))).quantize(Decimal("1e-12")).normalize()


def format_decimal(d: Decimal) -> str:
    """Plain-text decimal without exponent notation; '8.5E+5' renders '850000'."""
    d = d.normalize()
    if d.as_tuple().exponent > 0:
        d = d.quantize(Decimal(1))
    return format(d, "f")


@dataclass(frozen=True)
class Article:
    id: str
    url: str
    title: str
    snippet: str
    source_domain: str
    published_year: int
    retrieved_at: str
    paragraphs: list[str]
    favicon_url: str
    # retrieval provenance; never serialized, ignored by equality
    found_by_query: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class DataPoint:
    label: str
    value: Decimal
    unit: str
    series_key: Optional[str] = None


@dataclass(frozen=True)
class Fact:
    id: str
    article_id: str
    paragraph_index: int
    content: str
    data_points: list[DataPoint]
    relevance: Decimal
    status: str
    # pipeline-internal; never serialized, ignored by equality
    embedding: Optional[Any] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FactSet:
    id: str
    cluster_id: str
    fact_ids: list[str]
    canonical_content: str
    conflicting: bool = False


@dataclass(frozen=True)
class Cluster:
    id: str
    topic: str
    summary: str
    fact_ids: list[str]
    relevance: Decimal
    representative_fact_id: str
    top_fact_ids: list[str]
    facts: list[Fact]
    fact_sets: list[FactSet]


@dataclass(frozen=True)
class MergedFactSet:
    """Intermediate grouping behind one narrative unit; not serialized itself."""

    id: str
    cluster_id: str
    fact_set_ids: list[str]
    merged_content: str
    unit_family: str
    time_frame: Optional[tuple[int, int]] = None


@dataclass(frozen=True)
class ChartSeries:
    series_key: Optional[str]
    label: str
    value: Decimal
    unit: str
    color_index: int


@dataclass(frozen=True)
class ChartSpec:
    kind: str
    x_label: str
    y_label: str
    series: list[ChartSeries]
    annotations: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class NarrativeUnit:
    id: str
    cluster_id: str
    fact_set_ids: list[str]
    title: str
    caption_html: str
    chart: ChartSpec
    source_article_ids: list[str]
    order_in_cluster: int


@dataclass(frozen=True)
class ClusterLink:
    cluster_a: str
    cluster_b: str
    shared_article_ids: list[str]


@dataclass(frozen=True)
class SummaryStats:
    total_articles: int
    total_facts: int
    total_clusters: int
    shown_clusters_default: int
    shown_facts_default: int
    contributing_articles_default: int


@dataclass(frozen=True)
class StoryDocument:
    story_id: str
    query: str
    expanded_queries: list[str]
    articles: list[Article]
    clusters: list[Cluster]
    units: list[NarrativeUnit]
    links: list[ClusterLink]
    stats: SummaryStats
    created_at: str

    def article_by_id(self) -> dict[str, Article]:
        return {a.id: a for a in self.articles}

    def facts_by_id(self) -> dict[str, Fact]:
        return {f.id: f for c in self.clusters for f in c.facts}

    def fact_sets_by_id(self) -> dict[str, FactSet]:
        return {s.id: s for c in self.clusters for s in c.fact_sets}


def compute_summary_stats(
    articles: list[Article], clusters: list[Cluster], visible: int = DEFAULT_VISIBLE_CLUSTERS
) -> SummaryStats:
    """Story totals plus the counts for the default-visible cluster set.

    Clusters must already be in document order (relevance non-increasing);
    the default view is the first min(visible, total) of them.
    """
    shown = clusters[: min(visible, len(clusters))]
    shown_articles = {f.article_id for c in shown for f in c.facts}
    return SummaryStats(
        total_articles=len(articles),
        total_facts=sum(len(c.fact_ids) for c in clusters),
        total_clusters=len(clusters),
        shown_clusters_default=len(shown),
        shown_facts_default=sum(len(c.fact_ids) for c in shown),
        contributing_articles_default=len(shown_articles),
    )


# --- wire format -------------------------------------------------------------


def _article_out(a: Article) -> dict:
    return {
        "id": a.id,
        "url": a.url,
        "title": a.title,
        "snippet": a.snippet,
        "source_domain": a.source_domain,
        "published_year": a.published_year,
        "retrieved_at": a.retrieved_at,
        "paragraphs": list(a.paragraphs),
        "favicon_url": a.favicon_url,
    }


def _point_out(p: DataPoint) -> dict:
    return {
        "label": p.label,
        "value": format_decimal(p.value),
        "unit": p.unit,
        "series_key": p.series_key,
    }


def _fact_out(f: Fact) -> dict:
    return {
        "id": f.id,
        "article_id": f.article_id,
        "paragraph_index": f.paragraph_index,
        "content": f.content,
        "data_points": [_point_out(p) for p in f.data_points],
        "relevance": format_decimal(f.relevance),
        "status": f.status,
    }


def _fact_set_out(s: FactSet) -> dict:
    return {
        "id": s.id,
        "cluster_id": s.cluster_id,
        "fact_ids": list(s.fact_ids),
        "canonical_content": s.canonical_content,
        "conflicting": s.conflicting,
    }


def _cluster_out(c: Cluster) -> dict:
    return {
        "id": c.id,
        "topic": c.topic,
        "summary": c.summary,
        "fact_ids": list(c.fact_ids),
        "relevance": format_decimal(c.relevance),
        "representative_fact_id": c.representative_fact_id,
        "top_fact_ids": list(c.top_fact_ids),
        "facts": [_fact_out(f) for f in c.facts],
        "fact_sets": [_fact_set_out(s) for s in c.fact_sets],
    }


def _chart_out(ch: ChartSpec) -> dict:
    return {
        "kind": ch.kind,
        "x_label": ch.x_label,
        "y_label": ch.y_label,
        "series": [
            {
                "series_key": s.series_key,
                "label": s.label,
                "value": format_decimal(s.value),
                "unit": s.unit,
                "color_index": s.color_index,
            }
            for s in ch.series
        ],
        "annotations": list(ch.annotations),
    }


def _unit_out(u: NarrativeUnit) -> dict:
    return {
        "id": u.id,
        "cluster_id": u.cluster_id,
        "fact_set_ids": list(u.fact_set_ids),
        "title": u.title,
        "caption_html": u.caption_html,
        "chart": _chart_out(u.chart),
        "source_article_ids": list(u.source_article_ids),
        "order_in_cluster": u.order_in_cluster,
    }


def story_to_jsonable(doc: StoryDocument) -> dict:
    return {
        "story_id": doc.story_id,
        "query": doc.query,
        "expanded_queries": list(doc.expanded_queries),
        "articles": [_article_out(a) for a in doc.articles],
        "clusters": [_cluster_out(c) for c in doc.clusters],
        "units": [_unit_out(u) for u in doc.units],
        "links": [
            {
                "cluster_a": ln.cluster_a,
                "cluster_b": ln.cluster_b,
                "shared_article_ids": list(ln.shared_article_ids),
            }
            for ln in doc.links
        ],
        "stats": {
            "total_articles": doc.stats.total_articles,
            "total_facts": doc.stats.total_facts,
            "total_clusters": doc.stats.total_clusters,
            "shown_clusters_default": doc.stats.shown_clusters_default,
            "shown_facts_default": doc.stats.shown_facts_default,
            "contributing_articles_default": doc.stats.contributing_articles_default,
        },
        "created_at": doc.created_at,
    }


def serialize_story(doc: StoryDocument) -> str:
    """Canonical UTF-8 JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(story_to_jsonable(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _point_in(d: dict) -> DataPoint:
    return DataPoint(
        label=d["label"],
        value=Decimal(d["value"]),
        unit=d["unit"],
        series_key=d.get("series_key"),
    )


def _fact_in(d: dict) -> Fact:
    return Fact(
        id=d["id"],
        article_id=d["article_id"],
        paragraph_index=d["paragraph_index"],
        content=d["content"],
        data_points=[_point_in(p) for p in d["data_points"]],
        relevance=Decimal(d["relevance"]),
        status=d["status"],
    )


def story_from_jsonable(data: dict) -> StoryDocument:
    articles = [
        Article(
            id=a["id"],
            url=a["url"],
            title=a["title"],
            snippet=a["snippet"],
            source_domain=a["source_domain"],
            published_year=a["published_year"],
            retrieved_at=a["retrieved_at"],
            paragraphs=list(a["paragraphs"]),
            favicon_url=a["favicon_url"],
        )
        for a in data["articles"]
    ]
    clusters = [
        Cluster(
            id=c["id"],
            topic=c["topic"],
            summary=c["summary"],
            fact_ids=list(c["fact_ids"]),
            relevance=Decimal(c["relevance"]),
            representative_fact_id=c["representative_fact_id"],
            top_fact_ids=list(c["top_fact_ids"]),
            facts=[_fact_in(f) for f in c["facts"]],
            fact_sets=[
                FactSet(
                    id=s["id"],
                    cluster_id=s["cluster_id"],
                    fact_ids=list(s["fact_ids"]),
                    canonical_content=s["canonical_content"],
                    conflicting=s["conflicting"],
                )
                for s in c["fact_sets"]
            ],
        )
        for c in data["clusters"]
    ]
    units = [
        NarrativeUnit(
            id=u["id"],
            cluster_id=u["cluster_id"],
            fact_set_ids=list(u["fact_set_ids"]),
            title=u["title"],
            caption_html=u["caption_html"],
            chart=ChartSpec(
                kind=u["chart"]["kind"],
                x_label=u["chart"]["x_label"],
                y_label=u["chart"]["y_label"],
                series=[
                    ChartSeries(
                        series_key=s["series_key"],
                        label=s["label"],
                        value=Decimal(s["value"]),
                        unit=s["unit"],
                        color_index=s["color_index"],
                    )
                    for s in u["chart"]["series"]
                ],
                annotations=list(u["chart"]["annotations"]),
            ),
            source_article_ids=list(u["source_article_ids"]),
            order_in_cluster=u["order_in_cluster"],
        )
        for u in data["units"]
    ]
    stats = data["stats"]
    return StoryDocument(
        story_id=data["story_id"],
        query=data["query"],
        expanded_queries=list(data["expanded_queries"]),
        articles=articles,
        clusters=clusters,
        units=units,
        links=[
            ClusterLink(
                cluster_a=ln["cluster_a"],
                cluster_b=ln["cluster_b"],
                shared_article_ids=list(ln["shared_article_ids"]),
            )
            for ln in data["links"]
        ],
        stats=SummaryStats(
            total_articles=stats["total_articles"],
            total_facts=stats["total_facts"],
            total_clusters=stats["total_clusters"],
            shown_clusters_default=stats["shown_clusters_default"],
            shown_facts_default=stats["shown_facts_default"],
            contributing_articles_default=stats["contributing_articles_default"],
        ),
        created_at=data["created_at"],
    )


def deserialize_story(text: str) -> StoryDocument:
    return story_from_jsonable(json.loads(text))
