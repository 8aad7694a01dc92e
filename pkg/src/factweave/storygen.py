"""From organized facts to the final ordered story document.

Narratives and chart picks come from an LLM but are never trusted blind:
captions are sanitized and checked for one highlight per data point (with a
deterministic template as the floor), chart kinds pass a feasibility guard,
and assembly refuses to emit a document that fails validation.
"""

from __future__ import annotations

import hashlib
import logging
from decimal import Decimal
from typing import Optional

from .captions import extract_highlights, highlight_matches_value, highlight_span, sanitize_caption
from .charts import fallback_kind, kind_is_valid, orderable_key
from .extraction.quantity import display_quantity
from .ids import IdAllocator, id_sort_key
from .model import (
    Article,
    ChartSeries,
    ChartSpec,
    Cluster,
    ClusterLink,
    DataPoint,
    Fact,
    FactSet,
    MergedFactSet,
    NarrativeUnit,
    StoryDocument,
    compute_summary_stats,
)
from .organization.merging import chart_points
from .providers.llm import StructuredRequest, build_prompt
from .validation import validate_story_document

logger = logging.getLogger(__name__)


class AssemblyInvariantViolation(Exception):
    def __init__(self, violations):
        self.violations = violations
        super().__init__(f"{len(violations)} story invariant violations: " + "; ".join(str(v) for v in violations[:5]))


def _points_payload(points: list[DataPoint]) -> list[dict]:
    return [
        {"label": p.label, "value": str(p.value), "unit": p.unit, "series_key": p.series_key}
        for p in points
    ]


def build_template_caption(points: list[DataPoint]) -> str:
    """Deterministic caption: one sentence per data point, value highlighted."""
    pieces = []
    for i, p in enumerate(points):
        sentence = f"{p.label} was {highlight_span(i, display_quantity(p.value, p.unit))}"
        if p.series_key:
            sentence += f" in {p.series_key}"
        pieces.append(sentence + ".")
    return " ".join(pieces)


def _caption_is_complete(caption: str, points: list[DataPoint]) -> bool:
    highlights = extract_highlights(caption)
    if sorted(h.color_index for h in highlights) != list(range(len(points))):
        return False
    by_color = {h.color_index: h for h in highlights}
    return all(highlight_matches_value(by_color[i].text, p.value, p.unit) for i, p in enumerate(points))


def generate_narrative(
    merged: MergedFactSet, fact_sets_by_id: dict[str, FactSet], facts_by_id: dict[str, Fact], llm
) -> tuple[str, str]:
    """(title, caption_html) for one merged fact set.

    The caption must highlight every data point with its color index; an
    incomplete caption is retried once and then replaced by the template so a
    hostile model cannot leave values out of the story.
    """
    sets = [fact_sets_by_id[sid] for sid in merged.fact_set_ids]
    points = chart_points(sets, facts_by_id)
    payload = {
        "merged_content": merged.merged_content,
        "points": _points_payload(points),
        "time_frame": list(merged.time_frame) if merged.time_frame else None,
    }
    req = StructuredRequest(
        task_name="narrative",
        prompt=build_prompt(
            "Write a narrative for these data points: a title of at most eight "
            "words conveying the core message, and a one-to-three sentence caption "
            "as HTML in which every data point value appears wrapped in "
            '<span class="hl-N"> using the point\'s index N. Allowed tags: span, b, i.',
            payload,
        ),
        schema_name="narrative",
    )
    title, caption = "", ""
    for _ in range(2):
        doc = llm.complete_structured(req)
        title = " ".join(doc["title"].split()[:8])
        caption = sanitize_caption(doc["caption_html"])
        if _caption_is_complete(caption, points):
            return title, caption
    logger.warning("merged set %s: caption missing values, using template", merged.id)
    fallback = build_template_caption(points)
    return title or " ".join(merged.merged_content.split()[:8]), fallback


def recommend_chart(
    merged: MergedFactSet, fact_sets_by_id: dict[str, FactSet], facts_by_id: dict[str, Fact], llm
) -> ChartSpec:
    """Chart spec with an LLM-picked kind, overridden when the data cannot
    support it (fallback order: bar, then isotype, then text)."""
    sets = [fact_sets_by_id[sid] for sid in merged.fact_set_ids]
    points = chart_points(sets, facts_by_id)
    req = StructuredRequest(
        task_name="recommend_chart",
        prompt=build_prompt(
            "Recommend the single best chart kind for these data points: "
            "bar, pie, line, isotype, range, or text.",
            {"merged_content": merged.merged_content, "points": _points_payload(points)},
        ),
        schema_name="chart_recommendation",
    )
    kind = llm.complete_structured(req)["kind"]
    if not kind_is_valid(kind, points):
        kind = fallback_kind(points)

    keys = [p.series_key if p.series_key else p.label for p in points]
    x_label = "Year" if points and all(orderable_key(k) for k in keys) else "Category"
    units = {p.unit for p in points}
    y_label = units.pop() if len(units) == 1 else ""
    return ChartSpec(
        kind=kind,
        x_label=x_label,
        y_label=y_label,
        series=[
            ChartSeries(series_key=p.series_key, label=p.label, value=p.value, unit=p.unit, color_index=i)
            for i, p in enumerate(points)
        ],
    )


def order_clusters(clusters: list[Cluster]) -> list[str]:
    """Inverted pyramid: relevance non-increasing, ties toward the lower id."""
    return [c.id for c in sorted(clusters, key=lambda c: (-c.relevance, id_sort_key(c.id)))]


def order_units_within_cluster(
    units: list[NarrativeUnit], max_relevance_by_unit: dict[str, Decimal], llm
) -> list[str]:
    """LLM-arranged unit sequence; anything but a permutation falls back to
    descending max-member-relevance order after one retry."""
    if len(units) <= 1:
        return [u.id for u in units]

    def max_relevance(u: NarrativeUnit) -> Decimal:
        return max_relevance_by_unit.get(u.id, Decimal(0))

    payload = {
        "cluster_id": units[0].cluster_id,
        "units": [
            {"id": u.id, "title": u.title, "max_relevance": str(max_relevance(u))} for u in units
        ],
    }
    req = StructuredRequest(
        task_name="order_units",
        prompt=build_prompt(
            "Arrange these narrative units into a coherent reading sequence with "
            "smooth transitions. Return a permutation of the unit ids.",
            payload,
        ),
        schema_name="unit_order",
    )
    expected = sorted(u.id for u in units)
    for _ in range(2):
        order = llm.complete_structured(req)["order"]
        if sorted(order) == expected:
            return order
    logger.warning("cluster %s: invalid unit permutation from model, using relevance order", units[0].cluster_id)
    ranked = sorted(units, key=lambda u: (-max_relevance(u), id_sort_key(u.id)))
    return [u.id for u in ranked]


def compute_shared_links(clusters: list[Cluster]) -> list[ClusterLink]:
    """One link per unordered cluster pair with at least one shared article.

    Pairs are canonicalized (lower cluster id first) and listed in id order,
    independent of the document's relevance ordering.
    """
    article_sets = {c.id: {f.article_id for f in c.facts} for c in clusters}
    links = []
    ids = sorted((c.id for c in clusters), key=id_sort_key)
    for i, a in enumerate(ids):
        for b in ids[i + 1 :]:
            shared = sorted(article_sets[a] & article_sets[b], key=id_sort_key)
            if shared:
                links.append(ClusterLink(cluster_a=a, cluster_b=b, shared_article_ids=shared))
    return links


def assemble_story(
    story_id: str,
    query: str,
    expanded_queries: list[str],
    articles: list[Article],
    clusters: list[Cluster],
    units_by_cluster: dict[str, list[NarrativeUnit]],
    created_at: str,
) -> StoryDocument:
    """Apply both orderings, compute stats, and refuse to emit an invalid story."""
    ordered_cluster_ids = order_clusters(clusters)
    by_id = {c.id: c for c in clusters}
    ordered_clusters = [by_id[cid] for cid in ordered_cluster_ids]

    ordered_units: list[NarrativeUnit] = []
    for cid in ordered_cluster_ids:
        ordered_units.extend(units_by_cluster.get(cid, []))

    doc = StoryDocument(
        story_id=story_id,
        query=query,
        expanded_queries=expanded_queries,
        articles=articles,
        clusters=ordered_clusters,
        units=ordered_units,
        links=compute_shared_links(ordered_clusters),
        stats=compute_summary_stats(articles, ordered_clusters),
        created_at=created_at,
    )
    violations = validate_story_document(doc)
    if violations:
        raise AssemblyInvariantViolation(violations)
    return doc


def deterministic_story_id(query: str, seed: int, created_at: str) -> str:
    digest = hashlib.blake2b(f"{query}|{seed}|{created_at}".encode("utf-8"), digest_size=6).hexdigest()
    return f"story-{digest}"
