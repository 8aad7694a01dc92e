"""Whole-document invariant checking.

Violations are data, not exceptions: each names the path to the offending
field, the rule it breaks, and the value seen. An empty list is the story
assembler's exit condition.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal

from .captions import extract_highlights, highlight_matches_value, sanitize_caption
from .ids import id_sort_key
from .model import CHART_KINDS, FACT_STATUSES, StoryDocument, compute_summary_stats
from .organization.merging import MergedFactSet, chart_points, check_merge_constraints, key_is_ordinal
from .urls import normalize_url

__all__ = ["Violation", "validate_story_document"]

_REL_TOL = Decimal("1e-9")


@dataclass(frozen=True)
class Violation:
    path: str
    rule: str
    value: str

    def __str__(self) -> str:  # pragma: no cover - display helper
        return f"{self.path}: {self.rule} ({self.value})"


def validate_story_document(doc: StoryDocument) -> list[Violation]:
    v: list[Violation] = []
    out = v.append

    articles = doc.article_by_id()
    seen_urls: dict[str, str] = {}
    seen_article_ids: set[str] = set()
    for i, a in enumerate(doc.articles):
        path = f"articles[{i}]"
        if not a.url:
            out(Violation(path + ".url", "empty url", repr(a.url)))
        if a.id in seen_article_ids:
            out(Violation(path + ".id", "duplicate article id", a.id))
        seen_article_ids.add(a.id)
        norm = normalize_url(a.url) if a.url else ""
        if norm and norm in seen_urls:
            out(Violation(path + ".url", "duplicate normalized url", norm))
        seen_urls[norm] = a.id
        if a.published_year < 0:
            out(Violation(path + ".published_year", "negative year", str(a.published_year)))

    facts = {}
    for ci, c in enumerate(doc.clusters):
        for fi, f in enumerate(c.facts):
            path = f"clusters[{ci}].facts[{fi}]"
            if f.id in facts:
                out(Violation(path + ".id", "fact in more than one cluster", f.id))
            facts[f.id] = f
            if not re.search(r"\d", f.content):
                out(Violation(path + ".content", "no numeric token", f.content[:60]))
            if not f.data_points:
                out(Violation(path + ".data_points", "no data points", "[]"))
            for pi, p in enumerate(f.data_points):
                if not p.value.is_finite():
                    out(Violation(f"{path}.data_points[{pi}].value", "non-finite value", str(p.value)))
            if not (Decimal(-1) <= f.relevance <= Decimal(1)):
                out(Violation(path + ".relevance", "relevance out of range", str(f.relevance)))
            if f.article_id not in articles:
                out(Violation(path + ".article_id", "unresolved reference", f.article_id))
            elif not (0 <= f.paragraph_index < len(articles[f.article_id].paragraphs)):
                out(Violation(path + ".paragraph_index", "paragraph index out of range", str(f.paragraph_index)))
            if f.status not in FACT_STATUSES:
                out(Violation(path + ".status", "unknown status", f.status))

    fact_sets = {}
    for ci, c in enumerate(doc.clusters):
        path = f"clusters[{ci}]"
        if not c.fact_ids:
            out(Violation(path + ".fact_ids", "empty cluster", "[]"))
            continue
        member_ids = [f.id for f in c.facts]
        if member_ids != list(c.fact_ids):
            out(Violation(path + ".facts", "facts do not match fact_ids", f"{member_ids} vs {c.fact_ids}"))
            continue
        members = c.facts
        mean = sum(f.relevance for f in members) / Decimal(len(members))
        if abs(c.relevance - mean) > _REL_TOL:
            out(Violation(path + ".relevance", "not the member mean", f"{c.relevance} vs {mean}"))
        ranked = sorted(members, key=lambda f: (-f.relevance, id_sort_key(f.id)))
        if c.representative_fact_id != ranked[0].id:
            out(Violation(path + ".representative_fact_id", "not the most relevant member", c.representative_fact_id))
        expected_top = [f.id for f in ranked[: min(3, len(ranked))]]
        if list(c.top_fact_ids) != expected_top:
            out(Violation(path + ".top_fact_ids", "wrong top facts", f"{c.top_fact_ids} vs {expected_top}"))

        covered: list[str] = []
        for si, s in enumerate(c.fact_sets):
            spath = f"{path}.fact_sets[{si}]"
            if s.id in fact_sets:
                out(Violation(spath + ".id", "duplicate fact set id", s.id))
            fact_sets[s.id] = s
            if s.cluster_id != c.id:
                out(Violation(spath + ".cluster_id", "unresolved reference", s.cluster_id))
            if not s.fact_ids:
                out(Violation(spath + ".fact_ids", "empty fact set", "[]"))
            for fid in s.fact_ids:
                if fid not in member_ids:
                    out(Violation(spath + ".fact_ids", "unresolved reference", fid))
                covered.append(fid)
        if sorted(covered) != sorted(member_ids):
            out(Violation(path + ".fact_sets", "fact sets do not partition cluster facts", f"{sorted(covered)} vs {sorted(member_ids)}"))

    # cluster ordering: relevance non-increasing, ties by lower id
    order = [(c.relevance, c.id) for c in doc.clusters]
    for i in range(1, len(order)):
        prev, cur = order[i - 1], order[i]
        if cur[0] > prev[0] or (cur[0] == prev[0] and id_sort_key(cur[1]) < id_sort_key(prev[1])):
            out(Violation(f"clusters[{i}]", "cluster ordering", f"{cur[1]} ({cur[0]}) after {prev[1]} ({prev[0]})"))

    cluster_ids = [c.id for c in doc.clusters]
    cluster_pos = {cid: i for i, cid in enumerate(cluster_ids)}

    # units: grouped by cluster in document order, contiguous order_in_cluster
    sets_used: dict[str, list[str]] = {cid: [] for cid in cluster_ids}
    last_cluster = -1
    next_order = 0
    for ui, u in enumerate(doc.units):
        path = f"units[{ui}]"
        if u.cluster_id not in cluster_pos:
            out(Violation(path + ".cluster_id", "unresolved reference", u.cluster_id))
            continue
        pos = cluster_pos[u.cluster_id]
        if pos != last_cluster:
            if pos < last_cluster:
                out(Violation(path, "unit cluster ordering", f"{u.cluster_id} after cluster index {last_cluster}"))
            last_cluster = pos
            next_order = 0
        if u.order_in_cluster != next_order:
            out(Violation(path + ".order_in_cluster", "non-contiguous unit order", f"{u.order_in_cluster} expected {next_order}"))
        next_order += 1

        member_sets = []
        broken = False
        for sid in u.fact_set_ids:
            s = fact_sets.get(sid)
            if s is None or s.cluster_id != u.cluster_id:
                out(Violation(path + ".fact_set_ids", "unresolved reference", sid))
                broken = True
                continue
            member_sets.append(s)
            sets_used[u.cluster_id].append(sid)
        if broken or not member_sets:
            continue

        member_facts = [facts[fid] for s in member_sets for fid in s.fact_ids if fid in facts]
        expected_articles = sorted({f.article_id for f in member_facts}, key=id_sort_key)
        if list(u.source_article_ids) != expected_articles:
            out(Violation(path + ".source_article_ids", "not the union of member article ids", f"{u.source_article_ids} vs {expected_articles}"))

        if len(u.title.split()) > 8:
            out(Violation(path + ".title", "title longer than eight words", u.title))

        if sanitize_caption(u.caption_html) != u.caption_html:
            out(Violation(path + ".caption_html", "caption not sanitized", u.caption_html[:80]))

        points = chart_points(member_sets, facts)
        highlights = extract_highlights(u.caption_html)
        chart = u.chart
        if chart.kind not in CHART_KINDS:
            out(Violation(path + ".chart.kind", "unknown chart kind", chart.kind))
        colors_caption = sorted(h.color_index for h in highlights)
        colors_chart = sorted(s.color_index for s in chart.series)
        if colors_caption != colors_chart:
            out(Violation(path + ".caption_html", "caption and chart colors disagree", f"{colors_caption} vs {colors_chart}"))
        if len(set(colors_chart)) != len(colors_chart):
            out(Violation(path + ".chart.series", "repeated color index", str(colors_chart)))
        if chart.kind == "pie" and any(s.value < 0 for s in chart.series):
            out(Violation(path + ".chart.series", "negative pie part", str([str(s.value) for s in chart.series])))
        if chart.kind in ("line", "range"):
            keys = [s.series_key if s.series_key else s.label for s in chart.series]
            if not all(key_is_ordinal(k) for k in keys):
                out(Violation(path + ".chart.series", "non-orderable series keys", str(keys)))

        by_color = {s.color_index: s for s in chart.series}
        for h in highlights:
            s = by_color.get(h.color_index)
            if s is None:
                continue
            if not highlight_matches_value(h.text, s.value, s.unit):
                out(Violation(path + ".caption_html", "highlight does not denote its data point", f"hl-{h.color_index}: {h.text!r}"))
        point_mags = [(p.value, p.unit) for p in points]
        for s in chart.series:
            if not any(s.value == pv and s.unit == pu for pv, pu in point_mags):
                out(Violation(path + ".chart.series", "series value not among unit data points", f"{s.value} {s.unit}"))

        candidate = MergedFactSet(
            id="check",
            cluster_id=u.cluster_id,
            fact_set_ids=list(u.fact_set_ids),
            merged_content="",
            unit_family="",
        )
        for mv in check_merge_constraints(candidate, fact_sets, facts, articles):
            out(Violation(path, f"merge constraint: {mv.kind}", mv.detail))

    for cid, used in sets_used.items():
        all_sets = [s.id for c in doc.clusters if c.id == cid for s in c.fact_sets]
        if sorted(used) != sorted(all_sets):
            out(Violation(f"units[cluster={cid}]", "units do not partition cluster fact sets", f"{sorted(used)} vs {sorted(all_sets)}"))

    # links: recompute intersections from fact provenance
    article_sets = {c.id: {f.article_id for f in c.facts} for c in doc.clusters}
    expected_links = {}
    for i, a in enumerate(cluster_ids):
        for b in cluster_ids[i + 1 :]:
            shared = article_sets[a] & article_sets[b]
            if shared:
                key = tuple(sorted((a, b), key=id_sort_key))
                expected_links[key] = sorted(shared, key=id_sort_key)
    seen_pairs = set()
    for li, ln in enumerate(doc.links):
        path = f"links[{li}]"
        pair = tuple(sorted((ln.cluster_a, ln.cluster_b), key=id_sort_key))
        if ln.cluster_a == ln.cluster_b:
            out(Violation(path, "self link", ln.cluster_a))
            continue
        if ln.cluster_a not in cluster_pos or ln.cluster_b not in cluster_pos:
            out(Violation(path, "unresolved reference", f"{ln.cluster_a},{ln.cluster_b}"))
            continue
        if pair in seen_pairs:
            out(Violation(path, "duplicate link", str(pair)))
        seen_pairs.add(pair)
        expected = expected_links.get(pair)
        if expected is None:
            out(Violation(path, "link without shared articles", str(pair)))
        elif sorted(ln.shared_article_ids, key=id_sort_key) != expected:
            out(Violation(path + ".shared_article_ids", "wrong shared articles", f"{ln.shared_article_ids} vs {expected}"))
    for pair in expected_links:
        if pair not in seen_pairs:
            out(Violation("links", "missing link", str(pair)))

    expected_stats = compute_summary_stats(doc.articles, doc.clusters)
    if doc.stats != expected_stats:
        out(Violation("stats", "stats do not match recomputation", f"{doc.stats} vs {expected_stats}"))

    return v
