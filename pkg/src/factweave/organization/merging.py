"""Fact-set merging and its deterministic constraint guard.

An LLM proposes which fact sets belong in one narrative; every proposal is
then re-checked here against hard rules (shared unit family, compatible time
frames, one chartable axis) and rejected proposals fall back to singleton
merges. Thematic cohesion is the only constraint left to LLM judgment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Optional

from ..extraction.quantity import is_year
from ..ids import IdAllocator, id_sort_key
from ..model import Article, DataPoint, Fact, FactSet, MergedFactSet

__all__ = [
    "MergeViolation",
    "unit_family",
    "time_profile",
    "canonical_fact",
    "chart_points",
    "check_merge_constraints",
    "key_is_ordinal",
    "merge_fact_sets",
    "merged_time_frame",
]

_CURRENCIES = "$€£"
_SCALE_WORDS = {"thousand", "million", "billion", "trillion"}


@dataclass(frozen=True)
class MergeViolation:
    kind: str  # unit_family | time_frame | axis
    detail: str


def unit_family(unit: str) -> str:
    """Coarse unit families; merges across families are always rejected.

    Families: "%", count-scale words, per-symbol currency, verbatim physical
    measures, and unitless.
    """
    u = unit.strip()
    if not u:
        return "unitless"
    if u == "%" or u.endswith("%"):
        return "%"
    if u[0] in _CURRENCIES:
        return f"currency:{u[0]}"
    first = u.split()[0]
    if first in _SCALE_WORDS:
        return "count"
    return f"measure:{u.lower()}"


# --- time frames --------------------------------------------------------------

_RANGE_RES = [
    re.compile(r"\bfrom\s+((?:19|20)\d{2})\s+(?:to|until|through)\s+((?:19|20)\d{2})", re.I),
    re.compile(r"\bbetween\s+((?:19|20)\d{2})\s+and\s+((?:19|20)\d{2})", re.I),
    re.compile(r"\b((?:19|20)\d{2})\s*[–—-]\s*((?:19|20)\d{2})"),
]
_DECADE_RE = re.compile(r"\b(?:over\s+the\s+)?(?:past|last)\s+decade\b|\bover\s+the\s+decade\b", re.I)
_YEAR_TOKEN_RE = re.compile(r"\b((?:19|20)\d{2})\b")

# spans of three years or fewer read as short-term trends; longer ones as
# long-term patterns, and the two never merge
_SHORT_SPAN_YEARS = 3


@dataclass(frozen=True)
class TimeProfile:
    kind: str  # point | span
    start: int
    end: int

    @property
    def granularity(self) -> str:
        return "year" if (self.end - self.start) <= _SHORT_SPAN_YEARS else "decade"


def _range_key_span(key: str) -> Optional[tuple[int, int]]:
    for rx in _RANGE_RES:
        m = rx.search(key)
        if m:
            a, b = int(m.group(1)), int(m.group(2))
            return (min(a, b), max(a, b))
    return None


def time_profile(contents: list[str], points: list[DataPoint], anchor_year: int = 0) -> Optional[TimeProfile]:
    """Temporal footprint of one claim: a point year, a span, or nothing.

    Explicit ranges ("from 1999 to 2020", "2010-2020", "past decade") win
    over loose year mentions; multiple point years widen into a span.
    """
    spans: list[tuple[int, int]] = []
    years: set[int] = set()

    for p in points:
        if p.series_key:
            if is_year(p.series_key):
                years.add(int(p.series_key))
            else:
                span = _range_key_span(p.series_key)
                if span:
                    spans.append(span)
    for text in contents:
        remaining = text
        for rx in _RANGE_RES:
            for m in rx.finditer(text):
                a, b = int(m.group(1)), int(m.group(2))
                spans.append((min(a, b), max(a, b)))
                remaining = remaining.replace(m.group(0), " ")
        if _DECADE_RE.search(text) and anchor_year:
            spans.append((anchor_year - 10, anchor_year))
        for m in _YEAR_TOKEN_RE.finditer(remaining):
            years.add(int(m.group(1)))

    if spans:
        start = min(s for s, _ in spans)
        end = max(e for _, e in spans)
        return TimeProfile("span", start, end)
    if len(years) == 1:
        y = years.pop()
        return TimeProfile("point", y, y)
    if len(years) >= 2:
        return TimeProfile("span", min(years), max(years))
    return None


def _profiles_compatible(a: Optional[TimeProfile], b: Optional[TimeProfile]) -> bool:
    if a is None or b is None:
        return True
    if a.kind == "point" and b.kind == "point":
        return True
    if a.kind == "span" and b.kind == "span":
        overlap = not (a.end < b.start or b.end < a.start)
        return overlap and a.granularity == b.granularity
    return False


# --- chartable points ---------------------------------------------------------


def canonical_fact(fact_set: FactSet, facts_by_id: dict[str, Fact]) -> Fact:
    """The member that speaks for a fact set: highest relevance, then lowest id."""
    members = sorted(
        (facts_by_id[fid] for fid in fact_set.fact_ids),
        key=lambda f: (-f.relevance, id_sort_key(f.id)),
    )
    return members[0]


def chart_points(fact_sets: list[FactSet], facts_by_id: dict[str, Fact]) -> list[DataPoint]:
    """Data points behind one narrative: each set's canonical fact, in set order.

    Paraphrase duplicates inside a set collapse to one copy; conflicting sets
    stay separate and so keep both values visible.
    """
    out: list[DataPoint] = []
    for fs in fact_sets:
        out.extend(canonical_fact(fs, facts_by_id).data_points)
    return out


def _axis_key(p: DataPoint) -> str:
    return p.series_key if p.series_key else p.label


def key_is_ordinal(key: str) -> bool:
    k = key.strip()
    if is_year(k):
        return True
    if _range_key_span(k):
        return True
    try:
        Decimal(k.replace(",", ""))
        return True
    except Exception:
        return False


def check_merge_constraints(
    candidate: MergedFactSet,
    fact_sets_by_id: dict[str, FactSet],
    facts_by_id: dict[str, Fact],
    articles_by_id: Optional[dict[str, Article]] = None,
) -> list[MergeViolation]:
    """Deterministic re-check of a proposed merge.

    Flags unit-family mixing, incompatible time frames (point vs span, or
    spans of different granularity), and series keys that cannot share one
    ordinal or categorical axis. Thematic relevance is not re-checked here.
    """
    violations: list[MergeViolation] = []
    member_sets = [fact_sets_by_id[sid] for sid in candidate.fact_set_ids]
    articles_by_id = articles_by_id or {}

    families: list[str] = []
    for fs in member_sets:
        for fid in fs.fact_ids:
            for p in facts_by_id[fid].data_points:
                fam = unit_family(p.unit)
                if fam not in families:
                    families.append(fam)
    if len(families) > 1:
        violations.append(MergeViolation("unit_family", f"mixed unit families: {', '.join(families)}"))

    profiles: list[tuple[str, Optional[TimeProfile]]] = []
    for fs in member_sets:
        members = [facts_by_id[fid] for fid in fs.fact_ids]
        anchor = 0
        for f in members:
            art = articles_by_id.get(f.article_id)
            if art is not None and art.published_year:
                anchor = art.published_year
                break
        profile = time_profile(
            [f.content for f in members],
            [p for f in members for p in f.data_points],
            anchor_year=anchor,
        )
        profiles.append((fs.id, profile))
    for i in range(len(profiles)):
        for j in range(i + 1, len(profiles)):
            (id_a, a), (id_b, b) = profiles[i], profiles[j]
            if not _profiles_compatible(a, b):
                violations.append(
                    MergeViolation("time_frame", f"{id_a} and {id_b} cover incompatible time frames")
                )

    points = chart_points(member_sets, facts_by_id)
    kinds = {key_is_ordinal(_axis_key(p)) for p in points}
    if len(kinds) > 1:
        violations.append(MergeViolation("axis", "series keys mix ordinal and categorical values"))

    return violations


def merged_time_frame(
    fact_sets: list[FactSet],
    facts_by_id: dict[str, Fact],
    articles_by_id: Optional[dict[str, Article]] = None,
) -> Optional[tuple[int, int]]:
    """Envelope of the member time profiles, if any carry one."""
    articles_by_id = articles_by_id or {}
    bounds: list[tuple[int, int]] = []
    for fs in fact_sets:
        members = [facts_by_id[fid] for fid in fs.fact_ids]
        anchor = 0
        for f in members:
            art = articles_by_id.get(f.article_id)
            if art is not None and art.published_year:
                anchor = art.published_year
                break
        profile = time_profile(
            [f.content for f in members],
            [p for f in members for p in f.data_points],
            anchor_year=anchor,
        )
        if profile is not None:
            bounds.append((profile.start, profile.end))
    if not bounds:
        return None
    return (min(s for s, _ in bounds), max(e for _, e in bounds))


def merge_fact_sets(
    cluster_id: str,
    fact_sets: list[FactSet],
    facts_by_id: dict[str, Fact],
    articles_by_id: dict[str, Article],
    proposals: list[list[str]],
    ids: IdAllocator,
) -> list[MergedFactSet]:
    """Turn proposed groupings into constraint-clean merged fact sets.

    ``proposals`` is the LLM's partition of fact-set ids. Unknown or repeated
    ids invalidate a group (its members fall back to singletons); any group
    failing the deterministic guard is split back into singletons too. The
    result always partitions the input fact sets.
    """
    by_id = {fs.id: fs for fs in fact_sets}
    remaining = [fs.id for fs in fact_sets]
    groups: list[list[str]] = []
    for group in proposals:
        valid = [sid for sid in group if sid in remaining]
        if len(valid) != len(group) or len(set(group)) != len(group):
            valid = []
        if not valid:
            continue
        for sid in valid:
            remaining.remove(sid)
        groups.append(valid)
    for sid in remaining:
        groups.append([sid])
    groups.sort(key=lambda g: min(id_sort_key(s) for s in g))

    merged: list[MergedFactSet] = []
    final_groups: list[list[str]] = []
    for group in groups:
        if len(group) == 1:
            final_groups.append(group)
            continue
        probe = MergedFactSet(
            id="probe",
            cluster_id=cluster_id,
            fact_set_ids=group,
            merged_content="",
            unit_family="",
            time_frame=None,
        )
        if check_merge_constraints(probe, by_id, facts_by_id, articles_by_id):
            final_groups.extend([[sid] for sid in group])
        else:
            final_groups.append(group)
    final_groups.sort(key=lambda g: min(id_sort_key(s) for s in g))

    for group in final_groups:
        sets = [by_id[sid] for sid in group]
        points = chart_points(sets, facts_by_id)
        family = unit_family(points[0].unit) if points else "unitless"
        merged.append(
            MergedFactSet(
                id=ids.next("m"),
                cluster_id=cluster_id,
                fact_set_ids=group,
                merged_content=" ".join(fs.canonical_content for fs in sets),
                unit_family=family,
                time_frame=merged_time_frame(sets, facts_by_id, articles_by_id),
            )
        )
    return merged
