"""Article text to validated facts.

Four LLM-backed phases per article: two-pass paragraph filtering (boilerplate
against the title, then relevance against the query), sentence-level fact
identification, data-point extraction, and an iterative validate/refine loop
bounded at three rounds. Facts still flagged when the loop exits are dropped
and counted rather than shipped wrong.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from decimal import Decimal, InvalidOperation
from typing import Optional

from ..model import Article, DataPoint, Fact
from ..providers.llm import StructuredRequest, build_prompt
from .quantity import find_quantities

logger = logging.getLogger(__name__)

# prompts stay under typical context limits with at most this many paragraphs
FILTER_BATCH_SIZE = 20

MAX_REFINE_ITERATIONS = 3

_FILTER_TITLE_INSTRUCTIONS = (
    "The text blocks below were scraped from one web article. Using the article "
    "title as the signal for what belongs, list the indices of blocks that are "
    "body content, excluding headers, footers, navigation, references, and ads."
)
_FILTER_QUERY_INSTRUCTIONS = (
    "List the indices of paragraphs that are relevant to the research query; "
    "drop paragraphs that cannot help answer it."
)
_IDENTIFY_INSTRUCTIONS = (
    "Extract sentence- or phrase-level data facts from the paragraph: statements "
    "carrying at least one numeric measurement, count, or statistic about the "
    "subject. Exclude subjective opinions and statements whose only number is a "
    "date. Quantifiable fact types include absolute values, changes over time, "
    "proportions, rankings by measure, extremes, and distributions; a categorical "
    "statement without a measured quantity does not qualify. Keep each fact's "
    "wording faithful to the source."
)
_EXTRACT_INSTRUCTIONS = (
    "For each numeric value in the fact, produce one data point with a short "
    "label, the value, and its unit. Give related values a shared series key "
    "(for example the year each belongs to). Resolve relative time expressions "
    "like 'this year' against the article's publication year."
)
_VALIDATE_INSTRUCTIONS = (
    "Check each fact against its source paragraph for correctness, consistency, "
    "and completeness: wrong or unsupported values, numeric claims missing a "
    "data point, and units mixed inside one fact. Report an issue per problem "
    "with a suggested fix."
)
_REFINE_INSTRUCTIONS = (
    "Apply minimal edits fixing exactly the reported issues: correct flagged "
    "values, add missing data points, normalize units, and restate content only "
    "when it misquotes the source. Leave everything else untouched."
)


@dataclass(frozen=True)
class FilteredParagraph:
    article_id: str
    paragraph_index: int
    text: str
    title_pass: bool
    query_pass: bool

    @property
    def retained(self) -> bool:
        return self.title_pass and self.query_pass


@dataclass(frozen=True)
class ValidationIssue:
    fact_id: str
    kind: str
    detail: str
    suggested_fix: str


def _batched(items: list, size: int) -> list[list]:
    return [items[i : i + size] for i in range(0, len(items), size)]


def filter_paragraphs(article: Article, query: str, llm) -> list[FilteredParagraph]:
    """Two LLM passes over the article's paragraphs; indices and order kept."""
    indexed = [{"index": i, "text": t} for i, t in enumerate(article.paragraphs)]
    if not indexed:
        return []

    title_kept: set[int] = set()
    for batch in _batched(indexed, FILTER_BATCH_SIZE):
        req = StructuredRequest(
            task_name="filter_title",
            prompt=build_prompt(_FILTER_TITLE_INSTRUCTIONS, {"title": article.title, "paragraphs": batch}),
            schema_name="paragraph_filter",
        )
        title_kept.update(llm.complete_structured(req)["keep_indices"])

    survivors = [p for p in indexed if p["index"] in title_kept]
    query_kept: set[int] = set()
    for batch in _batched(survivors, FILTER_BATCH_SIZE):
        req = StructuredRequest(
            task_name="filter_query",
            prompt=build_prompt(_FILTER_QUERY_INSTRUCTIONS, {"query": query, "paragraphs": batch}),
            schema_name="paragraph_filter",
        )
        query_kept.update(llm.complete_structured(req)["keep_indices"])

    return [
        FilteredParagraph(
            article_id=article.id,
            paragraph_index=p["index"],
            text=p["text"],
            title_pass=p["index"] in title_kept,
            query_pass=p["index"] in title_kept and p["index"] in query_kept,
        )
        for p in indexed
    ]


def identify_facts(paragraph: FilteredParagraph, article_title: str, llm) -> list[Fact]:
    """Quantifiable fact contents from one retained paragraph, data points empty.

    A deterministic post-filter drops anything whose only numbers are bare
    years: a date alone is not a measured quantity.
    """
    req = StructuredRequest(
        task_name="identify_facts",
        prompt=build_prompt(
            _IDENTIFY_INSTRUCTIONS,
            {"title": article_title, "paragraph": paragraph.text},
        ),
        schema_name="fact_identification",
    )
    doc = llm.complete_structured(req)
    facts: list[Fact] = []
    position = 0
    for item in doc["facts"]:
        content = item["content"].strip()
        tokens = find_quantities(content)
        if not tokens:
            logger.warning("identified fact has no numeric token, skipping: %r", content[:60])
            continue
        if all(t.year for t in tokens):
            continue
        facts.append(
            Fact(
                id=f"{paragraph.article_id}.{paragraph.paragraph_index}.{position}",
                article_id=paragraph.article_id,
                paragraph_index=paragraph.paragraph_index,
                content=content,
                data_points=[],
                relevance=Decimal(0),
                status="extracted",
            )
        )
        position += 1
    return facts


def _parse_points(raw_points: list[dict]) -> Optional[list[DataPoint]]:
    points = []
    for p in raw_points:
        try:
            value = Decimal(str(p["value"]))
        except (InvalidOperation, KeyError):
            return None
        if not value.is_finite():
            return None
        points.append(
            DataPoint(
                label=str(p.get("label", "")) or "Value",
                value=value,
                unit=str(p.get("unit", "")),
                series_key=p.get("series_key"),
            )
        )
    return points


def extract_data_points(fact: Fact, article: Article, llm) -> Optional[Fact]:
    """Populate the fact's data points; None when its numbers cannot be parsed."""
    req = StructuredRequest(
        task_name="extract_data_points",
        prompt=build_prompt(
            _EXTRACT_INSTRUCTIONS,
            {
                "content": fact.content,
                "article": {"title": article.title, "published_year": article.published_year},
            },
        ),
        schema_name="data_points",
    )
    doc = llm.complete_structured(req)
    points = _parse_points(doc["data_points"])
    if not points:
        logger.warning("fact %s: no parseable data points, dropped", fact.id)
        return None
    return replace(fact, data_points=points)


def _facts_payload(facts: list[Fact]) -> list[dict]:
    return [
        {
            "id": f.id,
            "content": f.content,
            "data_points": [
                {"label": p.label, "value": str(p.value), "unit": p.unit, "series_key": p.series_key}
                for p in f.data_points
            ],
        }
        for f in facts
    ]


def validate_extraction(facts: list[Fact], source_paragraphs: dict[str, str], llm) -> list[ValidationIssue]:
    """One validation pass; issues are keyed to fact ids and carry fixes."""
    if not facts:
        return []
    req = StructuredRequest(
        task_name="validate_facts",
        prompt=build_prompt(
            _VALIDATE_INSTRUCTIONS,
            {"facts": _facts_payload(facts), "sources": source_paragraphs},
        ),
        schema_name="validation_issues",
    )
    doc = llm.complete_structured(req)
    known = {f.id for f in facts}
    return [
        ValidationIssue(i["fact_id"], i["kind"], i["detail"], i["suggested_fix"])
        for i in doc["issues"]
        if i["fact_id"] in known
    ]


def refine_extraction(
    facts: list[Fact],
    issues: list[ValidationIssue],
    source_paragraphs: dict[str, str],
    published_years: dict[str, int],
    llm,
) -> list[Fact]:
    """Apply fixes to flagged facts only; unflagged facts pass through untouched."""
    flagged_ids = {i.fact_id for i in issues}
    if not flagged_ids:
        return facts
    flagged = [f for f in facts if f.id in flagged_ids]
    req = StructuredRequest(
        task_name="refine_facts",
        prompt=build_prompt(
            _REFINE_INSTRUCTIONS,
            {
                "facts": _facts_payload(flagged),
                "issues": [
                    {"fact_id": i.fact_id, "kind": i.kind, "detail": i.detail, "suggested_fix": i.suggested_fix}
                    for i in issues
                ],
                "sources": {f.id: source_paragraphs[f.id] for f in flagged},
                "published_years": {f.id: published_years.get(f.id, 0) for f in flagged},
            },
        ),
        schema_name="refined_facts",
    )
    doc = llm.complete_structured(req)
    revised = {item["id"]: item for item in doc["facts"]}
    out = []
    for f in facts:
        if f.id not in revised:
            out.append(f)
            continue
        item = revised[f.id]
        points = _parse_points(item.get("data_points", []))
        if points is None:
            out.append(f)
            continue
        out.append(replace(f, content=item.get("content", f.content), data_points=points))
    return out


def extract_article_facts(
    article: Article, query: str, llm, max_iterations: int = MAX_REFINE_ITERATIONS
) -> tuple[list[Fact], int]:
    """Full extraction for one article: (surviving facts, dropped count).

    Survivors leave with status "refined"; ids are article-scoped and get
    renumbered once all articles are merged.
    """
    paragraphs = filter_paragraphs(article, query, llm)
    facts: list[Fact] = []
    for para in paragraphs:
        if not para.retained:
            continue
        for fact in identify_facts(para, article.title, llm):
            extracted = extract_data_points(fact, article, llm)
            if extracted is not None:
                facts.append(extracted)

    sources = {f.id: article.paragraphs[f.paragraph_index] for f in facts}
    years = {f.id: article.published_year for f in facts}

    issues = validate_extraction(facts, sources, llm)
    rounds = 0
    while issues and rounds < max_iterations:
        facts = refine_extraction(facts, issues, sources, years, llm)
        issues = validate_extraction(facts, sources, llm)
        rounds += 1

    dropped = 0
    if issues:
        still_flagged = {i.fact_id for i in issues}
        dropped = sum(1 for f in facts if f.id in still_flagged)
        logger.warning("article %s: dropping %d facts still flagged after %d rounds", article.id, dropped, rounds)
        facts = [f for f in facts if f.id not in still_flagged]

    return [replace(f, status="refined") for f in facts], dropped
