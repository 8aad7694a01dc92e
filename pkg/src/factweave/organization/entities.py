"""Entity detection and missing-entity filling across merged fact sets.

Facts extracted at sentence level often drop context the source article had
(a country, a year, the measured subject). Entity kinds present in one
member of a merged group but absent in another are flagged, and an LLM pass
over the source article fills what it can confirm; unresolvable flags leave
the fact untouched.

Detection is LLM-prompted in live mode and gazetteer/regex-driven in mock
mode, where determinism matters more than recall.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, replace
from typing import Optional

from ..model import Article, Fact, FactSet, MergedFactSet
from ..providers.llm import StructuredRequest, build_prompt

logger = logging.getLogger(__name__)

ENTITY_KINDS = ("GPE", "DATE", "ORG", "PERSON", "PERCENT", "MONEY", "QUANTITY", "CARDINAL", "OTHER")

# kinds worth filling from the source article; counts and percents are the
# fact's own payload, not omitted context
FILLABLE_KINDS = ("GPE", "DATE")

MAX_FILL_ITERATIONS = 3


@dataclass(frozen=True)
class Entity:
    text: str
    kind: str
    span: tuple[int, int]


# article-bearing forms keep their article when appended to a sentence
_GPE_GAZETTEER = {
    "u.s.": "the U.S.",
    "u.s": "the U.S.",
    "us": None,  # too ambiguous as a bare token
    "usa": "the USA",
    "united states": "the United States",
    "america": "America",
    "u.k.": "the U.K.",
    "uk": "the U.K.",
    "united kingdom": "the United Kingdom",
    "singapore": "Singapore",
    "sweden": "Sweden",
    "australia": "Australia",
    "canada": "Canada",
    "china": "China",
    "india": "India",
    "europe": "Europe",
    "florida": "Florida",
    "california": "California",
    "texas": "Texas",
    "north carolina": "North Carolina",
    "new york": "New York",
}

_ORG_SUFFIXES = ("Bureau", "Center", "Centre", "Department", "Institute", "Association", "University", "Agency")

_PERCENT_RE = re.compile(r"\d+(?:\.\d+)?\s*(?:%|percent\b|per\s+cent\b)", re.I)
_MONEY_RE = re.compile(r"[$€£]\s*\d[\d,.]*(?:\s*(?:thousand|million|billion|trillion))?", re.I)
_YEAR_RE = re.compile(r"\b(?:19|20)\d{2}\b")
_QUANTITY_RE = re.compile(r"\d[\d,.]*\s*(?:thousand|million|billion|trillion)\b|\d[\d,.]*[KkMB]\b")
_CARDINAL_RE = re.compile(r"\b\d[\d,.]*\b")
_ORG_RE = re.compile(r"\b(?:[A-Z][a-z]+\s+)+(?:%s)\b" % "|".join(_ORG_SUFFIXES))
_DATE_WORD_RE = re.compile(
    r"\b(?:past|last)\s+decade\b|\b(?:January|February|March|April|May|June|July|August|September|October|November|December)\b"
)


def rule_based_entities(text: str) -> list[Entity]:
    """Deterministic NER: gazetteer GPEs plus regex dates, percents, money, counts."""
    found: list[Entity] = []
    claimed: list[tuple[int, int]] = []

    def claim(start: int, end: int, kind: str, surface: str) -> None:
        for s, e in claimed:
            if not (end <= s or e <= start):
                return
        claimed.append((start, end))
        found.append(Entity(surface, kind, (start, end)))

    lowered = text.lower()
    for name in sorted(_GPE_GAZETTEER, key=len, reverse=True):
        start = 0
        while True:
            idx = lowered.find(name, start)
            if idx == -1:
                break
            end = idx + len(name)
            boundary_ok = (idx == 0 or not lowered[idx - 1].isalnum()) and (
                end == len(text) or not lowered[end : end + 1].isalnum()
            )
            if boundary_ok and _GPE_GAZETTEER[name] is not None:
                claim(idx, end, "GPE", text[idx:end])
            start = end
    for m in _PERCENT_RE.finditer(text):
        claim(m.start(), m.end(), "PERCENT", m.group(0))
    for m in _MONEY_RE.finditer(text):
        claim(m.start(), m.end(), "MONEY", m.group(0))
    for m in _ORG_RE.finditer(text):
        claim(m.start(), m.end(), "ORG", m.group(0))
    for m in _YEAR_RE.finditer(text):
        claim(m.start(), m.end(), "DATE", m.group(0))
    for m in _DATE_WORD_RE.finditer(text):
        claim(m.start(), m.end(), "DATE", m.group(0))
    for m in _QUANTITY_RE.finditer(text):
        claim(m.start(), m.end(), "QUANTITY", m.group(0))
    for m in _CARDINAL_RE.finditer(text):
        claim(m.start(), m.end(), "CARDINAL", m.group(0))
    return sorted(found, key=lambda e: e.span)


def find_entity_of_kind(text: str, kind: str, prefer: Optional[list[str]] = None) -> Optional[str]:
    """Surface form of the kind in the text, rendered for appending to a sentence.

    When sibling facts already name values (``prefer``), only a confirmation
    of one of those values counts: inferring a different entity than the rest
    of the merged group states would change the claim, not complete it. GPE
    results come back with their customary article ("in the U.S.").
    """
    entities = [e for e in rule_based_entities(text) if e.kind == kind]
    if not entities:
        return None

    def render(e: Entity) -> str:
        if e.kind == "GPE":
            surface = _GPE_GAZETTEER.get(e.text.lower(), e.text) or e.text
            return f"in {surface}"
        if e.kind == "DATE":
            return f"in {e.text}" if _YEAR_RE.fullmatch(e.text) else e.text
        return e.text

    if prefer:
        wanted = {re.sub(r"^(the|in)\s+", "", v.lower().strip()) for v in prefer}
        for e in entities:
            if e.text.lower().strip() in wanted:
                return render(e)
        return None
    return render(entities[0])


def detect_entities(text: str, llm=None) -> list[Entity]:
    """Entities of the fixed kind enum; precondition: non-empty text."""
    if not text.strip():
        raise ValueError("detect_entities requires non-empty text")
    if llm is None:
        return rule_based_entities(text)
    req = StructuredRequest(
        task_name="detect_entities",
        prompt=build_prompt(
            "Identify named entities in the text. Classify each as one of "
            "GPE, DATE, ORG, PERSON, PERCENT, MONEY, QUANTITY, CARDINAL, OTHER "
            "and report exact character offsets.",
            {"text": text},
        ),
        schema_name="entity_detection",
    )
    doc = llm.complete_structured(req)
    out = []
    for e in doc["entities"]:
        start, end = int(e["start"]), int(e["end"])
        if 0 <= start < end <= len(text):
            out.append(Entity(e["text"], e["kind"], (start, end)))
    return out


def fill_missing_entities(
    merged: MergedFactSet,
    fact_sets_by_id: dict[str, FactSet],
    facts_by_id: dict[str, Fact],
    articles_by_id: dict[str, Article],
    llm,
) -> dict[str, Fact]:
    """Fill entity kinds present in some member facts but missing in others.

    Returns replacements keyed by fact id; facts whose article never names
    the entity stay unchanged (logged). Each filled fact is re-checked: if
    the appended entity still is not detected, the change is discarded.
    """
    member_facts: list[Fact] = []
    for sid in merged.fact_set_ids:
        for fid in fact_sets_by_id[sid].fact_ids:
            member_facts.append(facts_by_id[fid])
    if len(member_facts) < 2:
        return {}

    kinds_by_fact = {f.id: {e.kind for e in rule_based_entities(f.content)} for f in member_facts}
    values_by_kind: dict[str, list[str]] = {}
    for f in member_facts:
        for e in rule_based_entities(f.content):
            values_by_kind.setdefault(e.kind, [])
            if e.text not in values_by_kind[e.kind]:
                values_by_kind[e.kind].append(e.text)

    replacements: dict[str, Fact] = {}
    for kind in FILLABLE_KINDS:
        have = [f for f in member_facts if kind in kinds_by_fact[f.id]]
        lack = [f for f in member_facts if kind not in kinds_by_fact[f.id]]
        if not have or not lack:
            continue
        for fact in lack:
            article = articles_by_id.get(fact.article_id)
            if article is None:
                continue
            current = replacements.get(fact.id, fact)
            filled = _fill_one(current, kind, values_by_kind.get(kind, []), article, llm)
            if filled is None:
                logger.info("no %s found in %s for fact %s; left unchanged", kind, article.id, fact.id)
                continue
            # an appended entity (a year especially) may change the fact's
            # time profile; keep the fill only if the merge still stands
            trial = dict(facts_by_id)
            trial.update(replacements)
            trial[fact.id] = filled
            from .merging import check_merge_constraints

            if check_merge_constraints(merged, fact_sets_by_id, trial, articles_by_id):
                logger.info("fill of %s in fact %s would break the merge; reverted", kind, fact.id)
                continue
            replacements[fact.id] = filled
    return replacements


def _fill_one(fact: Fact, kind: str, known_values: list[str], article: Article, llm) -> Optional[Fact]:
    req = StructuredRequest(
        task_name="fill_entity",
        prompt=build_prompt(
            f"The fact below omits a {kind} entity that sibling facts state. "
            "Infer it from the source article only; answer null when the article "
            "does not name one. Return the fact content with the entity appended.",
            {
                "fact_content": fact.content,
                "missing_kind": kind,
                "known_values": known_values,
                "article_paragraphs": article.paragraphs,
            },
        ),
        schema_name="entity_fill",
    )
    for _ in range(MAX_FILL_ITERATIONS):
        doc = llm.complete_structured(req)
        filled = doc.get("filled_content")
        if not filled:
            return None
        if kind in {e.kind for e in rule_based_entities(filled)}:
            return replace(fact, content=filled)
    return None
