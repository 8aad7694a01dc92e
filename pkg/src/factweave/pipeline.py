"""End-to-end story generation: retrieval -> extraction -> organization -> composition.

Per-article extraction runs on a small worker pool and is re-merged in
article order, so a seeded mock run is reproducible byte for byte. Stage
progress is reported through a callback using fixed stage weights
(retrieval 0.2, extraction 0.4, organization 0.25, composition 0.15).
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from decimal import Decimal
from pathlib import Path
from typing import Callable, Optional

from .extraction.pipeline import extract_article_facts
from .ids import IdAllocator, id_sort_key
from .model import Cluster, Fact, NarrativeUnit, StoryDocument
from .organization.clustering import (
    FACT_CAP,
    K_MAX,
    cluster_facts,
    label_clusters,
    score_and_cap_facts,
    select_representatives,
)
from .organization.entities import fill_missing_entities
from .organization.factsets import build_fact_sets, refresh_canonical_contents
from .organization.merging import MergedFactSet, merge_fact_sets
from .providers.config import ProviderConfig
from .providers.embed import make_embedder
from .providers.llm import StructuredRequest, build_prompt, make_llm
from .providers.pages import make_page_fetcher
from .providers.search import make_search_client
from .retrieval import (
    DEFAULT_MAX_ARTICLES,
    DEFAULT_PER_QUERY,
    DEFAULT_VARIANTS,
    expand_query,
    ingest_corpus,
    retrieve_articles,
)
from .storygen import (
    assemble_story,
    deterministic_story_id,
    generate_narrative,
    order_units_within_cluster,
    recommend_chart,
)

logger = logging.getLogger(__name__)

# fixed timestamp for mock runs so golden files are byte-stable
MOCK_CLOCK = "2025-01-01T00:00:00Z"

STAGE_WEIGHTS = {"retrieving": 0.2, "extracting": 0.4, "organizing": 0.25, "composing": 0.15}

EXTRACTION_WORKERS = 4

ProgressCallback = Callable[[str, float], None]


@dataclass
class PipelineConfig:
    mode: str = "mock"
    corpus_dir: Optional[Path] = None
    fixture_dir: Optional[Path] = None
    seed: int = 0
    n_variants: int = DEFAULT_VARIANTS
    per_query: int = DEFAULT_PER_QUERY
    max_articles: int = DEFAULT_MAX_ARTICLES
    k_max: int = K_MAX
    fact_cap: int = FACT_CAP
    debug_dir: Optional[Path] = None
    synthesize: bool = True

    def provider_config(self) -> ProviderConfig:
        return ProviderConfig(
            mode=self.mode,
            fixture_dir=Path(self.fixture_dir) if self.fixture_dir else None,
            synthesize=self.synthesize,
        )


@dataclass
class Providers:
    llm: object
    embedder: object
    search: object = None
    fetcher: object = None


def make_providers(config: PipelineConfig) -> Providers:
    pc = config.provider_config()
    providers = Providers(llm=make_llm(pc), embedder=make_embedder(pc))
    if config.corpus_dir is None:
        providers.search = make_search_client(pc)
        providers.fetcher = make_page_fetcher(pc)
    return providers


def _now(config: PipelineConfig) -> str:
    if config.mode == "mock":
        return MOCK_CLOCK
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _renumber_facts(facts_by_article: dict[str, list[Fact]], ids: IdAllocator) -> list[Fact]:
    """Article-scoped temp ids become f1.. in (article, paragraph, position) order."""
    merged: list[Fact] = []
    for article_id in sorted(facts_by_article, key=id_sort_key):
        merged.extend(facts_by_article[article_id])
    return [replace(f, id=ids.next("f")) for f in merged]


def _merge_proposals(cluster: Cluster, articles_by_id, llm) -> list[list[str]]:
    facts_by_id = {f.id: f for f in cluster.facts}
    payload_sets = []
    for fs in cluster.fact_sets:
        members = [facts_by_id[fid] for fid in fs.fact_ids]
        anchor = 0
        for f in members:
            article = articles_by_id.get(f.article_id)
            if article is not None and article.published_year:
                anchor = article.published_year
                break
        payload_sets.append(
            {
                "id": fs.id,
                "contents": [f.content for f in members],
                "points": [
                    {"label": p.label, "value": str(p.value), "unit": p.unit, "series_key": p.series_key}
                    for f in members
                    for p in f.data_points
                ],
                "anchor_year": anchor,
                "conflicting": fs.conflicting,
            }
        )
    req = StructuredRequest(
        task_name="merge_fact_sets",
        prompt=build_prompt(
            "Group these fact sets into merged narratives. Sets in one group must "
            "use the same measurement units, contribute to a cohesive story, share "
            "logically connected time frames, and chart on consistent x and y axes. "
            "Return groups as lists of fact set ids; every id exactly once.",
            {"cluster_id": cluster.id, "fact_sets": payload_sets},
        ),
        schema_name="merge_groups",
    )
    return llm.complete_structured(req)["groups"]


def generate_story(
    query: str, config: PipelineConfig, progress: Optional[ProgressCallback] = None
) -> StoryDocument:
    if not query.strip():
        raise ValueError("empty query")
    providers = make_providers(config)
    ids = IdAllocator()
    now = _now(config)

    def report(state: str, fraction: float) -> None:
        if progress:
            progress(state, min(1.0, max(0.0, fraction)))

    # --- retrieval ---
    report("retrieving", 0.0)
    expanded = expand_query(query, config.n_variants, providers.llm)
    if config.corpus_dir is not None:
        articles = ingest_corpus(config.corpus_dir, ids, now)
    else:
        articles = retrieve_articles(
            expanded,
            config.per_query,
            config.max_articles,
            providers.search,
            providers.fetcher,
            ids,
            now,
        )
    report("retrieving", STAGE_WEIGHTS["retrieving"])

    # --- extraction ---
    base = STAGE_WEIGHTS["retrieving"]
    span = STAGE_WEIGHTS["extracting"]
    report("extracting", base)
    done = 0
    facts_by_article: dict[str, list[Fact]] = {}
    dropped_total = 0

    def run_extraction(article):
        return article.id, extract_article_facts(article, query, providers.llm)

    with ThreadPoolExecutor(max_workers=EXTRACTION_WORKERS) as pool:
        for article_id, (article_facts, dropped) in pool.map(run_extraction, articles):
            facts_by_article[article_id] = article_facts
            dropped_total += dropped
            done += 1
            report("extracting", base + span * done / len(articles))
    facts = _renumber_facts(facts_by_article, ids)
    if dropped_total:
        logger.info("extraction dropped %d facts that never validated", dropped_total)

    # --- organization ---
    base += span
    span = STAGE_WEIGHTS["organizing"]
    report("organizing", base)
    articles_by_id = {a.id: a for a in articles}
    clusters: list[Cluster] = []
    merged_by_cluster: dict[str, list[MergedFactSet]] = {}
    merge_decisions: dict[str, dict] = {}
    debug = None
    if facts:
        embeddings = providers.embedder.embed_texts([f.content for f in facts])
        query_embedding = providers.embedder.embed_texts([query])[0]
        facts = score_and_cap_facts(facts, embeddings, query_embedding, cap=config.fact_cap)
        clusters, debug = cluster_facts(facts, config.seed, ids, k_max=config.k_max)
        clusters = label_clusters(clusters, providers.llm)
        clusters = [select_representatives(c) for c in clusters]
        report("organizing", base + span * 0.4)

        final_clusters = []
        for cluster in clusters:
            cluster = replace(cluster, fact_sets=build_fact_sets(cluster, providers.llm, ids))
            facts_by_id = {f.id: f for f in cluster.facts}
            proposals = _merge_proposals(cluster, articles_by_id, providers.llm)
            merged = merge_fact_sets(
                cluster.id, cluster.fact_sets, facts_by_id, articles_by_id, proposals, ids
            )
            merge_decisions[cluster.id] = {
                "proposals": proposals,
                "merged": [m.fact_set_ids for m in merged],
            }

            sets_by_id = {s.id: s for s in cluster.fact_sets}
            for m in merged:
                replacements = fill_missing_entities(
                    m, sets_by_id, facts_by_id, articles_by_id, providers.llm
                )
                facts_by_id.update(replacements)
            new_facts = [facts_by_id[f.id] for f in cluster.facts]
            new_sets = refresh_canonical_contents(cluster.fact_sets, facts_by_id)
            cluster = replace(cluster, facts=new_facts, fact_sets=new_sets)
            merged_by_cluster[cluster.id] = merged
            final_clusters.append(cluster)
        clusters = final_clusters
    report("organizing", base + span)

    # --- composition ---
    base += span
    span = STAGE_WEIGHTS["composing"]
    report("composing", base)
    units_by_cluster: dict[str, list[NarrativeUnit]] = {}
    for cluster in clusters:
        sets_by_id = {s.id: s for s in cluster.fact_sets}
        facts_by_id = {f.id: f for f in cluster.facts}
        drafts = []
        for m in merged_by_cluster[cluster.id]:
            title, caption = generate_narrative(m, sets_by_id, facts_by_id, providers.llm)
            chart = recommend_chart(m, sets_by_id, facts_by_id, providers.llm)
            member_articles = sorted(
                {facts_by_id[fid].article_id for sid in m.fact_set_ids for fid in sets_by_id[sid].fact_ids},
                key=id_sort_key,
            )
            drafts.append(
                NarrativeUnit(
                    id=m.id,  # placeholder until the final ordering is known
                    cluster_id=cluster.id,
                    fact_set_ids=list(m.fact_set_ids),
                    title=title,
                    caption_html=caption,
                    chart=chart,
                    source_article_ids=member_articles,
                    order_in_cluster=0,
                )
            )
        max_rel = {
            d.id: max(
                facts_by_id[fid].relevance for sid in d.fact_set_ids for fid in sets_by_id[sid].fact_ids
            )
            for d in drafts
        }
        order = order_units_within_cluster(drafts, max_rel, providers.llm)
        by_placeholder = {d.id: d for d in drafts}
        units_by_cluster[cluster.id] = [by_placeholder[pid] for pid in order]

    # final unit ids follow document order: clusters by relevance, units in sequence
    from .storygen import order_clusters

    ordered_cluster_ids = order_clusters(clusters)
    final_units: dict[str, list[NarrativeUnit]] = {}
    for cid in ordered_cluster_ids:
        renumbered = []
        for position, draft in enumerate(units_by_cluster.get(cid, [])):
            renumbered.append(replace(draft, id=ids.next("u"), order_in_cluster=position))
        final_units[cid] = renumbered

    story_id = deterministic_story_id(query, config.seed, now)
    doc = assemble_story(story_id, query, expanded, articles, clusters, final_units, now)
    if config.debug_dir is not None:
        _dump_debug(config.debug_dir, doc, debug, facts, merge_decisions)
    report("ready", 1.0)
    return doc


def _dump_debug(debug_dir: Path, doc: StoryDocument, debug, facts: list[Fact], merge_decisions: dict) -> None:
    out = Path(debug_dir)
    out.mkdir(parents=True, exist_ok=True)
    if debug is not None:
        (out / "clustering.json").write_text(
            json.dumps(
                {
                    "bic_by_k": {str(k): v for k, v in debug.bic_by_k.items()},
                    "chosen_k": debug.model.k,
                    "responsibilities": [[round(x, 6) for x in row] for row in debug.responsibilities],
                },
                indent=2,
                sort_keys=True,
            ),
            encoding="utf-8",
        )
    (out / "merges.json").write_text(
        json.dumps(merge_decisions, indent=2, sort_keys=True), encoding="utf-8"
    )
    (out / "facts.json").write_text(
        json.dumps(
            [
                {"id": f.id, "article_id": f.article_id, "content": f.content, "relevance": str(f.relevance)}
                for f in facts
            ],
            indent=2,
            sort_keys=True,
        ),
        encoding="utf-8",
    )
