"""Thematic organization: embeddings -> mixture clusters -> labeled clusters.

Hard assignment by argmax responsibility places each fact in exactly one
cluster (the responsibilities stay available for debugging). Topic labeling
is a three-step prompt chain: a draft topic per cluster, a summary per
cluster, then one joint refinement pass that forces the final topics to be
pairwise distinct and at most four words.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ..ids import IdAllocator, id_sort_key
from ..model import Cluster, Fact, mean_relevance, quantize_relevance
from ..providers.llm import StructuredRequest, build_prompt
from .gmm import GmmModel, assign_clusters, fit_gmm
from .relevance import compute_relevance

logger = logging.getLogger(__name__)

FACT_CAP = 300
K_MAX = 10


@dataclass(frozen=True)
class ClusteringDebug:
    responsibilities: np.ndarray
    bic_by_k: dict[int, float]
    model: GmmModel


def score_and_cap_facts(
    facts: list[Fact], embeddings: np.ndarray, query_embedding: np.ndarray, cap: int = FACT_CAP
) -> list[Fact]:
    """Stamp each fact with its relevance and keep the top ``cap`` by score.

    Survivors come back in their original id order, each carrying its
    embedding for the clustering step.
    """
    scored = [
        replace(f, relevance=quantize_relevance(compute_relevance(e, query_embedding)), embedding=e)
        for f, e in zip(facts, embeddings)
    ]
    if len(scored) > cap:
        ranked = sorted(scored, key=lambda f: (-f.relevance, id_sort_key(f.id)))
        kept = {f.id for f in ranked[:cap]}
        logger.warning("fact cap: keeping %d of %d facts", cap, len(scored))
        scored = [f for f in scored if f.id in kept]
    return scored


def cluster_facts(
    facts: list[Fact], seed: int, ids: IdAllocator, k_max: int = K_MAX
) -> tuple[list[Cluster], ClusteringDebug]:
    """Group facts into unlabeled clusters via the seeded mixture model.

    Clusters come back in component order with ids assigned sequentially;
    member facts are kept in fact-id order. Topics and summaries are filled
    by label_clusters, representatives by select_representatives.
    """
    vectors = np.vstack([f.embedding for f in facts])
    model = fit_gmm(vectors, k_max=k_max, seed=seed)
    assignments, responsibilities = assign_clusters(model, model.project(vectors))

    by_component: dict[int, list[Fact]] = {}
    for fact, component in zip(facts, assignments):
        by_component.setdefault(component, []).append(fact)

    clusters = []
    for component in sorted(by_component):
        members = sorted(by_component[component], key=lambda f: id_sort_key(f.id))
        clusters.append(
            Cluster(
                id=ids.next("c"),
                topic="",
                summary="",
                fact_ids=[f.id for f in members],
                relevance=mean_relevance([f.relevance for f in members]),
                representative_fact_id="",
                top_fact_ids=[],
                facts=members,
                fact_sets=[],
            )
        )
    debug = ClusteringDebug(responsibilities=responsibilities, bic_by_k=model.bic_by_k, model=model)
    return clusters, debug


def select_representatives(cluster: Cluster) -> Cluster:
    """Representative = highest relevance (ties to the lowest fact id);
    top facts = up to three by the same ranking, representative included."""
    ranked = sorted(cluster.facts, key=lambda f: (-f.relevance, id_sort_key(f.id)))
    top = [f.id for f in ranked[: min(3, len(ranked))]]
    return replace(cluster, representative_fact_id=ranked[0].id, top_fact_ids=top)


def label_clusters(clusters: list[Cluster], llm) -> list[Cluster]:
    """Three chained prompts: draft topics, summaries, then joint refinement."""
    if not clusters:
        return []

    drafts: dict[str, str] = {}
    summaries: dict[str, str] = {}
    for c in clusters:
        contents = [f.content for f in c.facts]
        topic_doc = llm.complete_structured(
            StructuredRequest(
                task_name="cluster_topic",
                prompt=build_prompt(
                    "Name the common theme of these facts in at most four words.",
                    {"cluster_id": c.id, "contents": contents},
                ),
                schema_name="cluster_topic",
            )
        )
        drafts[c.id] = topic_doc["topic"]
        summary_doc = llm.complete_structured(
            StructuredRequest(
                task_name="cluster_summary",
                prompt=build_prompt(
                    "Summarize what these facts collectively say, one short paragraph.",
                    {"cluster_id": c.id, "topic": drafts[c.id], "contents": contents},
                ),
                schema_name="cluster_summary",
            )
        )
        summaries[c.id] = summary_doc["summary"]

    def refine() -> dict[str, str]:
        doc = llm.complete_structured(
            StructuredRequest(
                task_name="refine_topics",
                prompt=build_prompt(
                    "Refine these draft topics into final topics that are pairwise "
                    "distinct and at most four words each, using the summaries to "
                    "sharpen ambiguous or overlapping names.",
                    {
                        "clusters": [
                            {"cluster_id": c.id, "topic": drafts[c.id], "summary": summaries[c.id]}
                            for c in clusters
                        ]
                    },
                ),
                schema_name="refined_topics",
            )
        )
        return {t["cluster_id"]: " ".join(t["topic"].split()[:4]) for t in doc["topics"]}

    final = refine()
    lowered = [final.get(c.id, drafts[c.id]).lower() for c in clusters]
    if len(set(lowered)) != len(lowered):
        final = refine()

    # suffix disambiguation as the deterministic last resort
    seen: dict[str, int] = {}
    labeled = []
    for c in clusters:
        topic = final.get(c.id, drafts[c.id])
        key = topic.lower()
        if key in seen:
            seen[key] += 1
            topic = f"{topic} ({seen[key]})"
        else:
            seen[key] = 1
        labeled.append(replace(c, topic=topic, summary=summaries[c.id]))
    return labeled
