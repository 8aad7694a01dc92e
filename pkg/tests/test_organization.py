"""Clustering orchestration, relevance, labeling, fact sets, and entity filling."""

import json
from dataclasses import replace
from decimal import Decimal

import numpy as np
import pytest

from factweave.ids import IdAllocator
from factweave.model import Article, Cluster, DataPoint, Fact, FactSet, MergedFactSet, favicon_url_for
from factweave.organization.clustering import (
    cluster_facts,
    label_clusters,
    score_and_cap_facts,
    select_representatives,
)
from factweave.organization.entities import (
    detect_entities,
    fill_missing_entities,
    find_entity_of_kind,
    rule_based_entities,
)
from factweave.organization.factsets import build_fact_sets
from factweave.organization.relevance import ZeroVector, compute_relevance
from factweave.providers.embed import MockEmbedder
from factweave.providers.llm import MockStructuredLLM, fixture_path
from factweave.providers.synthesizer import RuleBasedSynthesizer

D = Decimal


@pytest.fixture()
def llm():
    return MockStructuredLLM(synthesizer=RuleBasedSynthesizer())


def make_fact(fid, content, relevance="0.5", article_id="a1", points=None):
    return Fact(
        id=fid,
        article_id=article_id,
        paragraph_index=0,
        content=content,
        data_points=points or [DataPoint("Value", D("1"), "%")],
        relevance=D(relevance),
        status="refined",
    )


class TestRelevance:
    def test_identity(self):
        v = np.array([0.6, 0.8])
        assert compute_relevance(v, v) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert compute_relevance(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(0.0)

    def test_hand_case(self):
        v = np.array([1.0, 1.0]) / np.sqrt(2)
        q = np.array([1.0, 0.0])
        assert compute_relevance(v, q) == pytest.approx(0.7071, abs=1e-4)

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVector):
            compute_relevance(np.zeros(3), np.array([1.0, 0.0, 0.0]))


class TestScoreAndCap:
    def test_relevance_stamped_and_capped(self):
        embedder = MockEmbedder()
        contents = [f"homeschool topic {i}" for i in range(6)] + ["entirely unrelated quantum flux"]
        facts = [make_fact(f"f{i+1}", c, "0") for i, c in enumerate(contents)]
        embeddings = embedder.embed_texts(contents)
        query = embedder.embed_texts(["homeschool topic"])[0]
        scored = score_and_cap_facts(facts, np.array(embeddings), query, cap=5)
        assert len(scored) == 5
        assert all(D(-1) <= f.relevance <= D(1) for f in scored)
        # survivors stay in id order
        ids = [f.id for f in scored]
        assert ids == sorted(ids, key=lambda s: int(s[1:]))


class TestClusterFacts:
    def test_partition_and_mean_relevance(self):
        embedder = MockEmbedder()
        contents = [
            "homeschool growth rate climbs",
            "homeschool growth rate rises",
            "homeschool growth rate je jumps",
            "parents cited reasons for homeschooling",
            "parents cited more reasons for homeschooling",
            "parents cited other reasons for homeschooling",
        ]
        facts = [make_fact(f"f{i+1}", c, "0") for i, c in enumerate(contents)]
        embeddings = embedder.embed_texts(contents)
        query = embedder.embed_texts(["homeschool"])[0]
        facts = score_and_cap_facts(facts, np.array(embeddings), query)
        clusters, debug = cluster_facts(facts, seed=3, ids=IdAllocator())
        covered = sorted(fid for c in clusters for fid in c.fact_ids)
        assert covered == [f"f{i+1}" for i in range(6)]
        for c in clusters:
            mean = sum(f.relevance for f in c.facts) / D(len(c.facts))
            assert abs(c.relevance - mean) <= D("1e-9")
        assert np.allclose(debug.responsibilities.sum(axis=1), 1.0, atol=1e-9)


class TestRepresentatives:
    def _cluster(self, facts):
        return Cluster(
            id="c1",
            topic="",
            summary="",
            fact_ids=[f.id for f in facts],
            relevance=sum(f.relevance for f in facts) / D(len(facts)),
            representative_fact_id="",
            top_fact_ids=[],
            facts=facts,
            fact_sets=[],
        )

    def test_top_three_ordering(self):
        facts = [
            make_fact("f1", "a 1%", "0.9"),
            make_fact("f2", "b 1%", "0.7"),
            make_fact("f3", "c 1%", "0.8"),
            make_fact("f4", "d 1%", "0.6"),
        ]
        out = select_representatives(self._cluster(facts))
        assert out.representative_fact_id == "f1"
        assert out.top_fact_ids == ["f1", "f3", "f2"]

    def test_two_member_cluster(self):
        facts = [make_fact("f1", "a 1%", "0.5"), make_fact("f2", "b 1%", "0.6")]
        out = select_representatives(self._cluster(facts))
        assert out.top_fact_ids == ["f2", "f1"]

    def test_tie_breaks_to_lowest_id(self):
        facts = [
            make_fact("f1", "a 1%", "0.7"),
            make_fact("f2", "b 1%", "0.8"),
            make_fact("f5", "c 1%", "0.8"),
        ]
        out = select_representatives(self._cluster(facts))
        assert out.representative_fact_id == "f2"


class TestLabelClusters:
    def _clusters(self, contents_by_cluster):
        clusters = []
        fid = 0
        for i, contents in enumerate(contents_by_cluster, start=1):
            facts = []
            for c in contents:
                fid += 1
                facts.append(make_fact(f"f{fid}", c))
            clusters.append(
                Cluster(
                    id=f"c{i}",
                    topic="",
                    summary="",
                    fact_ids=[f.id for f in facts],
                    relevance=D("0.5"),
                    representative_fact_id=facts[0].id,
                    top_fact_ids=[facts[0].id],
                    facts=facts,
                    fact_sets=[],
                )
            )
        return clusters

    def test_topics_distinct_and_short(self, llm):
        clusters = self._clusters(
            [
                ["homeschool growth rate at 25%", "homeschool growth rate at 11%"],
                ["parents cited reasons, 23.1%", "parents cited reasons, 15.6%"],
                ["families live in suburbs, 32%", "families live in rural areas, 28%"],
            ]
        )
        labeled = label_clusters(clusters, llm)
        topics = [c.topic for c in labeled]
        assert len({t.lower() for t in topics}) == 3
        assert all(len(t.split()) <= 4 for t in topics)
        assert all(c.summary for c in labeled)

    def test_single_cluster_noop_refinement(self, llm):
        labeled = label_clusters(self._clusters([["homeschool growth 25%"]]), llm)
        assert len(labeled) == 1 and labeled[0].topic

    def test_forced_identical_topics_get_suffix(self):
        class CollidingLLM:
            inner = MockStructuredLLM(synthesizer=RuleBasedSynthesizer())

            def complete_structured(self, req):
                if req.task_name in ("cluster_topic",):
                    return {"topic": "Same Topic"}
                if req.task_name == "refine_topics":
                    payload = json.loads(req.prompt.split("### INPUT\n")[1].split("\n### END INPUT")[0])
                    return {"topics": [{"cluster_id": c["cluster_id"], "topic": "Same Topic"} for c in payload["clusters"]]}
                return self.inner.complete_structured(req)

        clusters = TestLabelClusters()._clusters(
            [["homeschool growth 25%"], ["parents cited 23.1%"]]
        )
        labeled = label_clusters(clusters, CollidingLLM())
        topics = [c.topic for c in labeled]
        assert topics[0] != topics[1]
        assert topics == ["Same Topic", "Same Topic (2)"]


class TestBuildFactSets:
    def _cluster(self, facts):
        return Cluster(
            id="c1",
            topic="T",
            summary="S",
            fact_ids=[f.id for f in facts],
            relevance=D("0.5"),
            representative_fact_id=facts[0].id,
            top_fact_ids=[facts[0].id],
            facts=facts,
            fact_sets=[],
        )

    def test_paraphrases_grouped(self, llm):
        f1 = make_fact(
            "f1",
            "3.7 million children were homeschooled in 2024.",
            points=[DataPoint("Homeschooled Children", D("3.7"), "million", "2024")],
        )
        f2 = make_fact(
            "f2",
            "In 2024, 3,700,000 children were homeschooled.",
            points=[DataPoint("Homeschooled Children", D("3.7"), "million", "2024")],
        )
        sets = build_fact_sets(self._cluster([f1, f2]), llm, IdAllocator())
        assert len(sets) == 1
        assert sets[0].fact_ids == ["f1", "f2"]
        assert not sets[0].conflicting

    def test_conflicting_values_separate_and_tagged(self, llm):
        f1 = make_fact(
            "f1",
            "3.7 million children were homeschooled in 2024.",
            points=[DataPoint("Homeschooled Children", D("3.7"), "million", "2024")],
        )
        f2 = make_fact(
            "f2",
            "3.1 million children were homeschooled in 2024.",
            points=[DataPoint("Homeschooled Children", D("3.1"), "million", "2024")],
        )
        sets = build_fact_sets(self._cluster([f1, f2]), llm, IdAllocator())
        assert len(sets) == 2
        assert all(s.conflicting for s in sets)

    def test_distinct_claims_stay_singletons(self, llm):
        f1 = make_fact("f1", "23.1% cited special needs.", points=[DataPoint("Special Needs", D("23.1"), "%")])
        f2 = make_fact("f2", "41% of families live in the South.", points=[DataPoint("South", D("41"), "%")])
        sets = build_fact_sets(self._cluster([f1, f2]), llm, IdAllocator())
        assert [s.fact_ids for s in sets] == [["f1"], ["f2"]]
        assert not any(s.conflicting for s in sets)

    def test_partition_always_holds_with_bogus_proposal(self, tmp_path):
        from factweave.organization.factsets import _INSTRUCTIONS
        from factweave.providers.llm import build_prompt

        f1 = make_fact("f1", "23.1% cited needs.", points=[DataPoint("Needs", D("23.1"), "%")])
        cluster = self._cluster([f1])
        payload = {
            "cluster_id": "c1",
            "facts": [
                {
                    "id": "f1",
                    "content": f1.content,
                    "data_points": [
                        {"label": "Needs", "value": "23.1", "unit": "%", "series_key": None}
                    ],
                }
            ],
        }
        prompt = build_prompt(_INSTRUCTIONS, payload)
        path = fixture_path(tmp_path, "build_fact_sets", prompt)
        path.parent.mkdir(parents=True)
        path.write_text(json.dumps({"sets": [{"fact_ids": ["f1", "f99"]}]}))
        llm = MockStructuredLLM(fixture_dir=tmp_path, synthesizer=None)
        sets = build_fact_sets(cluster, llm, IdAllocator())
        assert [s.fact_ids for s in sets] == [["f1"]]


class TestEntities:
    def test_worked_example_detections(self):
        entities = rule_based_entities("23.1% of parents in the U.S. cited special needs")
        kinds = {(e.text, e.kind) for e in entities}
        assert ("U.S.", "GPE") in kinds
        assert ("23.1%", "PERCENT") in kinds

    def test_no_gpe_in_health_reason(self):
        entities = rule_based_entities(
            "15.6% of parents said that the child had a physical or mental problem"
        )
        assert not any(e.kind == "GPE" for e in entities)

    def test_empty_text_rejected(self):
        with pytest.raises(ValueError):
            detect_entities("")

    def test_spans_lie_within_text(self):
        text = "Texas spent $2.5 billion on schooling in 2021, up 14% from 2020."
        for e in rule_based_entities(text):
            assert text[e.span[0] : e.span[1]] == e.text

    def test_find_entity_requires_known_value(self):
        text = "The program expanded in Sweden last year."
        assert find_entity_of_kind(text, "GPE", prefer=["U.S."]) is None
        assert find_entity_of_kind(text, "GPE", prefer=["Sweden"]) == "in Sweden"


class TestFillMissingEntities:
    def _setup(self, llm):
        article_a = Article(
            id="a1",
            url="https://x.example/a",
            title="Reasons",
            snippet="",
            source_domain="x.example",
            published_year=2023,
            retrieved_at="2025-01-01T00:00:00Z",
            paragraphs=["23.1% of parents in the U.S. cited special needs as a reason for homeschooling. 15.6% of parents said that the child had a physical or mental problem."],
            favicon_url=favicon_url_for("x.example"),
        )
        f1 = make_fact(
            "f1",
            "23.1% of parents in the U.S. cited special needs as a reason for homeschooling.",
            points=[DataPoint("Special Needs", D("23.1"), "%")],
        )
        f2 = make_fact(
            "f2",
            "15.6% of parents said that the child had a physical or mental problem.",
            points=[DataPoint("Health Problem", D("15.6"), "%")],
        )
        sets = {
            "s1": FactSet("s1", "c1", ["f1"], f1.content),
            "s2": FactSet("s2", "c1", ["f2"], f2.content),
        }
        merged = MergedFactSet("m1", "c1", ["s1", "s2"], "", "%")
        return merged, sets, {"f1": f1, "f2": f2}, {"a1": article_a}

    def test_missing_gpe_filled_from_source(self, llm):
        merged, sets, facts, articles = self._setup(llm)
        replacements = fill_missing_entities(merged, sets, facts, articles, llm)
        assert set(replacements) == {"f2"}
        assert replacements["f2"].content == (
            "15.6% of parents said that the child had a physical or mental problem in the U.S."
        )

    def test_identical_entity_kinds_no_change(self, llm):
        merged, sets, facts, articles = self._setup(llm)
        facts["f2"] = replace(
            facts["f2"], content="15.6% of parents in the U.S. cited a physical or mental problem."
        )
        assert fill_missing_entities(merged, sets, facts, articles, llm) == {}

    def test_source_without_entity_leaves_fact(self, llm):
        merged, sets, facts, articles = self._setup(llm)
        articles["a1"] = replace(
            articles["a1"],
            paragraphs=["23.1% of parents cited special needs. 15.6% cited health problems."],
        )
        facts["f1"] = replace(facts["f1"], content="23.1% of parents in the U.S. cited special needs.")
        # the member still names the U.S. but the source article no longer confirms it
        assert fill_missing_entities(merged, sets, facts, articles, llm) == {}
