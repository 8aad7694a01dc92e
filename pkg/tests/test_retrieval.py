"""Query expansion, article retrieval with interleaving, and corpus ingestion."""

import json

import pytest

from factweave.ids import IdAllocator
from factweave.pipeline import MOCK_CLOCK
from factweave.providers.llm import MockStructuredLLM
from factweave.providers.pages import MockPageFetcher
from factweave.providers.search import MockSearchClient, serp_fixture_name
from factweave.providers.synthesizer import RuleBasedSynthesizer
from factweave.retrieval import (
    AllFetchesFailed,
    MalformedCorpusEntry,
    expand_query,
    ingest_corpus,
    retrieve_articles,
)
from factweave.urls import normalize_url


@pytest.fixture()
def llm():
    return MockStructuredLLM(synthesizer=RuleBasedSynthesizer())


class TestExpandQuery:
    def test_original_first_and_distinct(self, llm):
        out = expand_query("Is homeschooling preferred by people?", 2, llm)
        assert len(out) == 3
        assert out[0] == "Is homeschooling preferred by people?"
        lowered = [q.lower() for q in out]
        assert len(set(lowered)) == 3

    def test_zero_variants(self, llm):
        assert expand_query("anything", 0, llm) == ["anything"]

    def test_duplicate_variants_dropped(self, tmp_path):
        # canned response repeats the original query; after one retry the
        # expansion settles for fewer variants
        from factweave.providers.llm import StructuredRequest, build_prompt, fixture_path

        query = "solar adoption rates"
        req_prompt = build_prompt(
            "Rewrite the research query into alternative search phrasings that surface "
            "additional relevant articles. Variants must differ from the original and "
            "from each other.",
            {"query": query, "n_variants": 2},
        )
        path = fixture_path(tmp_path, "expand_query", req_prompt)
        path.parent.mkdir(parents=True)
        path.write_text(json.dumps({"variants": [query, "solar adoption by year"]}))
        llm = MockStructuredLLM(fixture_dir=tmp_path, synthesizer=None)
        out = expand_query(query, 2, llm)
        assert out[0] == query
        assert out[1:] == ["solar adoption by year"]

    def test_bounds(self, llm):
        with pytest.raises(ValueError):
            expand_query("", 2, llm)
        with pytest.raises(ValueError):
            expand_query("q", 6, llm)


class TestRetrieveArticles:
    def test_interleaves_and_dedupes(self, fixtures_dir):
        search = MockSearchClient(fixtures_dir)
        fetcher = MockPageFetcher(fixtures_dir)
        queries = [
            "Is homeschooling preferred by people?",
            "homeschooling preferred statistics",
            "homeschooling preferred trends data",
        ]
        articles = retrieve_articles(queries, 10, 12, search, fetcher, IdAllocator(), MOCK_CLOCK)
        assert len(articles) == 12
        urls = [normalize_url(a.url) for a in articles]
        assert len(set(urls)) == len(urls)
        assert [a.id for a in articles] == [f"a{i}" for i in range(1, 13)]
        # round-robin: first three come one from each query's rank 0
        assert articles[0].found_by_query == queries[0]
        assert articles[1].found_by_query == queries[1]
        assert articles[2].found_by_query == queries[2]

    def test_cap_respected(self, fixtures_dir):
        search = MockSearchClient(fixtures_dir)
        fetcher = MockPageFetcher(fixtures_dir)
        articles = retrieve_articles(
            ["homeschooling statistics"], 4, 2, search, fetcher, IdAllocator(), MOCK_CLOCK
        )
        assert len(articles) == 2

    def test_all_fetches_failed(self, fixtures_dir):
        failure = fixtures_dir / "failure"
        search = MockSearchClient(failure)
        fetcher = MockPageFetcher(failure)
        with pytest.raises(AllFetchesFailed):
            retrieve_articles(
                ["unreachable homeschooling archive"], 4, 5, search, fetcher, IdAllocator(), MOCK_CLOCK
            )

    def test_articles_have_metadata(self, fixtures_dir):
        search = MockSearchClient(fixtures_dir)
        fetcher = MockPageFetcher(fixtures_dir)
        articles = retrieve_articles(
            ["homeschooling statistics"], 4, 4, search, fetcher, IdAllocator(), MOCK_CLOCK
        )
        a = articles[0]
        assert a.title and a.paragraphs and a.source_domain
        assert a.favicon_url == f"https://{a.source_domain}/favicon.ico"
        assert a.published_year > 0
        assert a.retrieved_at == MOCK_CLOCK


class TestIngestCorpus:
    def test_corpus_loads_in_filename_order(self, corpus_dir):
        articles = ingest_corpus(corpus_dir, IdAllocator(), MOCK_CLOCK)
        assert len(articles) == 15
        assert articles[0].id == "a1"
        assert articles[0].title == "Homeschooling Hits a Record High in 2024"
        assert articles[0].paragraphs[0].startswith("More than 3.7 million")

    def test_empty_directory(self, tmp_path):
        assert ingest_corpus(tmp_path, IdAllocator(), MOCK_CLOCK) == []

    def test_missing_sidecar_fails(self, tmp_path):
        (tmp_path / "a.txt").write_text("Some text.")
        with pytest.raises(MalformedCorpusEntry):
            ingest_corpus(tmp_path, IdAllocator(), MOCK_CLOCK)

    def test_sidecar_missing_title_fails(self, tmp_path):
        (tmp_path / "a.txt").write_text("Some text.")
        (tmp_path / "a.meta.json").write_text(json.dumps({"url": "https://x.example/a", "domain": "x.example"}))
        with pytest.raises(MalformedCorpusEntry, match="title"):
            ingest_corpus(tmp_path, IdAllocator(), MOCK_CLOCK)


def test_url_normalization_rules():
    assert normalize_url("https://www.example.com/a/?utm_source=x") == "example.com/a"
    assert normalize_url("http://example.com/a") == "example.com/a"
    assert normalize_url("https://example.com/a?fbclid=123&keep=1") == "example.com/a?keep=1"
    assert normalize_url("https://Example.com/a/") == "example.com/a"


def test_serp_fixture_exists_for_demo_variants(fixtures_dir):
    for q in (
        "Is homeschooling preferred by people?",
        "homeschooling preferred statistics",
        "homeschooling preferred trends data",
    ):
        assert (fixtures_dir / "serp" / serp_fixture_name(q)).is_file()
