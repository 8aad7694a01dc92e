"""Live-client behavior that can be exercised without a network: schema retry
loops with error feedback, and missing-credential failures."""

import json

import pytest

from factweave.providers.config import ProviderConfig
from factweave.providers.errors import ProviderUnavailable, SchemaViolationAfterRetries
from factweave.providers.llm import LiveStructuredLLM, StructuredRequest, build_prompt
from factweave.providers.search import LiveSearchClient


class _ScriptedLLM(LiveStructuredLLM):
    """Replays canned completions instead of making HTTP calls."""

    def __init__(self, responses):
        super().__init__(ProviderConfig(mode="live"))
        self.responses = list(responses)
        self.prompts: list[str] = []

    def _chat(self, prompt: str) -> str:
        self.prompts.append(prompt)
        return self.responses.pop(0)


def _request(max_retries=3):
    return StructuredRequest(
        task_name="narrative",
        prompt=build_prompt("Write it.", {"points": []}),
        schema_name="narrative",
        max_retries=max_retries,
    )


def test_schema_failure_retried_with_error_appended():
    llm = _ScriptedLLM(
        [
            json.dumps({"title": "no caption"}),
            json.dumps({"title": "ok", "caption_html": "fine"}),
        ]
    )
    doc = llm.complete_structured(_request())
    assert doc == {"title": "ok", "caption_html": "fine"}
    assert len(llm.prompts) == 2
    assert "failed validation" in llm.prompts[1]
    assert "caption_html" in llm.prompts[1]


def test_exhausted_retries_raise():
    llm = _ScriptedLLM([json.dumps({"title": "still wrong"})] * 2)
    with pytest.raises(SchemaViolationAfterRetries):
        llm.complete_structured(_request(max_retries=2))


def test_non_json_response_counts_as_attempt():
    llm = _ScriptedLLM(["definitely not json", json.dumps({"title": "t", "caption_html": "c"})])
    doc = llm.complete_structured(_request())
    assert doc["title"] == "t"


def test_live_search_without_credentials(monkeypatch):
    monkeypatch.delenv("SEARCH_API_KEY", raising=False)
    client = LiveSearchClient(ProviderConfig(mode="live"))
    with pytest.raises(ProviderUnavailable):
        client.search("anything", 5)


def test_live_llm_without_credentials(monkeypatch):
    monkeypatch.delenv("LLM_API_KEY", raising=False)
    llm = LiveStructuredLLM(ProviderConfig(mode="live"))
    with pytest.raises(ProviderUnavailable):
        llm.complete_structured(_request())


def test_empty_page_body_yields_no_paragraphs(tmp_path):
    from factweave.providers.htmlpage import parse_page
    from factweave.providers.pages import MockPageFetcher

    pages = tmp_path / "pages"
    pages.mkdir()
    (pages / "empty.html").write_text("<html><head><title>Empty</title></head><body></body></html>")
    (pages / "manifest.json").write_text(json.dumps({"empty.example/page": {"file": "empty.html"}}))
    fetcher = MockPageFetcher(tmp_path)
    paragraphs, meta = fetcher.fetch_page("https://empty.example/page")
    assert paragraphs == []
    assert meta["title"] == "Empty"

    blocks, meta2 = parse_page("<html><body><script>skip()</script></body></html>")
    assert blocks == [] and meta2["published_year"] == 0
