"""Query expansion, article retrieval, and offline corpus ingestion.

Search results are interleaved round-robin across the expanded queries so no
single phrasing dominates the article budget, then deduplicated by
normalized URL before scraping.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Optional

from .ids import IdAllocator
from .model import Article, favicon_url_for
from .providers.errors import FetchFailed, NonHtmlContent
from .providers.llm import StructuredRequest, build_prompt
from .providers.search import SerpEntry
from .urls import normalize_url

logger = logging.getLogger(__name__)

DEFAULT_VARIANTS = 2
DEFAULT_PER_QUERY = 10
DEFAULT_MAX_ARTICLES = 15
FETCH_WORKERS = 4


class AllFetchesFailed(Exception):
    """No candidate article could be fetched."""


class MalformedCorpusEntry(Exception):
    """A corpus file or its metadata sidecar is unusable."""


_EXPAND_INSTRUCTIONS = (
    "Rewrite the research query into alternative search phrasings that surface "
    "additional relevant articles. Variants must differ from the original and "
    "from each other."
)


def expand_query(query: str, n_variants: int, llm) -> list[str]:
    """Original query first, then up to n_variants distinct rewrites."""
    if not query.strip():
        raise ValueError("empty query")
    if not 0 <= n_variants <= 5:
        raise ValueError(f"n_variants out of range: {n_variants}")
    if n_variants == 0:
        return [query]

    def ask() -> list[str]:
        req = StructuredRequest(
            task_name="expand_query",
            prompt=build_prompt(_EXPAND_INSTRUCTIONS, {"query": query, "n_variants": n_variants}),
            schema_name="query_variants",
        )
        return llm.complete_structured(req)["variants"]

    def dedupe(raw: list[str]) -> list[str]:
        seen = {query.strip().lower()}
        out = []
        for v in raw:
            v = v.strip()
            if v and v.lower() not in seen:
                seen.add(v.lower())
                out.append(v)
        return out[:n_variants]

    variants = dedupe(ask())
    if len(variants) < n_variants:
        # one retry, then accept fewer
        variants = dedupe(ask())
    return [query] + variants


def _interleave(per_query_entries: list[list[SerpEntry]]) -> list[tuple[int, SerpEntry]]:
    """Round-robin by rank across queries, deduplicated by normalized URL."""
    out: list[tuple[int, SerpEntry]] = []
    seen: set[str] = set()
    max_rank = max((len(entries) for entries in per_query_entries), default=0)
    for rank in range(max_rank):
        for qi, entries in enumerate(per_query_entries):
            if rank >= len(entries):
                continue
            entry = entries[rank]
            key = normalize_url(entry.url)
            if key in seen:
                continue
            seen.add(key)
            out.append((qi, entry))
    return out


def retrieve_articles(
    queries: list[str],
    per_query: int,
    max_articles: int,
    search_client,
    page_fetcher,
    ids: IdAllocator,
    retrieved_at: str,
    on_drop: Optional[Callable[[str], None]] = None,
) -> list[Article]:
    """Search every query, scrape candidates concurrently, keep the first
    max_articles fetchable articles in interleaved rank order."""
    if not queries:
        raise ValueError("queries must be non-empty")

    per_query_entries = [search_client.search(q, per_query) for q in queries]
    candidates = _interleave(per_query_entries)

    def fetch(item):
        qi, entry = item
        try:
            return qi, entry, page_fetcher.fetch_page(entry.url), None
        except (FetchFailed, NonHtmlContent) as exc:
            return qi, entry, None, exc

    with ThreadPoolExecutor(max_workers=FETCH_WORKERS) as pool:
        results = list(pool.map(fetch, candidates))

    articles: list[Article] = []
    for qi, entry, fetched, error in results:
        if len(articles) >= max_articles:
            break
        if error is not None:
            logger.warning("skipping %s: %s", entry.url, error)
            if on_drop:
                on_drop(entry.url)
            continue
        paragraphs, meta = fetched
        if not paragraphs:
            logger.warning("skipping %s: no paragraphs", entry.url)
            if on_drop:
                on_drop(entry.url)
            continue
        domain = meta.get("source_domain") or entry.source_domain
        articles.append(
            Article(
                id=ids.next("a"),
                url=entry.url,
                title=meta.get("title") or entry.title,
                snippet=entry.snippet,
                source_domain=domain,
                published_year=meta.get("published_year") or entry.published_year or 0,
                retrieved_at=retrieved_at,
                paragraphs=paragraphs,
                favicon_url=favicon_url_for(domain),
                found_by_query=queries[qi],
            )
        )
    if not articles:
        raise AllFetchesFailed(f"none of {len(candidates)} candidate pages could be fetched")
    return articles


def ingest_corpus(dir_path: Path | str, ids: IdAllocator, retrieved_at: str) -> list[Article]:
    """Offline corpus: <name>.txt with a <name>.meta.json sidecar per article.

    Paragraphs split on blank lines; files are processed in name order so ids
    are stable.
    """
    directory = Path(dir_path)
    if not directory.is_dir():
        raise MalformedCorpusEntry(f"not a directory: {directory}")
    articles = []
    for txt_path in sorted(directory.glob("*.txt")):
        meta_path = txt_path.with_suffix("").with_suffix(".meta.json")
        if not meta_path.is_file():
            raise MalformedCorpusEntry(f"{txt_path.name}: missing sidecar {meta_path.name}")
        try:
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedCorpusEntry(f"{meta_path.name}: {exc}") from exc
        for required in ("title", "url", "domain"):
            if not meta.get(required):
                raise MalformedCorpusEntry(f"{meta_path.name}: missing {required!r}")
        text = txt_path.read_text(encoding="utf-8")
        paragraphs = [" ".join(block.split()) for block in text.split("\n\n") if block.strip()]
        articles.append(
            Article(
                id=ids.next("a"),
                url=meta["url"],
                title=meta["title"],
                snippet=meta.get("snippet", ""),
                source_domain=meta["domain"],
                published_year=int(meta.get("year") or 0),
                retrieved_at=retrieved_at,
                paragraphs=paragraphs,
                favicon_url=favicon_url_for(meta["domain"]),
            )
        )
    return articles
