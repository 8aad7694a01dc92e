"""Web search clients returning SERP entries in engine rank order."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..urls import domain_of, normalize_url
from .config import RETRY_DELAYS, ENV_SEARCH_API_KEY, ProviderConfig
from .errors import ProviderUnavailable, QuotaExceeded
from .ratelimit import RateLimiter


@dataclass(frozen=True)
class SerpEntry:
    url: str
    title: str
    snippet: str
    source_domain: str
    published_year: Optional[int] = None


def serp_fixture_name(query: str) -> str:
    """Fixture file name for a query: q_<8-byte blake2b of normalized text>.json."""
    normalized = " ".join(query.lower().split())
    digest = hashlib.blake2b(normalized.encode("utf-8"), digest_size=8).hexdigest()
    return f"q_{digest}.json"


def _dedupe_ranked(entries: list[SerpEntry], max_results: int) -> list[SerpEntry]:
    seen: set[str] = set()
    out: list[SerpEntry] = []
    for e in entries:
        key = normalize_url(e.url)
        if key in seen:
            continue
        seen.add(key)
        out.append(e)
        if len(out) >= max_results:
            break
    return out


def _check_args(query: str, max_results: int) -> None:
    if not query.strip():
        raise ValueError("empty query")
    if not 1 <= max_results <= 50:
        raise ValueError(f"max_results out of range: {max_results}")


class MockSearchClient:
    def __init__(self, fixture_dir: Path) -> None:
        self.serp_dir = Path(fixture_dir) / "serp"

    def search(self, query: str, max_results: int) -> list[SerpEntry]:
        _check_args(query, max_results)
        path = self.serp_dir / serp_fixture_name(query)
        if not path.is_file():
            raise ProviderUnavailable(f"no SERP fixture for query {query!r} ({path.name})")
        raw = json.loads(path.read_text(encoding="utf-8"))
        entries = [
            SerpEntry(
                url=e["url"],
                title=e.get("title", ""),
                snippet=e.get("snippet", ""),
                source_domain=e.get("source_domain") or domain_of(e["url"]),
                published_year=e.get("published_year"),
            )
            for e in raw
        ]
        return _dedupe_ranked(entries, max_results)


class LiveSearchClient:
    """Organic-results client for a SearchAPI-style JSON endpoint."""

    def __init__(self, config: ProviderConfig, limiter: RateLimiter | None = None) -> None:
        self.config = config
        self.limiter = limiter or RateLimiter(config.requests_per_minute)

    def search(self, query: str, max_results: int) -> list[SerpEntry]:
        import requests

        _check_args(query, max_results)
        key = self.config.require_live_key(self.config.search_api_key, ENV_SEARCH_API_KEY)
        params = {
            "q": query,
            "api_key": key,
            "hl": self.config.search_locale,
            "num": max(max_results, self.config.search_results_per_page),
        }
        last_error: Exception | None = None
        for delay in (0.0,) + RETRY_DELAYS:
            if delay:
                time.sleep(delay)
            try:
                self.limiter.acquire()
                resp = requests.get(self.config.search_endpoint, params=params, timeout=self.config.timeout_seconds)
                if resp.status_code == 429:
                    raise QuotaExceeded("search quota exceeded")
                resp.raise_for_status()
                organic = resp.json().get("organic_results", [])
                entries = []
                for item in organic:
                    url = item.get("link") or item.get("url")
                    if not url:
                        continue
                    year = None
                    for field in ("date", "published_date"):
                        value = str(item.get(field, ""))
                        for tok in value.replace(",", " ").split():
                            if tok.isdigit() and len(tok) == 4:
                                year = int(tok)
                    entries.append(
                        SerpEntry(
                            url=url,
                            title=item.get("title", ""),
                            snippet=item.get("snippet", ""),
                            source_domain=domain_of(url),
                            published_year=year,
                        )
                    )
                return _dedupe_ranked(entries, max_results)
            except QuotaExceeded:
                raise
            except Exception as exc:  # noqa: BLE001 - retried, then wrapped
                last_error = exc
        raise ProviderUnavailable(f"search failed: {last_error}")


def make_search_client(config: ProviderConfig):
    if config.mode == "mock":
        if config.fixture_dir is None:
            raise ValueError("mock search client requires fixture_dir")
        return MockSearchClient(config.fixture_dir)
    return LiveSearchClient(config)
