"""Page fetchers: manifest-backed mock and a polite live HTTP client."""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path

from ..urls import domain_of, normalize_url
from .config import ProviderConfig
from .errors import FetchFailed, NonHtmlContent
from .htmlpage import parse_page

# live mode only: at most one request per second per host
_HOST_INTERVAL = 1.0


class MockPageFetcher:
    """Serves pages from fixture files keyed by a manifest of normalized URLs.

    fixtures/pages/manifest.json maps normalized url -> {"file": name} or
    {"status": code}; anything absent is a 404.
    """

    def __init__(self, fixture_dir: Path) -> None:
        self.pages_dir = Path(fixture_dir) / "pages"
        manifest_path = self.pages_dir / "manifest.json"
        self.manifest: dict = {}
        if manifest_path.is_file():
            self.manifest = json.loads(manifest_path.read_text(encoding="utf-8"))

    def fetch_page(self, url: str) -> tuple[list[str], dict]:
        entry = self.manifest.get(normalize_url(url))
        if entry is None:
            raise FetchFailed(f"404 (not in mock manifest): {url}")
        status = entry.get("status", 200)
        if status != 200:
            raise FetchFailed(f"{status}: {url}")
        if "file" not in entry:
            raise FetchFailed(f"manifest entry has no file: {url}")
        html = (self.pages_dir / entry["file"]).read_text(encoding="utf-8")
        paragraphs, meta = parse_page(html)
        meta.setdefault("source_domain", domain_of(url))
        if entry.get("published_year"):
            meta["published_year"] = entry["published_year"]
        return paragraphs, meta


class LivePageFetcher:
    def __init__(self, config: ProviderConfig) -> None:
        self.config = config
        self._last_hit: dict[str, float] = {}
        self._lock = threading.Lock()

    def _politeness_wait(self, host: str) -> None:
        with self._lock:
            last = self._last_hit.get(host, 0.0)
            wait = _HOST_INTERVAL - (time.monotonic() - last)
            if wait > 0:
                time.sleep(wait)
            self._last_hit[host] = time.monotonic()

    def fetch_page(self, url: str) -> tuple[list[str], dict]:
        import requests

        self._politeness_wait(domain_of(url))
        try:
            resp = requests.get(
                url,
                timeout=self.config.timeout_seconds,
                headers={"User-Agent": "factweave/0.1 (+article research)"},
            )
        except requests.RequestException as exc:
            raise FetchFailed(f"{url}: {exc}") from exc
        if resp.status_code != 200:
            raise FetchFailed(f"{resp.status_code}: {url}")
        content_type = resp.headers.get("Content-Type", "")
        if "html" not in content_type.lower():
            raise NonHtmlContent(f"{content_type or 'unknown content type'}: {url}")
        paragraphs, meta = parse_page(resp.text)
        meta.setdefault("source_domain", domain_of(url))
        return paragraphs, meta


def make_page_fetcher(config: ProviderConfig):
    if config.mode == "mock":
        if config.fixture_dir is None:
            raise ValueError("mock page fetcher requires fixture_dir")
        return MockPageFetcher(config.fixture_dir)
    return LivePageFetcher(config)
