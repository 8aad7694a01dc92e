"""Text embedding clients: a live API-backed embedder and a hashing mock.

The mock hashes each distinct token onto one of 64 dimensions with a +/-1
sign and L2-normalizes the sum, so overlapping texts land near each other
and identical texts embed identically — deterministic and fast enough to
cluster in tests. Tokens are stemmed and stopword-free so that inflected
restatements ("homeschooling" / "homeschooled") still register as similar.
"""

from __future__ import annotations

import hashlib
import time

import numpy as np

from ..textutil import STOPWORDS, stem, tokenize
from .config import RETRY_DELAYS, ENV_EMBED_API_KEY, ProviderConfig
from .errors import ProviderUnavailable
from .ratelimit import RateLimiter

MOCK_DIMENSIONS = 64


class MockEmbedder:
    """Token-set hashing embedder; no network, order-insensitive, unit norm."""

    dimensions = MOCK_DIMENSIONS

    def embed_texts(self, texts: list[str]) -> list[np.ndarray]:
        if not texts:
            raise ValueError("embed_texts requires at least one text")
        return [self._embed(t) for t in texts]

    @staticmethod
    def _token_set(text: str) -> set[str]:
        tokens = {
            stem(t)
            for t in tokenize(text)
            if t not in STOPWORDS and not any(ch.isdigit() for ch in t)
        }
        if not tokens:
            tokens = set(tokenize(text))
        return tokens

    def _embed(self, text: str) -> np.ndarray:
        vec = np.zeros(MOCK_DIMENSIONS)
        for token in sorted(self._token_set(text)):
            digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
            h = int.from_bytes(digest, "big")
            dim = h % MOCK_DIMENSIONS
            sign = 1.0 if (h >> 8) & 1 else -1.0
            vec[dim] += sign
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            vec[0] = 1.0
            norm = 1.0
        return vec / norm


class LiveEmbedder:
    """OpenAI-compatible /embeddings endpoint client."""

    def __init__(self, config: ProviderConfig, limiter: RateLimiter | None = None) -> None:
        self.config = config
        self.limiter = limiter or RateLimiter(config.requests_per_minute)

    def embed_texts(self, texts: list[str]) -> list[np.ndarray]:
        import requests

        if not texts:
            raise ValueError("embed_texts requires at least one text")
        key = self.config.require_live_key(self.config.embed_api_key, ENV_EMBED_API_KEY)
        url = self.config.embed_base_url.rstrip("/") + "/embeddings"
        last_error: Exception | None = None
        for attempt, delay in enumerate((0.0,) + RETRY_DELAYS):
            if delay:
                time.sleep(delay)
            try:
                self.limiter.acquire()
                resp = requests.post(
                    url,
                    json={"model": self.config.embed_model, "input": texts},
                    headers={"Authorization": f"Bearer {key}"},
                    timeout=self.config.timeout_seconds,
                )
                resp.raise_for_status()
                data = resp.json()["data"]
                out = []
                for item in sorted(data, key=lambda d: d["index"]):
                    vec = np.asarray(item["embedding"], dtype=float)
                    out.append(vec / np.linalg.norm(vec))
                return out
            except Exception as exc:  # noqa: BLE001 - retried, then wrapped
                last_error = exc
        raise ProviderUnavailable(f"embedding request failed: {last_error}")


def make_embedder(config: ProviderConfig):
    return MockEmbedder() if config.mode == "mock" else LiveEmbedder(config)
