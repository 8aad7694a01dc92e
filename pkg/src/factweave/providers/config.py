"""Provider wiring: live credentials from the environment, or a fixture dir for mocks."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

# exponential backoff for transient transport errors
RETRY_DELAYS = (1.0, 2.0, 4.0)

ENV_SEARCH_API_KEY = "SEARCH_API_KEY"
ENV_LLM_API_KEY = "LLM_API_KEY"
ENV_EMBED_API_KEY = "EMBED_API_KEY"
ENV_LLM_BASE_URL = "LLM_BASE_URL"
ENV_EMBED_BASE_URL = "EMBED_BASE_URL"


@dataclass(frozen=True)
class ProviderConfig:
    mode: str = "mock"  # live | mock
    fixture_dir: Optional[Path] = None
    search_endpoint: str = "https://www.searchapi.io/api/v1/search"
    llm_base_url: str = field(default_factory=lambda: os.environ.get(ENV_LLM_BASE_URL, "https://api.openai.com/v1"))
    embed_base_url: str = field(default_factory=lambda: os.environ.get(ENV_EMBED_BASE_URL, "https://api.openai.com/v1"))
    llm_model: str = "gpt-4o-2024-08-06"
    embed_model: str = "text-embedding-3-large"
    search_api_key: Optional[str] = field(default_factory=lambda: os.environ.get(ENV_SEARCH_API_KEY))
    llm_api_key: Optional[str] = field(default_factory=lambda: os.environ.get(ENV_LLM_API_KEY))
    embed_api_key: Optional[str] = field(default_factory=lambda: os.environ.get(ENV_EMBED_API_KEY))
    timeout_seconds: float = 30.0
    requests_per_minute: int = 60
    search_locale: str = "en"
    search_results_per_page: int = 10
    # mock-only: fall back to rule-based responses when no fixture file matches
    synthesize: bool = True

    def __post_init__(self) -> None:
        if self.mode not in ("live", "mock"):
            raise ValueError(f"unknown provider mode: {self.mode!r}")
        if self.mode == "mock" and self.fixture_dir is not None and not Path(self.fixture_dir).is_dir():
            raise ValueError(f"fixture_dir does not exist: {self.fixture_dir}")

    def require_live_key(self, key: Optional[str], env_name: str) -> str:
        from .errors import ProviderUnavailable

        if not key:
            raise ProviderUnavailable(f"{env_name} is not set")
        return key
