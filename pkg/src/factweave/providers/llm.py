"""Structured-output LLM clients.

Every pipeline task sends a prompt that embeds its payload between sentinel
markers and names a registered output schema. Responses that fail schema
validation are retried with the validation error appended, up to the
request's retry budget.

The mock client resolves a response in two steps: first a fixture file named
by (task, stable hash of the normalized prompt) — letting tests pin exact
responses, including adversarial ones — and otherwise a deterministic
rule-based synthesizer, so complete pipelines replay offline with no
fixture authoring.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .config import RETRY_DELAYS, ENV_LLM_API_KEY, ProviderConfig
from .errors import ProviderUnavailable, SchemaViolationAfterRetries
from .ratelimit import RateLimiter
from .schemas import get_schema, schema_errors

PAYLOAD_START = "### INPUT"
PAYLOAD_END = "### END INPUT"


@dataclass(frozen=True)
class StructuredRequest:
    task_name: str
    prompt: str
    schema_name: str
    few_shot_examples: list[str] = field(default_factory=list)
    max_retries: int = 3

    def __post_init__(self) -> None:
        if self.max_retries < 1:
            raise ValueError("max_retries must be >= 1")
        get_schema(self.schema_name)  # fail fast on unregistered schemas


def build_prompt(instructions: str, payload: dict, few_shot_examples: list[str] | None = None) -> str:
    parts = [instructions.strip()]
    for example in few_shot_examples or []:
        parts.append("Example:\n" + example.strip())
    parts.append(f"{PAYLOAD_START}\n{json.dumps(payload, sort_keys=True, ensure_ascii=False)}\n{PAYLOAD_END}")
    return "\n\n".join(parts)


def extract_payload(prompt: str) -> dict:
    start = prompt.rfind(PAYLOAD_START)
    end = prompt.rfind(PAYLOAD_END)
    if start == -1 or end == -1 or end < start:
        raise ValueError("prompt has no payload block")
    return json.loads(prompt[start + len(PAYLOAD_START) : end].strip())


def prompt_fingerprint(prompt: str) -> str:
    """Stable 64-bit hex fingerprint of the whitespace-normalized prompt."""
    normalized = " ".join(prompt.split())
    return hashlib.blake2b(normalized.encode("utf-8"), digest_size=8).hexdigest()


def fixture_path(fixture_dir: Path, task_name: str, prompt: str) -> Path:
    return Path(fixture_dir) / "llm" / task_name / f"{prompt_fingerprint(prompt)}.json"


class MockStructuredLLM:
    def __init__(self, fixture_dir: Optional[Path] = None, synthesizer: Any = None) -> None:
        self.fixture_dir = Path(fixture_dir) if fixture_dir else None
        self.synthesizer = synthesizer

    def complete_structured(self, req: StructuredRequest) -> dict:
        if not req.prompt.strip():
            raise ValueError("empty prompt")
        schema = get_schema(req.schema_name)

        if self.fixture_dir is not None:
            path = fixture_path(self.fixture_dir, req.task_name, req.prompt)
            if path.is_file():
                doc = json.loads(path.read_text(encoding="utf-8"))
                # the canned answer never changes, so retrying reuses it verbatim
                errors: list[str] = []
                for _ in range(req.max_retries):
                    errors = schema_errors(doc, schema)
                    if not errors:
                        return doc
                raise SchemaViolationAfterRetries(
                    f"fixture {path.name} for task {req.task_name!r}: {'; '.join(errors)}"
                )

        if self.synthesizer is not None:
            payload = extract_payload(req.prompt)
            doc = self.synthesizer.respond(req.task_name, payload)
            errors = schema_errors(doc, schema)
            if errors:
                raise SchemaViolationAfterRetries(
                    f"synthesizer output for task {req.task_name!r}: {'; '.join(errors)}"
                )
            return doc

        raise ProviderUnavailable(
            f"no fixture for task {req.task_name!r} (fingerprint {prompt_fingerprint(req.prompt)}) "
            "and synthesis is disabled"
        )


class LiveStructuredLLM:
    def __init__(self, config: ProviderConfig, limiter: RateLimiter | None = None) -> None:
        self.config = config
        self.limiter = limiter or RateLimiter(config.requests_per_minute)

    def _chat(self, prompt: str) -> str:
        import requests

        key = self.config.require_live_key(self.config.llm_api_key, ENV_LLM_API_KEY)
        url = self.config.llm_base_url.rstrip("/") + "/chat/completions"
        last_error: Exception | None = None
        for delay in (0.0,) + RETRY_DELAYS:
            if delay:
                time.sleep(delay)
            try:
                self.limiter.acquire()
                resp = requests.post(
                    url,
                    json={
                        "model": self.config.llm_model,
                        "messages": [
                            {"role": "system", "content": "Respond with a single JSON object only."},
                            {"role": "user", "content": prompt},
                        ],
                        "response_format": {"type": "json_object"},
                        "temperature": 0,
                    },
                    headers={"Authorization": f"Bearer {key}"},
                    timeout=self.config.timeout_seconds,
                )
                resp.raise_for_status()
                return resp.json()["choices"][0]["message"]["content"]
            except Exception as exc:  # noqa: BLE001 - retried, then wrapped
                last_error = exc
        raise ProviderUnavailable(f"llm request failed: {last_error}")

    def complete_structured(self, req: StructuredRequest) -> dict:
        if not req.prompt.strip():
            raise ValueError("empty prompt")
        schema = get_schema(req.schema_name)
        prompt = req.prompt
        errors: list[str] = []
        for _ in range(req.max_retries):
            text = self._chat(prompt)
            try:
                doc = json.loads(text)
            except json.JSONDecodeError as exc:
                errors = [f"response is not JSON: {exc}"]
            else:
                errors = schema_errors(doc, schema)
                if not errors:
                    return doc
            prompt = req.prompt + "\n\nYour previous answer failed validation:\n" + "\n".join(errors)
        raise SchemaViolationAfterRetries(f"task {req.task_name!r}: {'; '.join(errors)}")


def make_llm(config: ProviderConfig):
    if config.mode == "mock":
        synthesizer = None
        if config.synthesize:
            from .synthesizer import RuleBasedSynthesizer

            synthesizer = RuleBasedSynthesizer()
        return MockStructuredLLM(fixture_dir=config.fixture_dir, synthesizer=synthesizer)
    return LiveStructuredLLM(config)
