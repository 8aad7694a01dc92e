"""Asynchronous story-generation jobs with monotone state progression.

States advance queued -> retrieving -> extracting -> organizing -> composing
-> ready; failed is reachable from any non-terminal state. A polling client
never sees the state move backwards, enforced at update time.
"""

from __future__ import annotations

import logging
import threading
import uuid
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .model import serialize_story
from .pipeline import PipelineConfig, generate_story
from .storage import StoryStore

logger = logging.getLogger(__name__)

JOB_STATES = ("queued", "retrieving", "extracting", "organizing", "composing", "ready", "failed")

MAX_QUERY_LENGTH = 500
DEFAULT_ACTIVE_JOB_CAP = 2


class TooManyActiveJobs(Exception):
    """The active-job cap is reached; try again once a job finishes."""


class NotFound(Exception):
    """Unknown job or story id."""


@dataclass(frozen=True)
class Job:
    job_id: str
    query: str
    state: str
    progress: float
    story_id: Optional[str] = None
    error_detail: Optional[str] = None
    timestamps: dict = field(default_factory=dict)

    def to_jsonable(self) -> dict:
        return asdict(self)


def _now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


class JobManager:
    """Creates jobs, runs one pipeline worker per job, persists the index."""

    def __init__(
        self,
        store: StoryStore,
        base_config: PipelineConfig,
        active_cap: int = DEFAULT_ACTIVE_JOB_CAP,
    ) -> None:
        self.store = store
        self.base_config = base_config
        self.active_cap = active_cap
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()
        self._threads: dict[str, threading.Thread] = {}

    def create_story_job(self, query: str, overrides: Optional[dict] = None) -> str:
        query = (query or "").strip()
        if not query:
            raise ValueError("query must be non-empty")
        if len(query) > MAX_QUERY_LENGTH:
            raise ValueError(f"query longer than {MAX_QUERY_LENGTH} characters")

        config = self._config_with_overrides(overrides or {})
        with self._lock:
            active = sum(1 for j in self._jobs.values() if j.state not in ("ready", "failed"))
            if active >= self.active_cap:
                raise TooManyActiveJobs(f"{active} jobs already active (cap {self.active_cap})")
            job_id = uuid.uuid4().hex[:12]
            job = Job(
                job_id=job_id,
                query=query,
                state="queued",
                progress=0.0,
                timestamps={"queued": _now_iso()},
            )
            self._jobs[job_id] = job
            self._persist_locked()

        worker = threading.Thread(target=self._run, args=(job_id, query, config), daemon=True)
        self._threads[job_id] = worker
        worker.start()
        return job_id

    def _config_with_overrides(self, overrides: dict) -> PipelineConfig:
        allowed = {"seed", "max_articles", "n_variants", "per_query", "k_max", "fact_cap"}
        kwargs = {k: v for k, v in overrides.items() if k in allowed}
        return replace(self.base_config, **kwargs) if kwargs else self.base_config

    def get_job(self, job_id: str) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise NotFound(f"no such job: {job_id}")
            return job

    def get_story_bytes(self, story_id: str) -> bytes:
        data = self.store.load_story_bytes(story_id)
        if data is None:
            logger.warning("story %s missing from disk", story_id)
            raise NotFound(f"no such story: {story_id}")
        return data

    def wait(self, job_id: str, timeout: Optional[float] = None) -> None:
        worker = self._threads.get(job_id)
        if worker is not None:
            worker.join(timeout)

    # --- internals -------------------------------------------------------

    def _run(self, job_id: str, query: str, config: PipelineConfig) -> None:
        def progress(state: str, fraction: float) -> None:
            if state == "ready":
                return  # the ready state is set only after the story is persisted
            self._advance(job_id, state, fraction)

        try:
            doc = generate_story(query, config, progress)
            self.store.save_story(doc.story_id, serialize_story(doc))
            self._advance(job_id, "ready", 1.0, story_id=doc.story_id)
        except Exception as exc:  # noqa: BLE001 - job surface reports all failures
            logger.exception("job %s failed", job_id)
            self._fail(job_id, f"{type(exc).__name__}: {exc}")

    def _advance(self, job_id: str, state: str, fraction: float, story_id: Optional[str] = None) -> None:
        with self._lock:
            job = self._jobs[job_id]
            current = JOB_STATES.index(job.state)
            target = JOB_STATES.index(state)
            if target < current:
                state = job.state  # never regress
            timestamps = dict(job.timestamps)
            if state != job.state:
                timestamps[state] = _now_iso()
            self._jobs[job_id] = Job(
                job_id=job.job_id,
                query=job.query,
                state=state,
                progress=max(job.progress, fraction),
                story_id=story_id or job.story_id,
                error_detail=job.error_detail,
                timestamps=timestamps,
            )
            self._persist_locked()

    def _fail(self, job_id: str, detail: str) -> None:
        with self._lock:
            job = self._jobs[job_id]
            if job.state in ("ready", "failed"):
                return
            timestamps = dict(job.timestamps)
            timestamps["failed"] = _now_iso()
            self._jobs[job_id] = Job(
                job_id=job.job_id,
                query=job.query,
                state="failed",
                progress=job.progress,
                story_id=job.story_id,
                error_detail=detail,
                timestamps=timestamps,
            )
            self._persist_locked()

    def _persist_locked(self) -> None:
        self.store.save_jobs_index({jid: job.to_jsonable() for jid, job in self._jobs.items()})
