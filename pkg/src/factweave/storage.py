"""File-backed story and job persistence.

One JSON file per story plus a single jobs index; writes go through a temp
file and an atomic rename so readers never observe a half-written document.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Optional


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


class StoryStore:
    def __init__(self, data_dir: Path | str) -> None:
        self.data_dir = Path(data_dir)
        self.stories_dir = self.data_dir / "stories"
        self.jobs_path = self.data_dir / "jobs.json"

    def story_path(self, story_id: str) -> Path:
        return self.stories_dir / f"{story_id}.json"

    def save_story(self, story_id: str, serialized: str) -> None:
        atomic_write_text(self.story_path(story_id), serialized)

    def load_story_bytes(self, story_id: str) -> Optional[bytes]:
        path = self.story_path(story_id)
        if not path.is_file():
            return None
        return path.read_bytes()

    def save_jobs_index(self, jobs: dict) -> None:
        atomic_write_text(self.jobs_path, json.dumps(jobs, indent=2, sort_keys=True) + "\n")

    def load_jobs_index(self) -> dict:
        if not self.jobs_path.is_file():
            return {}
        return json.loads(self.jobs_path.read_text(encoding="utf-8"))
