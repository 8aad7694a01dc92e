"""HTTP service: story-generation jobs, story retrieval, and static frontend.

JSON endpoints:
  POST /api/stories {query, seed?, max_articles?} -> 202 {"job_id"}
  GET  /api/jobs/<id>                             -> job snapshot
  GET  /api/stories/<id>                          -> the stored story verbatim
  GET  /api/stories/<id>/articles                 -> the story's articles array
  GET  /healthz                                   -> 200

Everything else is served from the configured static directory. GET handlers
never mutate stored stories.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import re
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional

from .jobs import JobManager, NotFound, TooManyActiveJobs

logger = logging.getLogger(__name__)

_JOB_RE = re.compile(r"^/api/jobs/([A-Za-z0-9_-]+)$")
_STORY_RE = re.compile(r"^/api/stories/([A-Za-z0-9_-]+)$")
_ARTICLES_RE = re.compile(r"^/api/stories/([A-Za-z0-9_-]+)/articles$")


class StoryService:
    def __init__(self, jobs: JobManager, static_dir: Optional[Path] = None) -> None:
        self.jobs = jobs
        self.static_dir = Path(static_dir) if static_dir else None

    def make_server(self, host: str = "127.0.0.1", port: int = 8080) -> ThreadingHTTPServer:
        service = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, fmt, *args):  # route through logging, not stderr
                logger.debug("%s " + fmt, self.address_string(), *args)

            def _send(self, status: int, body: bytes, content_type: str = "application/json") -> None:
                self.send_response(status)
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(body)))
                self.send_header("Access-Control-Allow-Origin", "*")
                self.end_headers()
                self.wfile.write(body)

            def _send_json(self, status: int, payload: dict) -> None:
                self._send(status, json.dumps(payload).encode("utf-8"))

            def _send_error(self, status: int, message: str) -> None:
                self._send_json(status, {"error": message})

            def do_POST(self) -> None:
                if self.path.rstrip("/") != "/api/stories":
                    self._send_error(404, "not found")
                    return
                try:
                    length = int(self.headers.get("Content-Length", "0"))
                    payload = json.loads(self.rfile.read(length) or b"{}")
                except (ValueError, json.JSONDecodeError):
                    self._send_error(400, "body must be JSON")
                    return
                query = payload.get("query", "")
                overrides = {k: v for k, v in payload.items() if k != "query"}
                try:
                    job_id = service.jobs.create_story_job(query, overrides)
                except ValueError as exc:
                    self._send_error(400, str(exc))
                    return
                except TooManyActiveJobs as exc:
                    self._send_error(429, str(exc))
                    return
                self._send_json(202, {"job_id": job_id})

            def do_GET(self) -> None:
                path = self.path.split("?", 1)[0]
                if path == "/healthz":
                    self._send(200, b"ok", "text/plain")
                    return
                m = _JOB_RE.match(path)
                if m:
                    try:
                        job = service.jobs.get_job(m.group(1))
                    except NotFound as exc:
                        self._send_error(404, str(exc))
                        return
                    self._send_json(200, job.to_jsonable())
                    return
                m = _ARTICLES_RE.match(path)
                if m:
                    self._serve_story_fragment(m.group(1), "articles")
                    return
                m = _STORY_RE.match(path)
                if m:
                    try:
                        data = service.jobs.get_story_bytes(m.group(1))
                    except NotFound as exc:
                        self._send_error(404, str(exc))
                        return
                    self._send(200, data)
                    return
                if path.startswith("/api/"):
                    self._send_error(404, "not found")
                    return
                self._serve_static(path)

            def _serve_story_fragment(self, story_id: str, key: str) -> None:
                try:
                    data = service.jobs.get_story_bytes(story_id)
                except NotFound as exc:
                    self._send_error(404, str(exc))
                    return
                fragment = json.loads(data)[key]
                self._send(200, json.dumps(fragment, sort_keys=True).encode("utf-8"))

            def _serve_static(self, path: str) -> None:
                if service.static_dir is None:
                    self._send_error(404, "no static directory configured")
                    return
                rel = path.lstrip("/") or "index.html"
                target = (service.static_dir / rel).resolve()
                if not str(target).startswith(str(service.static_dir.resolve())):
                    self._send_error(403, "forbidden")
                    return
                if target.is_dir():
                    target = target / "index.html"
                if not target.is_file():
                    # single-page app fallback
                    target = service.static_dir / "index.html"
                    if not target.is_file():
                        self._send_error(404, "not found")
                        return
                content_type = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
                self._send(200, target.read_bytes(), content_type)

        return ThreadingHTTPServer((host, port), Handler)


def serve_forever(jobs: JobManager, host: str, port: int, static_dir: Optional[Path] = None) -> None:
    server = StoryService(jobs, static_dir).make_server(host, port)
    logger.info("serving on http://%s:%d", host, server.server_address[1])
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
