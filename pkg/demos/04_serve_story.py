"""Job-service demo: submit a query over HTTP, poll progress, fetch the story.

Spins up the service in-process on an ephemeral port, so it runs anywhere
without occupying 8080.
"""

import json
import threading
import time
import urllib.request
from pathlib import Path

from factweave.jobs import JobManager
from factweave.pipeline import PipelineConfig
from factweave.service import StoryService
from factweave.storage import StoryStore

ROOT = Path(__file__).resolve().parent.parent

store = StoryStore(ROOT / "data" / "demo")
config = PipelineConfig(mode="mock", corpus_dir=ROOT / "fixtures" / "homeschooling", seed=42)
httpd = StoryService(JobManager(store, config)).make_server(port=0)
threading.Thread(target=httpd.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{httpd.server_address[1]}"
print(f"service up at {base}")

request = urllib.request.Request(
    f"{base}/api/stories",
    data=json.dumps({"query": "Is homeschooling preferred by people?"}).encode(),
    headers={"Content-Type": "application/json"},
    method="POST",
)
with urllib.request.urlopen(request) as resp:
    job_id = json.loads(resp.read())["job_id"]
print(f"submitted job {job_id}")

while True:
    with urllib.request.urlopen(f"{base}/api/jobs/{job_id}") as resp:
        job = json.loads(resp.read())
    print(f"  {job['state']:>10} {job['progress']:5.0%}")
    if job["state"] in ("ready", "failed"):
        break
    time.sleep(0.2)

if job["state"] == "ready":
    with urllib.request.urlopen(f"{base}/api/stories/{job['story_id']}") as resp:
        story = json.loads(resp.read())
    print(f"\nstory {story['story_id']}: {len(story['clusters'])} clusters, {len(story['units'])} units")
    with urllib.request.urlopen(f"{base}/api/stories/{job['story_id']}/articles") as resp:
        articles = json.loads(resp.read())
    print(f"sources: {', '.join(a['source_domain'] for a in articles[:5])}, ...")

httpd.shutdown()
