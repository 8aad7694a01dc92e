"""Regenerate the search/page fixtures from the offline article corpus.

Produces, under fixtures/:
  pages/<name>.html + pages/manifest.json  - one HTML page per corpus article
  serp/q_<hash>.json                       - SERP results for the demo query,
                                             its mock variants, and the spec'd
                                             four-entry sample query
  failure/serp + failure/pages             - a fixture set whose pages all 404

Run from the repository root: python3 scripts/build_fixtures.py
"""

from __future__ import annotations

import json
import sys
from html import escape
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from factweave.providers.search import serp_fixture_name  # noqa: E402
from factweave.urls import normalize_url  # noqa: E402

CORPUS = ROOT / "fixtures" / "homeschooling"
FIXTURES = ROOT / "fixtures"

DEMO_QUERY = "Is homeschooling preferred by people?"
DEMO_VARIANTS = [
    "homeschooling preferred statistics",
    "homeschooling preferred trends data",
]

FAILURE_QUERY = "unreachable homeschooling archive"
FAILURE_VARIANTS = [
    "unreachable homeschooling archive statistics",
    "unreachable homeschooling archive trends data",
]

PAGE_TEMPLATE = """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>{title}</title>
<meta property="article:published_time" content="{year}-03-01T00:00:00Z">
</head>
<body>
<header><nav>Home | Sections | About</nav></header>
<article>
<h1>{title}</h1>
{body}
</article>
<footer><p>Contact the desk for corrections.</p></footer>
</body>
</html>
"""


def load_corpus() -> list[dict]:
    articles = []
    for txt in sorted(CORPUS.glob("*.txt")):
        meta = json.loads(txt.with_suffix("").with_suffix(".meta.json").read_text(encoding="utf-8"))
        paragraphs = [" ".join(b.split()) for b in txt.read_text(encoding="utf-8").split("\n\n") if b.strip()]
        articles.append({"name": txt.stem, "paragraphs": paragraphs, **meta})
    return articles


def write_pages(articles: list[dict]) -> None:
    pages_dir = FIXTURES / "pages"
    pages_dir.mkdir(parents=True, exist_ok=True)
    manifest = {}
    for art in articles:
        body = "\n".join(f"<p>{escape(p)}</p>" for p in art["paragraphs"])
        html = PAGE_TEMPLATE.format(title=escape(art["title"]), year=art["year"], body=body)
        file_name = f"{art['name']}.html"
        (pages_dir / file_name).write_text(html, encoding="utf-8")
        manifest[normalize_url(art["url"])] = {"file": file_name, "status": 200}
    (pages_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def serp_entry(art: dict) -> dict:
    return {
        "url": art["url"],
        "title": art["title"],
        "snippet": art.get("snippet", ""),
        "source_domain": art["domain"],
        "published_year": art["year"],
    }


def write_serp(articles: list[dict]) -> None:
    serp_dir = FIXTURES / "serp"
    serp_dir.mkdir(parents=True, exist_ok=True)
    n = len(articles)
    # overlapping windows so interleaving and URL dedup both get exercised
    windows = {
        DEMO_QUERY: articles[: max(8, n // 2)],
        DEMO_VARIANTS[0]: articles[4:12] + articles[:1],
        DEMO_VARIANTS[1]: articles[8:] + articles[:2],
    }
    for query, arts in windows.items():
        path = serp_dir / serp_fixture_name(query)
        path.write_text(json.dumps([serp_entry(a) for a in arts], indent=2) + "\n", encoding="utf-8")

    # the four-entry sample used by the search client tests
    sample = serp_dir / serp_fixture_name("homeschooling statistics")
    sample.write_text(json.dumps([serp_entry(a) for a in articles[:4]], indent=2) + "\n", encoding="utf-8")


def write_failure_set(articles: list[dict]) -> None:
    base = FIXTURES / "failure"
    (base / "serp").mkdir(parents=True, exist_ok=True)
    (base / "pages").mkdir(parents=True, exist_ok=True)
    entries = [serp_entry(a) for a in articles[:4]]
    for query in [FAILURE_QUERY, *FAILURE_VARIANTS]:
        (base / "serp" / serp_fixture_name(query)).write_text(json.dumps(entries, indent=2) + "\n", encoding="utf-8")
    manifest = {normalize_url(a["url"]): {"status": 404} for a in articles[:4]}
    (base / "pages" / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def main() -> None:
    articles = load_corpus()
    write_pages(articles)
    write_serp(articles)
    write_failure_set(articles)
    print(f"wrote fixtures for {len(articles)} articles")


if __name__ == "__main__":
    main()
