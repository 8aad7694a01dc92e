"""Build the TikTok-shaped overview fixture story.

A synthetic but fully valid story document with the reference shape used by
the frontend filter tests: 106 facts across 12 articles and 10 clusters,
where the six most relevant clusters hold 64 facts drawn from 9 of the 12
articles. Written to fixtures/tiktok_story.json.
"""

from __future__ import annotations

import sys
from decimal import Decimal
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from factweave.ids import IdAllocator, id_sort_key  # noqa: E402
from factweave.model import (  # noqa: E402
    Article,
    ChartSeries,
    ChartSpec,
    Cluster,
    DataPoint,
    Fact,
    FactSet,
    NarrativeUnit,
    favicon_url_for,
    mean_relevance,
    serialize_story,
)
from factweave.organization.clustering import select_representatives  # noqa: E402
from factweave.storygen import assemble_story, build_template_caption  # noqa: E402
from factweave.validation import validate_story_document  # noqa: E402

D = Decimal

QUERY = "TikTok trends worldwide"

TOPICS = [
    ("Global Reach", "reach"),
    ("Gen Z Focus", "young users"),
    ("App Dominance", "downloads"),
    ("Creator Economy", "creators"),
    ("Brand Discovery", "brands"),
    ("Watch Time", "watch time"),
    ("Revenue Growth", "revenue"),
    ("Market Share", "markets"),
    ("Content Mix", "content"),
    ("Regulation Watch", "policy"),
]

# six most relevant clusters hold 64 facts; the remaining four hold 42
CLUSTER_SIZES = [14, 12, 11, 10, 9, 8, 12, 11, 10, 9]

# top-6 clusters draw from exactly these nine articles
TOP_ARTICLES = [f"a{i}" for i in range(1, 10)]
ALL_ARTICLES = [f"a{i}" for i in range(1, 13)]


def build() -> str:
    ids = IdAllocator()
    per_article_facts: dict[str, list[str]] = {aid: [] for aid in ALL_ARTICLES}

    clusters: list[Cluster] = []
    units_by_cluster: dict[str, list[NarrativeUnit]] = {}
    fact_counter = 0

    articles_meta = {}
    for i, aid in enumerate(ALL_ARTICLES, start=1):
        articles_meta[aid] = {
            "domain": f"media{i:02d}.example",
            "year": 2019 + (i % 6),
        }

    for c_index, (size, (topic, noun)) in enumerate(zip(CLUSTER_SIZES, TOPICS)):
        cluster_id = ids.next("c")
        pool = TOP_ARTICLES if c_index < 6 else ALL_ARTICLES
        facts: list[Fact] = []
        for j in range(size):
            fact_counter += 1
            fid = ids.next("f")
            article_id = pool[(c_index + j) % len(pool)]
            value = D(f"{(fact_counter * 7) % 80 + 5}.{(fact_counter * 3) % 10}")
            content = f"{value}% of TikTok users engaged with {noun} metric {fact_counter}."
            relevance = (D("0.95") - D("0.06") * c_index - D("0.002") * j).quantize(D("0.000001"))
            per_article_facts[article_id].append(content)
            facts.append(
                Fact(
                    id=fid,
                    article_id=article_id,
                    paragraph_index=len(per_article_facts[article_id]) - 1,
                    content=content,
                    data_points=[DataPoint(f"{topic} Metric {fact_counter}", value, "%")],
                    relevance=relevance,
                    status="refined",
                )
            )

        fact_sets = [
            FactSet(ids.next("s"), cluster_id, [f.id], f.content) for f in facts
        ]
        cluster = Cluster(
            id=cluster_id,
            topic=topic,
            summary=f"Covers {size} quantitative facts on {topic.lower()} for {QUERY}.",
            fact_ids=[f.id for f in facts],
            relevance=mean_relevance([f.relevance for f in facts]),
            representative_fact_id="",
            top_fact_ids=[],
            facts=facts,
            fact_sets=fact_sets,
        )
        cluster = select_representatives(cluster)
        clusters.append(cluster)

        points = [f.data_points[0] for f in facts]
        chart = ChartSpec(
            kind="bar",
            x_label="Category",
            y_label="%",
            series=[
                ChartSeries(None, p.label, p.value, p.unit, i) for i, p in enumerate(points)
            ],
        )
        unit = NarrativeUnit(
            id=ids.next("u"),
            cluster_id=cluster_id,
            fact_set_ids=[s.id for s in fact_sets],
            title=f"{topic}: Key Figures",
            caption_html=build_template_caption(points),
            chart=chart,
            source_article_ids=sorted({f.article_id for f in facts}, key=id_sort_key),
            order_in_cluster=0,
        )
        units_by_cluster[cluster_id] = [unit]

    articles = [
        Article(
            id=aid,
            url=f"https://{meta['domain']}/tiktok-report",
            title=f"TikTok Worldwide Report {aid[1:]}",
            snippet=f"Numbers on TikTok adoption and usage, part {aid[1:]}.",
            source_domain=meta["domain"],
            published_year=meta["year"],
            retrieved_at="2025-01-01T00:00:00Z",
            paragraphs=per_article_facts[aid] or ["No quantitative claims in this article."],
            favicon_url=favicon_url_for(meta["domain"]),
        )
        for aid, meta in articles_meta.items()
    ]

    doc = assemble_story(
        story_id="story-tiktok-fixture",
        query=QUERY,
        expanded_queries=[QUERY, "tiktok usage statistics", "tiktok growth by country"],
        articles=articles,
        clusters=clusters,
        units_by_cluster=units_by_cluster,
        created_at="2025-01-01T00:00:00Z",
    )
    violations = validate_story_document(doc)
    assert violations == [], violations
    assert doc.stats.total_facts == 106
    assert doc.stats.total_articles == 12
    assert doc.stats.shown_facts_default == 64
    assert doc.stats.contributing_articles_default == 9
    return serialize_story(doc)


if __name__ == "__main__":
    out = ROOT / "fixtures" / "tiktok_story.json"
    out.write_text(build(), encoding="utf-8")
    print(f"wrote {out}")
