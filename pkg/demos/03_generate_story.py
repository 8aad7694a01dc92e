"""Full offline pipeline: corpus in, ordered visual data story out.

Uses the bundled homeschooling corpus and the deterministic mock providers;
the same invocation with the same seed reproduces the golden fixture byte
for byte.
"""

from pathlib import Path

from factweave.captions import plain_text
from factweave.pipeline import PipelineConfig, generate_story

ROOT = Path(__file__).resolve().parent.parent

config = PipelineConfig(mode="mock", corpus_dir=ROOT / "fixtures" / "homeschooling", seed=42)
doc = generate_story(
    "Is homeschooling preferred by people?",
    config,
    progress=lambda state, fraction: print(f"  [{state:>10}] {fraction:5.0%}"),
)

print(f"\nstory {doc.story_id}: {doc.stats.total_facts} facts from {doc.stats.total_articles} articles")
print(f"expanded queries: {doc.expanded_queries}")
print(f"default view: {doc.stats.shown_clusters_default} clusters, {doc.stats.shown_facts_default} facts, "
      f"{doc.stats.contributing_articles_default} contributing articles")

for cluster in doc.clusters:
    print(f"\n== {cluster.topic} (relevance {cluster.relevance})")
    rep = next(f for f in cluster.facts if f.id == cluster.representative_fact_id)
    print(f"   representative: {rep.content}")
    for unit in (u for u in doc.units if u.cluster_id == cluster.id):
        print(f"   [{unit.chart.kind:7}] {unit.title}")
        print(f"             {plain_text(unit.caption_html)[:110]}")

print("\nshared-article links:")
for link in doc.links:
    print(f"   {link.cluster_a} -- {link.cluster_b}: {len(link.shared_article_ids)} shared article(s)")
