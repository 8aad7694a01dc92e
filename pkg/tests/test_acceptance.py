"""Acceptance gate: one test per release criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -s`` to see the PASS lines as they
happen; a failing criterion fails its test.
"""

import json
import random
import subprocess
import sys
import time
from decimal import Decimal
from pathlib import Path

import numpy as np
import pytest

from factweave.extraction.quantity import (
    SCALE_MULTIPLIERS,
    normalize_quantity,
    quantity_magnitude,
)
from factweave.organization.gmm import assign_clusters, fit_gmm

from storychecks import assert_story_sound
from test_gmm import adjusted_rand_index, two_blobs
from test_pipeline_e2e import _write_random_corpus
from test_quantity import CORPUS as QUANTITY_CORPUS

D = Decimal
ROOT = Path(__file__).resolve().parent.parent


def _verdict(name: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE[{name}]: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line, flush=True)
    assert ok, line


def test_criterion_quantity_normalizer():
    start = time.perf_counter()
    exact = 0
    for token, value, unit in QUANTITY_CORPUS:
        if value is None:
            try:
                normalize_quantity(token)
            except Exception:
                exact += 1
            continue
        got = normalize_quantity(token)
        if got == (value, unit):
            exact += 1

    rng = random.Random(0)
    scales = ["", "thousand", "million", "billion", "trillion", "K", "M", "B"]
    multipliers = {"K": 10**3, "M": 10**6, "B": 10**9}
    roundtrips = 0
    for _ in range(10_000):
        whole = rng.randint(0, 10**9)
        frac_digits = rng.randint(0, 4)
        scale = rng.choice(scales)
        value = D(whole)
        text = str(whole)
        if frac_digits:
            frac = rng.randint(0, 10**frac_digits - 1)
            text += f".{frac:0{frac_digits}d}"
            value += D(frac) / (10**frac_digits)
        if scale in multipliers:
            text += scale
            magnitude = value * multipliers[scale]
        elif scale:
            text += f" {scale}"
            magnitude = value * SCALE_MULTIPLIERS[scale]
        else:
            magnitude = value
        got_value, got_unit = normalize_quantity(text)
        if abs(quantity_magnitude(got_value, got_unit) - magnitude) <= D("1e-9") * max(D(1), abs(magnitude)):
            roundtrips += 1
    elapsed = time.perf_counter() - start

    _verdict(
        "quantity-normalizer",
        exact == len(QUANTITY_CORPUS) and roundtrips == 10_000 and elapsed < 1.0,
        f"{exact}/{len(QUANTITY_CORPUS)} exact, {roundtrips}/10000 round-trips, {elapsed:.2f}s",
    )


def test_criterion_gmm_em():
    start = time.perf_counter()
    k_hits = 0
    min_ari = 1.0
    monotone = True
    for seed in range(20):
        x, labels, _ = two_blobs(seed=seed, n_per=40, sigma=0.05, distance=2.0)
        model = fit_gmm(x, k_max=10, seed=seed)
        for prev, cur in zip(model.ll_history, model.ll_history[1:]):
            if cur < prev - 1e-8:
                monotone = False
        if model.k == 2:
            k_hits += 1
            assignments, _ = assign_clusters(model, model.project(x))
            min_ari = min(min_ari, adjusted_rand_index(labels, assignments))

    rng = np.random.RandomState(11)
    centers = rng.uniform(-8, 8, size=(12, 2))
    x12 = np.vstack([rng.normal(c, 0.05, size=(17, 2)) for c in centers])
    capped = fit_gmm(x12, k_max=10, seed=11)
    elapsed = time.perf_counter() - start

    _verdict(
        "gmm-em",
        k_hits >= 19 and min_ari >= 0.95 and monotone and capped.k <= 10 and elapsed < 5.0,
        f"k=2 in {k_hits}/20, min ARI {min_ari:.3f}, monotone={monotone}, cap k={capped.k}, {elapsed:.2f}s",
    )


def test_criterion_paper_worked_examples(tmp_path):
    from factweave.extraction.pipeline import (
        _EXTRACT_INSTRUCTIONS,
        extract_data_points,
        refine_extraction,
        validate_extraction,
    )
    from factweave.ids import IdAllocator
    from factweave.model import Article, DataPoint, Fact, FactSet, MergedFactSet, favicon_url_for
    from factweave.organization.entities import fill_missing_entities
    from factweave.organization.merging import check_merge_constraints, merge_fact_sets
    from factweave.providers.llm import MockStructuredLLM, build_prompt, fixture_path
    from factweave.providers.synthesizer import RuleBasedSynthesizer

    llm = MockStructuredLLM(synthesizer=RuleBasedSynthesizer())

    def fact(fid, content, points, article_id="a1"):
        return Fact(
            id=fid, article_id=article_id, paragraph_index=0, content=content,
            data_points=points, relevance=D("0.5"), status="refined",
        )

    def article(aid, paragraphs, year=2024):
        return Article(
            id=aid, url=f"https://example.org/{aid}", title="T", snippet="",
            source_domain="example.org", published_year=year,
            retrieved_at="2025-01-01T00:00:00Z", paragraphs=paragraphs,
            favicon_url=favicon_url_for("example.org"),
        )

    # label/value/unit extraction, exact fields pinned by fixture
    content = "The number of homeschoolers in the U.S. is 3.7 million."
    prompt = build_prompt(
        _EXTRACT_INSTRUCTIONS,
        {"content": content, "article": {"title": "T", "published_year": 2024}},
    )
    path = fixture_path(tmp_path, "extract_data_points", prompt)
    path.parent.mkdir(parents=True)
    path.write_text(json.dumps({
        "data_points": [{"label": "Homeschooled Children", "value": "3.7", "unit": "million", "series_key": None}]
    }))
    fixture_llm = MockStructuredLLM(fixture_dir=tmp_path, synthesizer=RuleBasedSynthesizer())
    extracted = extract_data_points(fact("f1", content, []), article("a1", [content]), fixture_llm)
    ex1 = extracted.data_points == [DataPoint("Homeschooled Children", D("3.7"), "million", None)]

    # wrong value 3 corrected to 3.7, content untouched
    wrong = fact("f2", content, [DataPoint("Homeschooled Children", D("3"), "million")])
    sources = {"f2": content}
    issues = validate_extraction([wrong], sources, llm)
    ex2a = [i.kind for i in issues] == ["wrong_value"] and "3.7" in issues[0].suggested_fix
    refined = refine_extraction([wrong], issues, sources, {"f2": 2024}, llm)
    ex2b = refined[0].content == content and refined[0].data_points[0].value == D("3.7")
    ex2c = validate_extraction(refined, sources, llm) == []

    # merge triple: percent reasons merge; count-vs-percent and
    # short-vs-long time frames are rejected back to singletons
    reasons = [
        fact("f3", "23.1% said that the reason for homeschooling was the child's special needs.",
             [DataPoint("Special Needs", D("23.1"), "%")]),
        fact("f4", "15.6% of parents said that the child had a physical or mental problem.",
             [DataPoint("Health Problem", D("15.6"), "%")]),
        fact("f5", "Three million children are homeschooled, about 3 million in total.",
             [DataPoint("Homeschooled Children", D("3"), "million")]),
        fact("f6", "Homeschooling increased by 25% between 2020 and 2021.",
             [DataPoint("Increase", D("25"), "%")]),
        fact("f7", "Homeschooling rates have doubled over the past decade, a 100% rise.",
             [DataPoint("Rise", D("100"), "%")]),
    ]
    facts_by_id = {f.id: f for f in reasons}
    sets = [FactSet(f"s{i}", "c1", [f.id], f.content) for i, f in enumerate(reasons, start=1)]
    articles = {"a1": article("a1", ["_"])}
    merged = merge_fact_sets(
        "c1", sets, facts_by_id, articles,
        proposals=[["s1", "s2"], ["s3"], ["s4"], ["s5"]],
        ids=IdAllocator(),
    )
    ex3a = [m.fact_set_ids for m in merged] == [["s1", "s2"], ["s3"], ["s4"], ["s5"]]

    sets_by_id = {s.id: s for s in sets}
    count_vs_pct = MergedFactSet("mX", "c1", ["s1", "s3"], "", "")
    ex3b = [v.kind for v in check_merge_constraints(count_vs_pct, sets_by_id, facts_by_id, articles)] == ["unit_family"]
    short_vs_long = MergedFactSet("mY", "c1", ["s4", "s5"], "", "")
    ex3c = [v.kind for v in check_merge_constraints(short_vs_long, sets_by_id, facts_by_id, articles)] == ["time_frame"]
    forced = merge_fact_sets(
        "c1", [sets_by_id["s4"], sets_by_id["s5"]], facts_by_id, articles,
        proposals=[["s4", "s5"]], ids=IdAllocator(),
    )
    ex3d = [m.fact_set_ids for m in forced] == [["s4"], ["s5"]]

    # missing-GPE fill: the source confirms the U.S., the deficient fact gains it
    src = (
        "23.1% of parents in the U.S. cited special needs as a reason for homeschooling. "
        "15.6% of parents said that the child had a physical or mental problem."
    )
    a_fill = article("a9", [src], year=2023)
    f_a = fact("f8", "23.1% of parents in the U.S. cited special needs as a reason for homeschooling.",
               [DataPoint("Special Needs", D("23.1"), "%")], article_id="a9")
    f_b = fact("f9", "15.6% of parents said that the child had a physical or mental problem.",
               [DataPoint("Health Problem", D("15.6"), "%")], article_id="a9")
    fill_sets = {
        "s8": FactSet("s8", "c1", ["f8"], f_a.content),
        "s9": FactSet("s9", "c1", ["f9"], f_b.content),
    }
    fill_merged = MergedFactSet("m1", "c1", ["s8", "s9"], "", "%")
    replacements = fill_missing_entities(
        fill_merged, fill_sets, {"f8": f_a, "f9": f_b}, {"a9": a_fill}, llm
    )
    ex4 = replacements["f9"].content == (
        "15.6% of parents said that the child had a physical or mental problem in the U.S."
    )

    ok = all([ex1, ex2a, ex2b, ex2c, ex3a, ex3b, ex3c, ex3d, ex4])
    _verdict(
        "paper-worked-examples",
        ok,
        f"extract={ex1} correct={ex2a and ex2b and ex2c} merge={ex3a and ex3b and ex3c and ex3d} fill={ex4}",
    )


def test_criterion_deterministic_end_to_end(tmp_path):
    golden = ROOT / "fixtures" / "golden" / "homeschooling_story.json"
    out = tmp_path / "story.json"
    start = time.perf_counter()
    generate = subprocess.run(
        [
            sys.executable, "-m", "factweave.cli", "generate",
            "--query", "Is homeschooling preferred by people?",
            "--mode", "mock",
            "--corpus", "fixtures/homeschooling",
            "--seed", "42",
            "--out", str(out),
        ],
        cwd=ROOT,
        capture_output=True,
        text=True,
    )
    elapsed = time.perf_counter() - start
    identical = generate.returncode == 0 and out.read_bytes() == golden.read_bytes()
    validate = subprocess.run(
        [sys.executable, "-m", "factweave.cli", "validate", str(out)],
        cwd=ROOT,
        capture_output=True,
        text=True,
    )
    _verdict(
        "deterministic-end-to-end",
        identical and validate.returncode == 0 and elapsed < 30.0,
        f"byte-identical={identical}, validate rc={validate.returncode}, {elapsed:.1f}s",
    )


def test_criterion_partition_traceability(tmp_path, golden_story):
    from factweave.pipeline import PipelineConfig, generate_story
    from factweave.validation import validate_story_document

    assert_story_sound(golden_story)
    checked = 1
    for seed in range(20):
        corpus = tmp_path / f"corpus{seed:02d}"
        corpus.mkdir()
        rng = random.Random(2000 + seed)
        _write_random_corpus(corpus, rng)
        config = PipelineConfig(mode="mock", corpus_dir=corpus, seed=seed)
        doc = generate_story("how quickly are services being adopted?", config)
        assert validate_story_document(doc) == []
        assert_story_sound(doc)
        checked += 1
    _verdict("partition-traceability", checked == 21, f"{checked} stories checked")


def test_criterion_service(tmp_path, corpus_dir, fixtures_dir):
    import threading
    import urllib.request

    import jsonschema

    from factweave.jobs import JOB_STATES, JobManager
    from factweave.pipeline import PipelineConfig
    from factweave.service import StoryService
    from factweave.storage import StoryStore

    start = time.perf_counter()
    store = StoryStore(tmp_path / "data")
    jobs = JobManager(store, PipelineConfig(mode="mock", corpus_dir=corpus_dir, seed=42))
    httpd = StoryService(jobs).make_server(port=0)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{httpd.server_address[1]}"
    try:
        req = urllib.request.Request(
            f"{base}/api/stories",
            data=json.dumps({"query": "Is homeschooling preferred by people?"}).encode(),
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        with urllib.request.urlopen(req, timeout=10) as resp:
            job_id = json.loads(resp.read())["job_id"]

        states = []
        deadline = time.monotonic() + 55
        while time.monotonic() < deadline:
            with urllib.request.urlopen(f"{base}/api/jobs/{job_id}", timeout=10) as resp:
                job = json.loads(resp.read())
            states.append(job["state"])
            if job["state"] in ("ready", "failed"):
                break
            time.sleep(0.05)
        reached_ready = job["state"] == "ready"
        indices = [JOB_STATES.index(s) for s in states]
        monotone = indices == sorted(indices)

        with urllib.request.urlopen(f"{base}/api/stories/{job['story_id']}", timeout=10) as resp:
            story = json.loads(resp.read())
        schema = json.loads((ROOT / "schemas" / "story.v1.json").read_text())
        jsonschema.validate(story, schema)
        schema_valid = True
    finally:
        httpd.shutdown()
        httpd.server_close()

    failure_jobs = JobManager(
        StoryStore(tmp_path / "data2"),
        PipelineConfig(mode="mock", fixture_dir=fixtures_dir / "failure", seed=1),
    )
    failed_id = failure_jobs.create_story_job("unreachable homeschooling archive")
    failure_jobs.wait(failed_id, timeout=30)
    failed = failure_jobs.get_job(failed_id)
    failure_ok = failed.state == "failed" and "AllFetchesFailed" in failed.error_detail

    elapsed = time.perf_counter() - start
    _verdict(
        "service",
        reached_ready and monotone and schema_valid and failure_ok and elapsed < 60.0,
        f"ready={reached_ready}, monotone={monotone}, schema_valid={schema_valid}, "
        f"failure={failure_ok}, {elapsed:.1f}s",
    )
