"""CLI behaviors not covered by the acceptance run: validate exit codes, stdout mode."""

import json
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def run_cli(*args, **kwargs):
    return subprocess.run(
        [sys.executable, "-m", "factweave.cli", *args],
        cwd=ROOT,
        capture_output=True,
        text=True,
        **kwargs,
    )


def test_validate_clean_story_exits_zero(golden_path):
    result = run_cli("validate", str(golden_path))
    assert result.returncode == 0
    assert "no violations" in result.stdout


def test_validate_exit_code_counts_violations(tmp_path, golden_path):
    data = json.loads(golden_path.read_text())
    data["clusters"][0]["relevance"] = "0.000001"  # breaks ordering and the member mean
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(data))
    result = run_cli("validate", str(broken))
    assert result.returncode == len(result.stdout.strip().splitlines())
    assert result.returncode >= 2


def test_validate_exit_code_caps_at_125(tmp_path, golden_path):
    data = json.loads(golden_path.read_text())
    # dangling references from every unit: plenty more than 125 violations
    for unit in data["units"]:
        unit["fact_set_ids"] = ["s999"]
        unit["source_article_ids"] = ["a999"]
    for cluster in data["clusters"]:
        for fact in cluster["facts"]:
            fact["relevance"] = "7"
            fact["article_id"] = "a999"
    broken = tmp_path / "very_broken.json"
    broken.write_text(json.dumps(data))
    result = run_cli("validate", str(broken))
    assert result.returncode == 125


def test_generate_writes_to_stdout_by_default():
    result = run_cli(
        "generate",
        "--query",
        "Is homeschooling preferred by people?",
        "--mode",
        "mock",
        "--corpus",
        "fixtures/homeschooling",
        "--seed",
        "42",
    )
    assert result.returncode == 0
    doc = json.loads(result.stdout)
    assert doc["story_id"] == "story-aa039948f229"
