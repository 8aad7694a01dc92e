from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent

GOLDEN_QUERY = "Is homeschooling preferred by people?"
GOLDEN_SEED = 42


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return ROOT / "fixtures" / "homeschooling"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return ROOT / "fixtures"


@pytest.fixture(scope="session")
def golden_path() -> Path:
    return ROOT / "fixtures" / "golden" / "homeschooling_story.json"


@pytest.fixture(scope="session")
def golden_story(golden_path):
    from factweave.model import deserialize_story

    return deserialize_story(golden_path.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def golden_regenerated(corpus_dir):
    """One full mock pipeline run shared by the tests that inspect it."""
    from factweave.pipeline import PipelineConfig, generate_story

    config = PipelineConfig(mode="mock", corpus_dir=corpus_dir, seed=GOLDEN_SEED)
    return generate_story(GOLDEN_QUERY, config)
