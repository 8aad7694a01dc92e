"""factweave: query-driven visual data stories mined from article collections.

The library retrieves articles for a natural-language query, extracts and
validates quantitative facts, organizes them into thematic clusters and
merged narrative units, and emits a canonical Story Document that a
scrollytelling frontend renders.
"""

from .model import (
    Article,
    ChartSeries,
    ChartSpec,
    Cluster,
    ClusterLink,
    DataPoint,
    Fact,
    FactSet,
    MergedFactSet,
    NarrativeUnit,
    StoryDocument,
    SummaryStats,
    deserialize_story,
    serialize_story,
)
from .pipeline import PipelineConfig, generate_story
from .validation import Violation, validate_story_document

__version__ = "0.1.0"

__all__ = [
    "Article",
    "ChartSeries",
    "ChartSpec",
    "Cluster",
    "ClusterLink",
    "DataPoint",
    "Fact",
    "FactSet",
    "MergedFactSet",
    "NarrativeUnit",
    "StoryDocument",
    "SummaryStats",
    "PipelineConfig",
    "Violation",
    "deserialize_story",
    "generate_story",
    "serialize_story",
    "validate_story_document",
    "__version__",
]
