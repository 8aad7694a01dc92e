"""Relevance scoring: cosine similarity between fact and query embeddings."""

from __future__ import annotations

import numpy as np


class ZeroVector(ValueError):
    """Cosine similarity is undefined for a zero-length vector."""


def compute_relevance(fact_embedding: np.ndarray, query_embedding: np.ndarray) -> float:
    """Exact cosine similarity in [-1, 1].

    Cluster-level relevance is the plain mean of member scores and is
    computed where clusters are assembled, not here.
    """
    a = np.asarray(fact_embedding, dtype=float)
    b = np.asarray(query_embedding, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("zero vector has no direction")
    return float(np.dot(a, b) / (na * nb))
