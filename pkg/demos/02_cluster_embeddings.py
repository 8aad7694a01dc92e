"""Thematic clustering demo: hashing embedder + mixture model + BIC.

Shows the two halves of fact organization: synthetic blobs where the model
selection is easy to verify, then mock-embedded sentences where thematic
vocabulary drives the grouping.
"""

import numpy as np

from factweave.organization.gmm import assign_clusters, fit_gmm
from factweave.providers.embed import MockEmbedder

print("-- synthetic blobs --")
rng = np.random.RandomState(0)
blob_a = rng.normal([0, 0], 0.05, size=(40, 2))
blob_b = rng.normal([2, 0], 0.05, size=(40, 2))
x = np.vstack([blob_a, blob_b])
model = fit_gmm(x, k_max=10, seed=0)
print(f"selected k={model.k} (BIC table: " + ", ".join(f"k={k}:{v:.0f}" for k, v in sorted(model.bic_by_k.items())[:4]) + " ...)")
print(f"means near the true centers: {np.round(sorted(model.means[:, 0]), 3)}")

print("\n-- mock-embedded sentences --")
sentences = [
    "The homeschooling growth rate reached 25% in 2021.",
    "The homeschooling growth rate peaked at 17% in 2020.",
    "The homeschooling growth rate was 9% in 2018.",
    "23.1% of parents cited special needs as a reason for homeschooling.",
    "15.6% of parents cited health problems as a reason for homeschooling.",
    "9% of parents cited academic dissatisfaction as a reason for homeschooling.",
    "32% of homeschooling families live in suburban areas.",
    "41% of homeschooling families live in the South.",
    "21% of homeschooling families live in urban areas.",
]
embedder = MockEmbedder()
vectors = np.vstack(embedder.embed_texts(sentences))
model = fit_gmm(vectors, k_max=10, seed=42)
assignments, responsibilities = assign_clusters(model, model.project(vectors))
print(f"selected k={model.k}; responsibility rows sum to {responsibilities.sum(axis=1).round(9).tolist()[:3]} ...")
for cluster in sorted(set(assignments)):
    print(f"cluster {cluster}:")
    for sentence, a in zip(sentences, assignments):
        if a == cluster:
            print(f"   {sentence}")
