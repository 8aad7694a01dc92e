"""Gaussian mixture fitting for thematic clustering of embeddings.

Diagonal-covariance EM initialized from a k-means++ seeded k-means pass,
with a variance floor and BIC model selection over k = 1..min(k_max, n).
High-dimensional inputs are first projected with PCA so that small fact
collections do not produce singular covariances. Everything is seeded and
bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["DegenerateInput", "GmmModel", "fit_gmm", "assign_clusters"]

VARIANCE_FLOOR = 1e-6
CONVERGENCE_GAIN = 1e-6
MAX_ITERATIONS = 200
RESTARTS = 3
PCA_MAX_DIMS = 12
_KMEANS_ITERATIONS = 50

# a component this close to the variance floor in every dimension is a
# likelihood spike fit to coincident points, not structure
_COLLAPSE_FACTOR = 10.0
_MIN_SUPPORT = 2.0


class DegenerateInput(ValueError):
    """Raised when there is nothing to cluster."""


@dataclass(frozen=True)
class Projection:
    mean: np.ndarray  # (d,)
    components: np.ndarray  # (d_reduced, d)

    def apply(self, vectors: np.ndarray) -> np.ndarray:
        return (np.asarray(vectors, dtype=float) - self.mean) @ self.components.T


@dataclass(frozen=True)
class GmmModel:
    k: int
    weights: np.ndarray  # (k,)
    means: np.ndarray  # (k, d)
    variances: np.ndarray  # (k, d), floored diagonal covariance
    log_likelihood: float
    seed: int
    ll_history: list[float] = field(default_factory=list)
    bic_by_k: dict[int, float] = field(default_factory=dict)
    projection: Optional[Projection] = None

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def project(self, vectors: np.ndarray) -> np.ndarray:
        """Map raw input vectors into the model's (possibly reduced) space."""
        x = np.asarray(vectors, dtype=float)
        if self.projection is not None and x.shape[1] != self.dim:
            return self.projection.apply(x)
        return x


def _pca(x: np.ndarray, d_reduced: int) -> Projection:
    mean = x.mean(axis=0)
    centered = x - mean
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:d_reduced]
    # fix sign per component so SVD implementation details cannot flip results
    for i in range(components.shape[0]):
        j = int(np.argmax(np.abs(components[i])))
        if components[i, j] < 0:
            components[i] = -components[i]
    return Projection(mean=mean, components=components)


def _log_gaussian(x: np.ndarray, means: np.ndarray, variances: np.ndarray) -> np.ndarray:
    """(n, k) log densities under each diagonal Gaussian, one matmul per term."""
    inv = 1.0 / variances  # (k, d)
    const = np.sum(np.log(2.0 * np.pi * variances), axis=1)  # (k,)
    quad = (x * x) @ inv.T - 2.0 * (x @ (means * inv).T) + np.sum(means * means * inv, axis=1)
    return -0.5 * (const[None, :] + quad)


def _logsumexp_rows(a: np.ndarray) -> np.ndarray:
    m = a.max(axis=1, keepdims=True)
    return (m + np.log(np.exp(a - m).sum(axis=1, keepdims=True))).ravel()


def _kmeanspp_centers(x: np.ndarray, k: int, rng: np.random.RandomState) -> np.ndarray:
    n = x.shape[0]
    centers = [x[rng.randint(n)]]
    for _ in range(1, k):
        d2 = np.min(((x[:, None, :] - np.asarray(centers)[None, :, :]) ** 2).sum(axis=2), axis=1)
        total = d2.sum()
        if total <= 0:
            centers.append(x[rng.randint(n)])
            continue
        centers.append(x[rng.choice(n, p=d2 / total)])
    return np.asarray(centers)


def _kmeans(x: np.ndarray, k: int, rng: np.random.RandomState) -> np.ndarray:
    """k-means++ seeding refined by Lloyd iterations; returns hard labels."""
    centers = _kmeanspp_centers(x, k, rng)
    labels = np.zeros(x.shape[0], dtype=int)
    for _ in range(_KMEANS_ITERATIONS):
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        new_centers = centers.copy()
        for j in range(k):
            members = x[labels == j]
            if len(members):
                new_centers[j] = members.mean(axis=0)
        if np.allclose(new_centers, centers):
            break
        centers = new_centers
    return labels


def _run_em(x: np.ndarray, k: int, rng: np.random.RandomState) -> tuple[dict, list[float]]:
    n, d = x.shape
    labels = _kmeans(x, k, rng)
    global_var = np.maximum(x.var(axis=0), VARIANCE_FLOOR)
    means = np.empty((k, d))
    variances = np.empty((k, d))
    weights = np.empty(k)
    for j in range(k):
        members = x[labels == j]
        if len(members):
            means[j] = members.mean(axis=0)
            variances[j] = np.maximum(members.var(axis=0), VARIANCE_FLOOR)
            weights[j] = len(members) / n
        else:
            means[j] = x[rng.randint(n)]
            variances[j] = global_var
            weights[j] = 1.0 / n
    weights = weights / weights.sum()

    history: list[float] = []
    log_likelihood = -np.inf
    for _ in range(MAX_ITERATIONS):
        log_prob = _log_gaussian(x, means, variances) + np.log(weights)[None, :]
        norm = _logsumexp_rows(log_prob)
        ll = float(norm.sum())
        history.append(ll)
        resp = np.exp(log_prob - norm[:, None])

        nk = resp.sum(axis=0) + 10 * np.finfo(float).tiny
        weights = nk / n
        means = (resp.T @ x) / nk[:, None]
        variances = np.maximum((resp.T @ (x * x)) / nk[:, None] - means**2, VARIANCE_FLOOR)

        if ll - log_likelihood < CONVERGENCE_GAIN and np.isfinite(log_likelihood):
            log_likelihood = ll
            break
        log_likelihood = ll

    params = {
        "weights": weights,
        "means": means,
        "variances": variances,
        "log_likelihood": log_likelihood,
    }
    return params, history


def _is_degenerate(params: dict, n: int) -> bool:
    """Fits with a collapsed component do not compete in model selection.

    A component supported by fewer than two points, or whose variance sits at
    the floor in every dimension, scores an arbitrarily large likelihood that
    reflects coincident inputs rather than cluster structure.
    """
    weights = params["weights"]
    variances = params["variances"]
    for j in range(len(weights)):
        if weights[j] * n < _MIN_SUPPORT - 1e-9:
            return True
        if np.all(variances[j] <= _COLLAPSE_FACTOR * VARIANCE_FLOOR):
            return True
    return False


def fit_gmm(vectors: np.ndarray, k_max: int = 10, seed: int = 0) -> GmmModel:
    """Fit mixtures for every candidate k and keep the BIC winner.

    BIC = p ln(n) - 2 L-hat with p = k(2d) + (k - 1) free parameters
    (means and diagonal variances per component plus mixing weights).
    Each k gets three restarts; the best likelihood survives. Fits containing
    a collapsed spike component are excluded from selection.
    """
    x = np.asarray(vectors, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DegenerateInput("no vectors to cluster")
    n, d = x.shape

    projection: Optional[Projection] = None
    d_reduced = min(PCA_MAX_DIMS, n - 1)
    if d_reduced >= 1 and d > d_reduced:
        projection = _pca(x, d_reduced)
        x = projection.apply(x)
        d = d_reduced

    bic_by_k: dict[int, float] = {}
    best_fit: Optional[tuple[float, dict, list[float], int]] = None
    fallback_fit: Optional[tuple[float, dict, list[float], int]] = None
    for k in range(1, min(k_max, n) + 1):
        run_best: Optional[tuple[dict, list[float]]] = None
        for restart in range(RESTARTS):
            rng = np.random.RandomState((seed * 1_000_003 + k * 101 + restart) % (2**31 - 1))
            params, history = _run_em(x, k, rng)
            degenerate = _is_degenerate(params, n)
            better = run_best is None or (
                (not degenerate, params["log_likelihood"])
                > (not run_best[0]["degenerate"], run_best[0]["log_likelihood"])
            )
            if better:
                params["degenerate"] = degenerate
                run_best = (params, history)
        assert run_best is not None
        params, history = run_best
        p = k * (2 * d) + (k - 1)
        bic = float(p * np.log(n) - 2.0 * params["log_likelihood"])
        bic_by_k[k] = bic
        if fallback_fit is None:
            fallback_fit = (bic, params, history, k)
        if params["degenerate"]:
            continue
        if best_fit is None or bic < best_fit[0]:
            best_fit = (bic, params, history, k)

    if best_fit is None:
        best_fit = fallback_fit
    assert best_fit is not None
    _, params, history, k = best_fit
    return GmmModel(
        k=k,
        weights=params["weights"],
        means=params["means"],
        variances=params["variances"],
        log_likelihood=params["log_likelihood"],
        seed=seed,
        ll_history=history,
        bic_by_k=bic_by_k,
        projection=projection,
    )


def assign_clusters(model: GmmModel, vectors: np.ndarray) -> tuple[list[int], np.ndarray]:
    """Hard assignments plus per-point responsibilities.

    Assignment is the argmax responsibility with ties broken toward the
    lowest component index. Components that win no point are dropped and the
    remaining indices compacted; responsibility rows are renormalized over
    the surviving components so each still sums to one.
    """
    x = np.asarray(vectors, dtype=float)
    if x.shape[0] == 0:
        return [], np.zeros((0, model.k))
    log_prob = _log_gaussian(x, model.means, model.variances) + np.log(model.weights)[None, :]
    norm = _logsumexp_rows(log_prob)
    resp = np.exp(log_prob - norm[:, None])
    raw = resp.argmax(axis=1)  # argmax returns the first (lowest) index on ties

    used = sorted(set(int(i) for i in raw))
    remap = {old: new for new, old in enumerate(used)}
    assignments = [remap[int(i)] for i in raw]
    kept = resp[:, used]
    kept = kept / kept.sum(axis=1, keepdims=True)
    return assignments, kept
