"""Seeded k-means baseline and the Calinski-Harabasz score.

Lloyd iterations with k-means++ initialization; ``restarts`` independent
runs on consecutive seeds keep the result deterministic while avoiding
bad local minima. Comparisons against the density pipeline default to
k=2 (one normal cluster, one faulty).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLabels, KTooLarge

MAX_ITER = 300
REL_TOL = 1e-6

# stand-in for an infinite score when within-cluster dispersion is zero;
# keeps JSON round-trips finite
CALINSKI_HARABASZ_CAP = 1e12


@dataclass(frozen=True)
class KmeansResult:
    """Converged assignment, centroids and the inertia trace of the best run."""

    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    iterations: int
    seed: int
    inertia_history: tuple[float, ...]

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        centroids = np.asarray(self.centroids, dtype=np.float64)
        labels.setflags(write=False)
        centroids.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "centroids", centroids)


def _as_points(points) -> np.ndarray:
    values = np.asarray(getattr(points, "values", points), dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    return values


def _plusplus_init(values: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    m = values.shape[0]
    centroids = np.empty((k, values.shape[1]))
    centroids[0] = values[rng.integers(m)]
    d2 = ((values - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(m, p=d2 / total)
        else:
            idx = rng.integers(m)  # all points coincide with a centroid
        centroids[j] = values[idx]
        d2 = np.minimum(d2, ((values - centroids[j]) ** 2).sum(axis=1))
    return centroids


def _lloyd(values: np.ndarray, k: int, seed: int):
    rng = np.random.default_rng(seed)
    centroids = _plusplus_init(values, k, rng)
    m = values.shape[0]
    history: list[float] = []
    iteration = 0
    while True:
        iteration += 1
        d2 = ((values[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(d2, axis=1)
        inertia = float(d2[np.arange(m), labels].sum())
        if history:
            assert inertia <= history[-1] + 1e-9 * max(1.0, history[-1]), (
                "inertia increased between iterations"
            )
        history.append(inertia)
        if iteration >= MAX_ITER:
            break

        counts = np.bincount(labels, minlength=k)
        empties = np.where(counts == 0)[0]
        if empties.size:
            for j in empties:
                farthest = int(np.argmax(((values - centroids[j]) ** 2).sum(axis=1)))
                centroids[j] = values[farthest]
            continue  # re-assign against the reseeded centroids

        if len(history) >= 2:
            prev, cur = history[-2], history[-1]
            if prev == 0 or (prev - cur) / max(prev, 1e-300) < REL_TOL:
                break
        new_centroids = np.array(
            [values[labels == j].mean(axis=0) for j in range(k)]
        )
        if np.array_equal(new_centroids, centroids):
            break
        centroids = new_centroids
    return labels, centroids, history[-1], iteration, tuple(history)


def fit_kmeans(points, k: int, seed: int = 0, restarts: int = 10) -> KmeansResult:
    """Best-of-``restarts`` Lloyd runs on seeds seed, seed+1, ..."""
    values = _as_points(points)
    m = values.shape[0]
    if not 1 <= k <= m:
        raise KTooLarge(f"k must be in [1, {m}], got {k}")
    if restarts < 1:
        raise KTooLarge(f"restarts must be >= 1, got {restarts}")
    best = None
    for run_seed in range(seed, seed + restarts):
        labels, centroids, inertia, iterations, history = _lloyd(values, k, run_seed)
        if best is None or inertia < best[2]:
            best = (labels, centroids, inertia, iterations, history, run_seed)
    labels, centroids, inertia, iterations, history, run_seed = best
    return KmeansResult(
        labels=labels,
        centroids=centroids,
        inertia=inertia,
        iterations=iterations,
        seed=run_seed,
        inertia_history=history,
    )


def inertia_of(points, centroids: np.ndarray) -> float:
    """Sum of squared distances to the nearest of the given centroids."""
    values = _as_points(points)
    centroids = np.asarray(centroids, dtype=np.float64)
    d2 = ((values[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return float(d2.min(axis=1).sum())


def calinski_harabasz(points, labels) -> float:
    """Between/within dispersion ratio; higher means crisper clusters.

    Rows with negative labels (noise) are excluded. A zero within-cluster
    dispersion reports the finite cap instead of infinity.
    """
    values = _as_points(points)
    labels = np.asarray(labels, dtype=np.int64)
    keep = labels >= 0
    values, labels = values[keep], labels[keep]
    ids = np.unique(labels)
    m, k = values.shape[0], ids.size
    if k < 2:
        raise DegenerateLabels(f"need >= 2 clusters, got {k}")
    if m <= k:
        raise DegenerateLabels(f"need more rows ({m}) than clusters ({k})")
    overall = values.mean(axis=0)
    between = 0.0
    within = 0.0
    for cid in ids:
        member = values[labels == cid]
        centroid = member.mean(axis=0)
        between += member.shape[0] * float(((centroid - overall) ** 2).sum())
        within += float(((member - centroid) ** 2).sum())
    if within == 0:
        return CALINSKI_HARABASZ_CAP
    return (between / (k - 1)) / (within / (m - k))
