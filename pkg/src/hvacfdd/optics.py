"""Density-based ordering, reachability analysis and cluster extraction.

The ordering pass seeds at the lowest-index unprocessed point, then
repeatedly emits the seed-queue entry with minimum reachability (ties
broken by lowest row index), updating each unprocessed neighbor ``o`` of
an emitted core point ``p`` to ``min(current, max(core(p), dist(p, o)))``.
Exhausted components restart at the next lowest-index unprocessed point,
whose reachability stays undefined. Undefined distances are carried as
``inf`` in memory (they order above every real) and serialize as null.

Neighborhoods include the query point itself and a point is core when
its radius-``eps`` neighborhood holds at least ``min_pts`` points, so the
core distance is the distance to the ``min_pts``-th nearest neighbor
counting the point as its own first.

Cluster extraction scans the ordering against a horizontal threshold on
the reachability plot: positions at or below the line extend the open
cluster, positions above it either open a new cluster (when their core
distance clears the line) or fall out as noise. ``dbscan_oracle`` is a
deliberately naive flat clustering with the same density conventions,
kept as an independent cross-check for the extraction path.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    CurveTooShort,
    EmptyInput,
    KTooLarge,
    MissingValues,
    NonPositiveThreshold,
)

UNDEFINED = np.inf
NOISE = -1


@dataclass(frozen=True)
class OpticsParams:
    """Neighborhood radius and minimum density; Euclidean metric only.

    ``start_seed`` randomizes only the order in which exhausted
    components restart (seeded, so still reproducible); the default
    starts at the lowest unprocessed row index.
    """

    eps: float
    min_pts: int = 15
    start_seed: int | None = None

    def __post_init__(self):
        if not self.eps > 0:
            raise NonPositiveThreshold(f"eps must be > 0, got {self.eps}")
        if self.min_pts < 2:
            raise KTooLarge(f"min_pts must be >= 2, got {self.min_pts}")


@dataclass(frozen=True)
class OpticsResult:
    """Ordering plus per-position reachability and per-row core distances.

    ``reachability[j]`` belongs to the point ``ordering[j]``; ``inf``
    marks undefined values. ``predecessor`` is -1 for run starts.
    """

    ordering: np.ndarray
    reachability: np.ndarray
    core_distance: np.ndarray
    predecessor: np.ndarray
    params: OpticsParams

    def __post_init__(self):
        for name, dtype in (
            ("ordering", np.int64),
            ("reachability", np.float64),
            ("core_distance", np.float64),
            ("predecessor", np.int64),
        ):
            arr = np.asarray(getattr(self, name), dtype=dtype)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return int(self.ordering.size)


@dataclass(frozen=True)
class ClusterLabels:
    """Per-row cluster ids (-1 = noise), contiguous from 0 by appearance."""

    cluster_id: np.ndarray
    threshold: float
    num_clusters: int

    def __post_init__(self):
        ids = np.asarray(self.cluster_id, dtype=np.int64)
        ids.setflags(write=False)
        object.__setattr__(self, "cluster_id", ids)
        found = np.unique(ids[ids >= 0])
        expected = np.arange(self.num_clusters)
        if found.size != self.num_clusters or not np.array_equal(found, expected):
            raise EmptyInput(
                f"cluster ids {found.tolist()} not contiguous for "
                f"num_clusters={self.num_clusters}"
            )

    @property
    def noise_mask(self) -> np.ndarray:
        return self.cluster_id == NOISE

    def sizes(self) -> dict[int, int]:
        """Cluster id -> member count, noise under -1."""
        ids, counts = np.unique(self.cluster_id, return_counts=True)
        return {int(i): int(c) for i, c in zip(ids, counts)}


def _as_points(points) -> np.ndarray:
    values = np.asarray(getattr(points, "values", points), dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if values.ndim != 2 or values.shape[0] == 0:
        raise EmptyInput("need a non-empty 2-D point array")
    if np.isnan(values).any():
        raise MissingValues("points contain missing values")
    return values


def _dist_row(values: np.ndarray, i: int) -> np.ndarray:
    diff = values - values[i]
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def neighbors(points, i: int, eps: float) -> list[int]:
    """Indices (self included) within Euclidean distance eps, ascending."""
    if not eps > 0:
        raise NonPositiveThreshold(f"eps must be > 0, got {eps}")
    values = _as_points(points)
    return np.where(_dist_row(values, i) <= eps)[0].tolist()


def core_distance(points, i: int, params: OpticsParams) -> float:
    """Distance to the min_pts-th nearest neighbor, or inf when too sparse."""
    values = _as_points(points)
    d = _dist_row(values, i)
    if int(np.count_nonzero(d <= params.eps)) < params.min_pts:
        return UNDEFINED
    return float(np.partition(d, params.min_pts - 1)[params.min_pts - 1])


def _all_core_distances(values: np.ndarray, params: OpticsParams) -> np.ndarray:
    m = values.shape[0]
    core = np.full(m, UNDEFINED)
    for i in range(m):
        d = _dist_row(values, i)
        if int(np.count_nonzero(d <= params.eps)) >= params.min_pts:
            core[i] = np.partition(d, params.min_pts - 1)[params.min_pts - 1]
    return core


def run_optics(points, params: OpticsParams) -> OpticsResult:
    """Produce the density ordering; deterministic for a fixed input."""
    values = _as_points(points)
    m = values.shape[0]
    core = _all_core_distances(values, params)

    reach = np.full(m, UNDEFINED)
    predecessor = np.full(m, -1, dtype=np.int64)
    processed = np.zeros(m, dtype=bool)
    ordering = np.empty(m, dtype=np.int64)
    reach_in_order = np.empty(m, dtype=np.float64)
    pos = 0
    heap: list[tuple[float, int]] = []

    def emit(idx: int):
        nonlocal pos
        processed[idx] = True
        ordering[pos] = idx
        reach_in_order[pos] = reach[idx]
        pos += 1

    def expand(idx: int):
        if not np.isfinite(core[idx]):
            return
        d = _dist_row(values, idx)
        for o in np.where(d <= params.eps)[0]:
            if processed[o]:
                continue
            candidate = max(core[idx], d[o])
            if candidate < reach[o]:
                reach[o] = candidate
                predecessor[o] = idx
                heapq.heappush(heap, (candidate, int(o)))

    if params.start_seed is None:
        start_order = range(m)
    else:
        start_order = np.random.default_rng(params.start_seed).permutation(m)
    for start in start_order:
        start = int(start)
        if processed[start]:
            continue
        emit(start)  # run start, reachability stays undefined
        expand(start)
        while heap:
            r, idx = heapq.heappop(heap)
            if processed[idx] or r > reach[idx]:
                continue  # stale entry superseded by a better push
            emit(idx)
            expand(idx)

    return OpticsResult(
        ordering=ordering,
        reachability=reach_in_order,
        core_distance=core,
        predecessor=predecessor,
        params=params,
    )


def k_distance_curve(points, k: int) -> np.ndarray:
    """Sorted distances from each point to its k-th nearest other point."""
    values = _as_points(points)
    m = values.shape[0]
    if not 1 <= k < m:
        raise KTooLarge(f"k must be in [1, {m - 1}], got {k}")
    out = np.empty(m)
    for i in range(m):
        d = np.delete(_dist_row(values, i), i)
        out[i] = np.partition(d, k - 1)[k - 1]
    out.sort()
    return out


def suggest_eps(curve) -> float:
    """Advisory eps: the curve value just before its largest forward jump."""
    curve = np.asarray(curve, dtype=np.float64)
    if curve.size < 3:
        raise CurveTooShort(f"need >= 3 curve points, got {curve.size}")
    jumps = curve[1:] - curve[:-1]
    return float(curve[int(np.argmax(jumps))])


def extract_clusters(result: OpticsResult, threshold: float) -> ClusterLabels:
    """Cut the reachability plot at a horizontal threshold.

    Scanning the ordering left to right: reachability <= threshold joins
    the open cluster; otherwise a point whose core distance clears the
    threshold opens a new cluster, and anything else is noise.
    """
    if not threshold > 0:
        raise NonPositiveThreshold(f"threshold must be > 0, got {threshold}")
    m = len(result)
    labels = np.full(m, NOISE, dtype=np.int64)
    current = -1
    next_id = 0
    for position in range(m):
        row = int(result.ordering[position])
        if result.reachability[position] <= threshold:
            # a defined reachability this low always follows an open cluster
            labels[row] = current
        elif result.core_distance[row] <= threshold:
            current = next_id
            next_id += 1
            labels[row] = current
        # else noise
    return ClusterLabels(cluster_id=labels, threshold=float(threshold), num_clusters=next_id)


def dbscan_oracle(points, eps: float, min_pts: int) -> ClusterLabels:
    """Brute-force flat density clustering with the same conventions.

    O(m^2) and index-deterministic; border points go to the first cluster
    that reaches them. Exists to cross-check threshold extraction.
    """
    values = _as_points(points)
    params = OpticsParams(eps=eps, min_pts=min_pts)
    m = values.shape[0]
    neighborhoods = []
    for i in range(m):
        neighborhoods.append(np.where(_dist_row(values, i) <= eps)[0])
    is_core = np.array([nb.size >= params.min_pts for nb in neighborhoods])

    labels = np.full(m, NOISE, dtype=np.int64)
    expanded = np.zeros(m, dtype=bool)
    next_id = 0
    for i in range(m):
        if not is_core[i] or labels[i] != NOISE:
            continue
        labels[i] = next_id
        expanded[i] = True
        queue = deque(int(o) for o in neighborhoods[i])
        while queue:
            o = queue.popleft()
            if labels[o] == NOISE:
                labels[o] = next_id
            if is_core[o] and not expanded[o]:
                expanded[o] = True
                queue.extend(int(q) for q in neighborhoods[o])
        next_id += 1
    return ClusterLabels(cluster_id=labels, threshold=float(eps), num_clusters=next_id)
