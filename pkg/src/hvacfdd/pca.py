"""Principal component analysis on standardized telemetry matrices.

Fits by eigendecomposition of the explicit covariance matrix
``X.T @ X / (m - 1)`` (the column count here is small, so conditioning
is not a concern), selects the component count either manually or from
the largest eigenvalue gap of the scree curve, and classifies pairwise
channel correlations from the PC1/PC2 loadings:

* both products of paired weights positive  -> direct correlation
* exactly one product negative              -> inverse correlation
* both products negative                    -> no correlation

A deterministic sign convention (largest-magnitude entry of each
component made positive, ties broken by lowest index) makes repeated
fits bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidK,
    NumericalFailure,
    SchemaMismatch,
    TooFewRows,
    UnknownChannel,
)
from .preprocessing import FeatureMatrix

DIRECT = "direct"
INVERSE = "inverse"
NONE = "none"

# loadings smaller than this are flagged so the analyst knows the
# correlation class rests on near-zero weights
WEAK_WEIGHT = 0.1


@dataclass(frozen=True)
class PcaModel:
    """Eigenpairs of the covariance matrix, one component per column."""

    eigenvalues: np.ndarray
    components: np.ndarray
    explained_variance_ratio: np.ndarray
    column_names: tuple[str, ...]

    def __post_init__(self):
        for name in ("eigenvalues", "components", "explained_variance_ratio"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def n(self) -> int:
        return int(self.eigenvalues.size)


def covariance(matrix: FeatureMatrix) -> np.ndarray:
    """Sample covariance of a (zero-mean) matrix: X.T @ X / (m - 1)."""
    m = matrix.shape[0]
    if m < 2:
        raise TooFewRows(f"covariance needs >= 2 rows, got {m}")
    cov = matrix.values.T @ matrix.values / (m - 1)
    return (cov + cov.T) / 2.0  # kill round-off asymmetry


def fit_pca(matrix: FeatureMatrix) -> PcaModel:
    """Eigendecompose the covariance matrix into a deterministic model."""
    m, n = matrix.shape
    if m < 2:
        raise TooFewRows(f"PCA needs >= 2 rows, got {m}")
    if n < 1:
        raise TooFewRows("PCA needs at least one column")
    cov = covariance(matrix)
    try:
        eigenvalues, components = np.linalg.eigh(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(eigenvalues, kind="stable")[::-1]
    eigenvalues = np.maximum(eigenvalues[order], 0.0)
    components = components[:, order].copy()
    for j in range(n):
        mags = np.abs(components[:, j])
        # magnitudes within a relative 1e-8 of the max count as tied, so
        # the pivot (lowest tied index) survives round-off differences
        pivot = int(np.argmax(mags >= mags.max() * (1.0 - 1e-8)))
        if components[pivot, j] < 0:
            components[:, j] = -components[:, j]
    total = float(eigenvalues.sum())
    if total <= 0:
        raise NumericalFailure("covariance matrix has zero trace")
    return PcaModel(
        eigenvalues=eigenvalues,
        components=components,
        explained_variance_ratio=eigenvalues / total,
        column_names=matrix.columns,
    )


def scree_curve(model: PcaModel) -> list[float]:
    """Eigenvalues by component index, for plotting and manual k picks."""
    return [float(v) for v in model.eigenvalues]


def select_pc_count(model: PcaModel, method: str, k: int | None = None) -> int:
    """Pick how many components to keep.

    ``manual`` returns the supplied k after validation; ``scree_gap``
    returns the component count just before the largest drop between
    consecutive eigenvalues (ties resolved toward fewer components).
    """
    n = model.n
    if method == "manual":
        if k is None or not 1 <= k <= n:
            raise InvalidK(f"manual k must be in [1, {n}], got {k}")
        return int(k)
    if method == "scree_gap":
        if n == 1:
            return 1
        gaps = model.eigenvalues[:-1] - model.eigenvalues[1:]
        return int(np.argmax(gaps)) + 1
    raise InvalidK(f"unknown selection method {method!r}")


def project(model: PcaModel, matrix: FeatureMatrix, k: int) -> FeatureMatrix:
    """Transform rows into the space of the top-k components."""
    if matrix.columns != model.column_names:
        raise SchemaMismatch(
            f"matrix columns {matrix.columns} do not match model {model.column_names}"
        )
    if not 1 <= k <= model.n:
        raise InvalidK(f"k must be in [1, {model.n}], got {k}")
    projected = matrix.values @ model.components[:, :k]
    return FeatureMatrix(
        values=projected,
        timestamps=matrix.timestamps,
        columns=tuple(f"PC{i + 1}" for i in range(k)),
    )


def reconstruct(model: PcaModel, projected: FeatureMatrix) -> np.ndarray:
    """Map projected rows back to the original channel space."""
    k = projected.shape[1]
    if not 1 <= k <= model.n:
        raise InvalidK(f"projection has {k} columns for an n={model.n} model")
    return projected.values @ model.components[:, :k].T


def _weights(model: PcaModel, channel: str) -> tuple[float, float]:
    try:
        idx = model.column_names.index(channel)
    except ValueError:
        raise UnknownChannel(f"channel {channel!r} not in model") from None
    w1 = float(model.components[idx, 0])
    w2 = float(model.components[idx, 1]) if model.n > 1 else 0.0
    return w1, w2


def _sign(x: float) -> int:
    # zero weights count as positive for classification purposes
    return -1 if x < 0 else 1


def correlation_class(model: PcaModel, a: str, b: str) -> str:
    """Classify the relationship between two channels from PC1/PC2 weights."""
    a1, a2 = _weights(model, a)
    b1, b2 = _weights(model, b)
    negatives = (_sign(a1 * b1) < 0) + (_sign(a2 * b2) < 0)
    if negatives == 0:
        return DIRECT
    if negatives == 1:
        return INVERSE
    return NONE


def is_weak_pair(model: PcaModel, a: str, b: str) -> bool:
    """True when any weight behind the classification is near zero."""
    return any(abs(w) < WEAK_WEIGHT for w in (*_weights(model, a), *_weights(model, b)))


@dataclass(frozen=True)
class LoadingsReport:
    """PC1/PC2 weights per channel plus pairwise correlation classes."""

    weights: dict[str, tuple[float, float]]
    pairs: tuple[tuple[str, str, str, bool], ...]  # (a, b, class, weak)


def loadings_report(
    model: PcaModel, pairs: list[tuple[str, str]] | None = None
) -> LoadingsReport:
    """Tabulate PC1/PC2 weights and classify the requested channel pairs.

    With ``pairs`` omitted, every unordered channel pair is classified.
    """
    names = model.column_names
    if pairs is None:
        pairs = [(a, b) for i, a in enumerate(names) for b in names[i + 1 :]]
    weights = {name: _weights(model, name) for name in names}
    classified = tuple(
        (a, b, correlation_class(model, a, b), is_weak_pair(model, a, b))
        for a, b in pairs
    )
    return LoadingsReport(weights=weights, pairs=classified)
