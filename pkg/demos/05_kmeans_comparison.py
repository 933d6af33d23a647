"""Density clustering vs the two-cluster k-means baseline.

Both run on the same standardized rows. Fault flags follow the same
rule for both: the biggest cluster is normal operation, everything else
(including density noise) is a fault.
"""

import numpy as np

from hvacfdd import (
    assign_fault_flags,
    build_matrix,
    calinski_harabasz,
    classification_metrics,
    confusion_counts,
    extract_clusters,
    fit_kmeans,
    format_metric,
    k_distance_curve,
    optics,
    run_optics,
    standardize,
    suggest_eps,
    synthetic,
)

frame = synthetic.make_synthetic_frame(seed=13)
matrix, mask = build_matrix(frame, list(frame.channel_names))
std, _ = standardize(matrix)
truth = frame.ground_truth[mask]

eps = suggest_eps(k_distance_curve(std, 15))
result = run_optics(std, optics.OpticsParams(eps=eps, min_pts=15))
finite = np.sort(result.reachability[np.isfinite(result.reachability)])
labels = extract_clusters(result, suggest_eps(finite))
optics_flags = assign_fault_flags(labels).flags

km = fit_kmeans(std, k=2, seed=0, restarts=10)
km_flags = (km.labels != np.argmax(np.bincount(km.labels))).astype(np.int8)

print(f"rows: {std.shape[0]}  eps: {eps:.3f}  clusters: {labels.sizes()}")
print(f"k-means inertia: {km.inertia:.1f} after {km.iterations} iterations (seed {km.seed})")
print(f"calinski-harabasz of the k-means split: {calinski_harabasz(std, km.labels):.1f}")

print("\nalgorithm  precision recall  f1      accuracy")
for name, flags in (("density", optics_flags), ("k-means", km_flags)):
    row = classification_metrics(confusion_counts(flags, truth))
    cells = "   ".join(
        format_metric(v) for v in (row.precision, row.recall, row.f1, row.accuracy)
    )
    print(f"{name:10s}{cells}")
