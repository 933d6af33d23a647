"""Unsupervised fault detection for terminal HVAC units.

Telemetry goes through mode categorization, occupancy and IQR filters
and standardization, optionally through PCA, and into a density ordering
whose reachability plot an analyst thresholds to extract clusters; the
minority clusters and noise become fault flags that are scored against
ground truth, with a k-means baseline alongside.
"""

from .dataset_io import (
    FAULT,
    NORMAL,
    ChannelSchema,
    FaultInterval,
    TimeSeriesFrame,
    apply_fault_intervals,
    export_labels,
    load_frame,
    load_labels,
    save_frame,
)
from .evaluation import (
    ConfusionCounts,
    FaultAssignment,
    MetricsRow,
    assign_fault_flags,
    classification_metrics,
    confusion_counts,
    fault_intervals,
    format_metric,
)
from .kmeans import KmeansResult, calinski_harabasz, fit_kmeans
from .optics import (
    NOISE,
    UNDEFINED,
    ClusterLabels,
    OpticsParams,
    OpticsResult,
    core_distance,
    dbscan_oracle,
    extract_clusters,
    k_distance_curve,
    neighbors,
    run_optics,
    suggest_eps,
)
from .pca import (
    LoadingsReport,
    PcaModel,
    correlation_class,
    covariance,
    fit_pca,
    loadings_report,
    project,
    reconstruct,
    scree_curve,
    select_pc_count,
)
from .preprocessing import (
    FeatureMatrix,
    ModeConfig,
    StandardScaler,
    build_matrix,
    classify_months,
    filter_operational,
    iqr_filter,
    select_months,
    standardize,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
