import numpy as np
import pytest

from hvacfdd.errors import InvalidK, SchemaMismatch, TooFewRows, UnknownChannel
from hvacfdd.pca import (
    DIRECT,
    INVERSE,
    NONE,
    PcaModel,
    correlation_class,
    covariance,
    fit_pca,
    is_weak_pair,
    loadings_report,
    project,
    reconstruct,
    select_pc_count,
)
from hvacfdd.preprocessing import FeatureMatrix, standardize


def matrix_from(values, names=None):
    values = np.asarray(values, dtype=float)
    names = names or tuple(f"c{i}" for i in range(values.shape[1]))
    return FeatureMatrix(
        values=values,
        timestamps=np.arange(values.shape[0], dtype=np.int64),
        columns=tuple(names),
    )


def standardized_random(rng, m, n):
    out, _ = standardize(matrix_from(rng.standard_normal((m, n))))
    return out


def test_covariance_hand_computed():
    cov = covariance(matrix_from([[1.0, -1.0], [-1.0, 1.0]]))
    assert np.allclose(cov, [[2.0, -2.0], [-2.0, 2.0]])


def test_covariance_identical_columns():
    x = np.array([[-1.0], [0.0], [1.0]])
    cov = covariance(matrix_from(np.hstack([x, x])))
    assert np.allclose(cov, [[1.0, 1.0], [1.0, 1.0]])


def test_covariance_unit_diagonal_for_standardized(rng):
    std = standardized_random(rng, 5, 3)
    cov = covariance(std)
    assert abs(np.trace(cov) - 3) < 1e-8
    assert np.allclose(cov, cov.T, atol=1e-12)


def test_covariance_too_few_rows():
    with pytest.raises(TooFewRows):
        covariance(matrix_from([[1.0, 2.0]]))


def test_fit_pca_perfectly_correlated_columns():
    x = np.array([[-1.0], [0.0], [1.0]])
    model = fit_pca(matrix_from(np.hstack([x, x]), ("a", "b")))
    assert np.allclose(model.eigenvalues, [2.0, 0.0], atol=1e-12)
    assert np.allclose(model.components[:, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)])


def test_fit_pca_deterministic_sign_convention(rng):
    std = standardized_random(rng, 60, 6)
    a = fit_pca(std)
    b = fit_pca(std)
    assert np.array_equal(a.components, b.components)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    for j in range(a.n):
        pivot = int(np.argmax(np.abs(a.components[:, j])))
        assert a.components[pivot, j] > 0


def test_select_pc_count_scree_gap():
    model = PcaModel(
        eigenvalues=np.array([5.0, 4.8, 0.1, 0.05]),
        components=np.eye(4),
        explained_variance_ratio=np.array([5.0, 4.8, 0.1, 0.05]) / 9.95,
        column_names=("a", "b", "c", "d"),
    )
    assert select_pc_count(model, "scree_gap") == 2
    assert select_pc_count(model, "manual", 2) == 2
    assert select_pc_count(model, "manual", 3) == 3
    with pytest.raises(InvalidK):
        select_pc_count(model, "manual", 0)
    with pytest.raises(InvalidK):
        select_pc_count(model, "manual", 5)
    with pytest.raises(InvalidK):
        select_pc_count(model, "nope")


def test_project_full_rank_reconstruction(rng):
    std = standardized_random(rng, 40, 5)
    model = fit_pca(std)
    projected = project(model, std, 5)
    back = reconstruct(model, projected)
    assert np.max(np.abs(back - std.values)) < 1e-8


def test_project_variances_match_eigenvalues(rng):
    std = standardized_random(rng, 200, 6)
    model = fit_pca(std)
    projected = project(model, std, 3)
    variances = projected.values.var(axis=0, ddof=1)
    assert np.allclose(variances, model.eigenvalues[:3], atol=1e-8)
    cov = np.cov(projected.values.T)
    off = cov - np.diag(np.diag(cov))
    assert np.max(np.abs(off)) < 1e-6


def test_project_single_component_on_correlated_pair():
    x = np.array([[-1.0], [0.0], [1.0]])
    std, _ = standardize(matrix_from(np.hstack([x, 2 * x]), ("a", "b")))
    model = fit_pca(std)
    projected = project(model, std, 1)
    total = std.values.var(axis=0, ddof=1).sum()
    assert abs(projected.values.var(ddof=1) - total) < 1e-10


def test_project_errors(rng):
    std = standardized_random(rng, 10, 3)
    model = fit_pca(std)
    with pytest.raises(InvalidK):
        project(model, std, 4)
    other = matrix_from(std.values, ("x", "y", "z"))
    with pytest.raises(SchemaMismatch):
        project(model, other, 2)


# weights from the reference loadings table for the field-study unit
TABLE_WEIGHTS = {
    "T": (0.61, 0.46),
    "Q": (-0.06, -0.11),
    "INSLAB-T": (0.52, 0.45),
    "DA-T": (0.76, 0.19),
    "CLG-O": (-0.75, 0.13),
    "HTG-O": (0.61, 0.27),
    "ST": (0.45, 0.68),
    "RT": (0.42, 0.57),
    "VR": (-0.21, 0.41),
    "EA-T": (-0.36, 0.53),
    "EA-F": (-0.26, 0.33),
    "DA-F": (-0.10, 0.18),
}


def model_from_weight_table():
    names = tuple(TABLE_WEIGHTS)
    n = len(names)
    components = np.zeros((n, n))
    for i, name in enumerate(names):
        components[i, 0], components[i, 1] = TABLE_WEIGHTS[name]
    ev = np.array([2.0, 1.0] + [0.0] * (n - 2))
    return PcaModel(
        eigenvalues=ev,
        components=components,
        explained_variance_ratio=ev / ev.sum(),
        column_names=names,
    )


def test_correlation_classes_from_weight_table():
    model = model_from_weight_table()
    assert correlation_class(model, "T", "INSLAB-T") == DIRECT
    assert correlation_class(model, "T", "HTG-O") == DIRECT
    assert correlation_class(model, "T", "CLG-O") == INVERSE
    assert correlation_class(model, "T", "Q") == NONE
    assert correlation_class(model, "CLG-O", "DA-T") == INVERSE
    with pytest.raises(UnknownChannel):
        correlation_class(model, "T", "BOGUS")


def test_weak_weight_flag():
    model = model_from_weight_table()
    assert is_weak_pair(model, "T", "Q")  # |−0.06| < 0.1
    assert not is_weak_pair(model, "T", "CLG-O")


def test_loadings_report_all_pairs():
    model = model_from_weight_table()
    report = loadings_report(model)
    n = len(TABLE_WEIGHTS)
    assert len(report.pairs) == n * (n - 1) // 2
    assert report.weights["CLG-O"] == (-0.75, 0.13)
    classes = {(a, b): cls for a, b, cls, _ in report.pairs}
    assert classes[("T", "Q")] == NONE


def test_trace_preservation_and_row_shuffle(rng):
    std = standardized_random(rng, 120, 8)
    model = fit_pca(std)
    assert abs(model.eigenvalues.sum() - 8) < 1e-6
    perm = rng.permutation(120)
    shuffled = FeatureMatrix(
        values=std.values[perm], timestamps=std.timestamps[perm], columns=std.columns
    )
    model2 = fit_pca(shuffled)
    assert np.max(np.abs(model.eigenvalues - model2.eigenvalues)) < 1e-10
    assert np.max(np.abs(model.components - model2.components)) < 1e-10


def test_eigenpair_residuals(rng):
    std = standardized_random(rng, 90, 7)
    model = fit_pca(std)
    cov = covariance(std)
    for j in range(model.n):
        v = model.components[:, j]
        residual = cov @ v - model.eigenvalues[j] * v
        assert np.linalg.norm(residual) < 1e-8
