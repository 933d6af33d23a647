import numpy as np

from hvacfdd import plots
from hvacfdd.dataset_io import FaultInterval
from hvacfdd.optics import OpticsParams, run_optics
from hvacfdd.synthetic import make_synthetic_frame


def test_reachability_svg_deterministic_and_marks_undefined():
    reach = np.array([np.inf, 0.5, 0.8, np.inf, 0.3])
    a = plots.reachability_svg(reach, threshold=0.6)
    b = plots.reachability_svg(reach, threshold=0.6)
    assert a == b
    assert a.startswith("<svg")
    assert "threshold 0.6" in a
    assert plots.UNDEF_COLOR in a


def test_cluster_colors():
    assert plots.cluster_color(-1) == plots.NOISE_COLOR
    assert plots.cluster_color(0) == plots.PALETTE[0]
    assert plots.cluster_color(len(plots.PALETTE)) == plots.PALETTE[0]


def test_kdist_and_scree_svgs():
    svg = plots.kdist_svg(np.array([0.1, 0.2, 0.3, 1.5]), suggested_eps=0.3)
    assert "eps 0.3" in svg
    svg2 = plots.scree_svg([5.0, 1.2, 0.3])
    assert svg2.count("<circle") == 3


def test_pca_scatter_handles_noise():
    coords = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 0.5]])
    svg = plots.pca_scatter_svg(coords, np.array([0, 1, -1]))
    assert plots.NOISE_COLOR in svg


def test_timeseries_svg_with_interval_boxes():
    frame = make_synthetic_frame(n_rows=200, seed=1)
    iv = FaultInterval(
        start=int(frame.timestamps[50]), end=int(frame.timestamps[80])
    )
    svg = plots.timeseries_svg(frame, ["T", "DA-T"], [iv])
    assert svg.count('stroke="#d62728"') >= 2  # one box per strip
    assert "DA-T" in svg


def test_reachability_clips_undefined_to_cap():
    pts = np.vstack(
        [np.zeros((10, 1)), np.full((10, 1), 100.0)]
    ) + np.arange(20).reshape(-1, 1) * 1e-3
    result = run_optics(pts, OpticsParams(eps=1.0, min_pts=3))
    svg = plots.reachability_svg(result.reachability)
    assert svg  # renders despite undefined entries
