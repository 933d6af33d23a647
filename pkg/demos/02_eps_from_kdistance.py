"""Pick a neighborhood radius from the k-distance curve.

Sorted distances to every point's k-th nearest neighbor form a curve
whose knee (the value just before the largest jump) is a sensible eps:
inside the knee points live in dense regions, beyond it they thin out.
"""

from pathlib import Path

import numpy as np

from hvacfdd import optics, plots

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

rng = np.random.default_rng(5)
cloud = np.vstack([
    rng.normal((0, 0), 0.3, size=(150, 2)),
    rng.normal((4, 1), 0.4, size=(120, 2)),
    rng.uniform(-3, 7, size=(15, 2)),   # background scatter
])

min_pts = 15
curve = optics.k_distance_curve(cloud, min_pts)
eps = optics.suggest_eps(curve)
print(f"{cloud.shape[0]} points, min_pts={min_pts}")
print(f"k-distance range: {curve[0]:.3f} .. {curve[-1]:.3f}")
print(f"suggested eps (knee): {eps:.3f}")

result = optics.run_optics(cloud, optics.OpticsParams(eps=eps, min_pts=min_pts))
print("clusters at the eps threshold:", optics.extract_clusters(result, eps).sizes())
# a lower line on the reachability plot separates the denser blobs
print("clusters at threshold 1.0:    ", optics.extract_clusters(result, 1.0).sizes())

(OUT / "kdistance.svg").write_text(plots.kdist_svg(curve, eps))
print("wrote", OUT / "kdistance.svg")
