"""Deterministic SVG renderings of run artifacts.

Plain text SVG, no plotting library: identical inputs yield identical
bytes, which keeps report output diffable in tests. Undefined
reachability values are clipped to 1.1x the largest finite value and
drawn with a distinct hollow glyph.
"""

from __future__ import annotations

import numpy as np

from .dataset_io import FaultInterval, TimeSeriesFrame, epoch_to_iso, iso_to_epoch

WIDTH, HEIGHT = 960, 360
MARGIN = 48

PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#17becf",
)
NOISE_COLOR = "#9e9e9e"
UNDEF_COLOR = "#b71c1c"


def _fmt(x: float) -> str:
    return format(float(x), ".2f")


def cluster_color(cluster_id: int) -> str:
    if cluster_id < 0:
        return NOISE_COLOR
    return PALETTE[cluster_id % len(PALETTE)]


class _Canvas:
    def __init__(self, title: str, width: int = WIDTH, height: int = HEIGHT):
        self.width, self.height = width, height
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">',
            f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
            f'<text x="{MARGIN}" y="24" font-family="sans-serif" font-size="14" '
            f'fill="#333333">{title}</text>',
        ]

    def line(self, x1, y1, x2, y2, color="#333333", width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{color}" stroke-width="{width}"{d}/>'
        )

    def rect(self, x, y, w, h, color, opacity=1.0, stroke="none"):
        self.parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" '
            f'fill="{color}" fill-opacity="{_fmt(opacity)}" stroke="{stroke}"/>'
        )

    def circle(self, x, y, r, color, fill=True):
        style = (
            f'fill="{color}"' if fill else f'fill="none" stroke="{color}" stroke-width="1.2"'
        )
        self.parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" {style}/>')

    def text(self, x, y, content, size=11, color="#555555", anchor="start"):
        self.parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-family="sans-serif" '
            f'font-size="{size}" fill="{color}" text-anchor="{anchor}">{content}</text>'
        )

    def polyline(self, points, color, width=1.5):
        joined = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
        self.parts.append(
            f'<polyline points="{joined}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"/>'
        )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _scale(lo: float, hi: float, out_lo: float, out_hi: float):
    span = hi - lo if hi > lo else 1.0

    def f(v):
        return out_lo + (v - lo) / span * (out_hi - out_lo)

    return f


def reachability_svg(
    reachability: np.ndarray,
    threshold: float | None = None,
    cluster_ids_in_order: np.ndarray | None = None,
) -> str:
    """Bar plot of reachability in traversal order with the threshold line."""
    reach = np.asarray(reachability, dtype=np.float64)
    finite = reach[np.isfinite(reach)]
    cap = 1.1 * (float(finite.max()) if finite.size else 1.0)
    cap = max(cap, threshold * 1.05 if threshold else 0.0, 1e-9)
    c = _Canvas("Reachability by traversal order")
    x = _scale(0, max(len(reach) - 1, 1), MARGIN, WIDTH - MARGIN)
    y = _scale(0.0, cap, HEIGHT - MARGIN, MARGIN)
    bar_w = max((WIDTH - 2 * MARGIN) / max(len(reach), 1), 0.4)
    base = HEIGHT - MARGIN
    for i, r in enumerate(reach):
        undefined = not np.isfinite(r)
        v = cap if undefined else float(r)
        color = UNDEF_COLOR if undefined else (
            cluster_color(int(cluster_ids_in_order[i]))
            if cluster_ids_in_order is not None
            else PALETTE[0]
        )
        c.rect(x(i) - bar_w / 2, y(v), bar_w, base - y(v), color, opacity=0.85)
        if undefined:
            c.circle(x(i), y(v) - 4, 2.5, UNDEF_COLOR, fill=False)
    if threshold is not None:
        c.line(MARGIN, y(threshold), WIDTH - MARGIN, y(threshold), "#d62728", 1.5, dash="6,3")
        c.text(WIDTH - MARGIN, y(threshold) - 6, f"threshold {threshold:g}", anchor="end")
    c.line(MARGIN, base, WIDTH - MARGIN, base, "#333333")
    c.text(MARGIN, base + 16, "0")
    c.text(WIDTH - MARGIN, base + 16, str(len(reach)), anchor="end")
    c.text(MARGIN - 6, y(cap / 1.1) + 4, f"{cap / 1.1:.3g}", anchor="end")
    return c.render()


def kdist_svg(curve: np.ndarray, suggested_eps: float | None = None) -> str:
    """Sorted k-distance curve with the suggested eps marked."""
    curve = np.asarray(curve, dtype=np.float64)
    c = _Canvas("k-distance curve")
    x = _scale(0, max(curve.size - 1, 1), MARGIN, WIDTH - MARGIN)
    hi = float(curve.max()) if curve.size else 1.0
    y = _scale(0.0, max(hi, 1e-9), HEIGHT - MARGIN, MARGIN)
    c.polyline([(x(i), y(v)) for i, v in enumerate(curve)], PALETTE[0])
    if suggested_eps is not None:
        c.line(MARGIN, y(suggested_eps), WIDTH - MARGIN, y(suggested_eps), "#d62728", 1.2, dash="6,3")
        c.text(WIDTH - MARGIN, y(suggested_eps) - 6, f"eps {suggested_eps:.4g}", anchor="end")
    c.line(MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, "#333333")
    c.text(MARGIN - 6, y(hi) + 4, f"{hi:.3g}", anchor="end")
    return c.render()


def scree_svg(eigenvalues) -> str:
    """Eigenvalue-by-index curve used to pick the component count."""
    ev = np.asarray(list(eigenvalues), dtype=np.float64)
    c = _Canvas("Scree curve")
    x = _scale(0, max(ev.size - 1, 1), MARGIN, WIDTH - MARGIN)
    hi = float(ev.max()) if ev.size else 1.0
    y = _scale(0.0, max(hi, 1e-9), HEIGHT - MARGIN, MARGIN)
    c.polyline([(x(i), y(v)) for i, v in enumerate(ev)], PALETTE[0])
    for i, v in enumerate(ev):
        c.circle(x(i), y(v), 3, PALETTE[0])
        c.text(x(i), HEIGHT - MARGIN + 16, str(i + 1), anchor="middle")
    c.line(MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, "#333333")
    return c.render()


def pca_scatter_svg(pc_coords: np.ndarray, cluster_ids: np.ndarray | None = None) -> str:
    """PC1 x PC2 scatter colored by cluster, noise in grey."""
    coords = np.asarray(pc_coords, dtype=np.float64)
    if coords.ndim != 2 or coords.shape[1] < 1:
        coords = coords.reshape(-1, 1)
    xs = coords[:, 0]
    ys = coords[:, 1] if coords.shape[1] > 1 else np.zeros_like(xs)
    c = _Canvas("PC1 x PC2 by cluster", height=480)
    x = _scale(float(xs.min()), float(xs.max()), MARGIN, WIDTH - MARGIN)
    y = _scale(float(ys.min()), float(ys.max()), 480 - MARGIN, MARGIN)
    for i in range(xs.size):
        color = (
            cluster_color(int(cluster_ids[i])) if cluster_ids is not None else PALETTE[0]
        )
        c.circle(x(xs[i]), y(ys[i]), 2.2, color)
    c.text(WIDTH - MARGIN, 480 - MARGIN + 16, "PC1", anchor="end")
    c.text(MARGIN, MARGIN - 8, "PC2")
    return c.render()


def timeseries_svg(
    frame: TimeSeriesFrame,
    channels: list[str],
    intervals: list[FaultInterval] | None = None,
) -> str:
    """Stacked channel strips with fault intervals boxed."""
    strip_h = 110
    height = MARGIN + strip_h * max(len(channels), 1) + MARGIN
    c = _Canvas("Telemetry with detected fault intervals", height=height)
    t0, t1 = int(frame.timestamps[0]), int(frame.timestamps[-1])
    x = _scale(t0, max(t1, t0 + 1), MARGIN, WIDTH - MARGIN)
    for row, name in enumerate(channels):
        top = MARGIN + row * strip_h
        values = frame.channels[name]
        ok = ~np.isnan(values)
        lo = float(values[ok].min()) if ok.any() else 0.0
        hi = float(values[ok].max()) if ok.any() else 1.0
        y = _scale(lo, hi if hi > lo else lo + 1.0, top + strip_h - 18, top + 14)
        pts = [
            (x(int(t)), y(float(v)))
            for t, v in zip(frame.timestamps.tolist(), values.tolist())
            if not np.isnan(v)
        ]
        if pts:
            c.polyline(pts, PALETTE[row % len(PALETTE)], width=1.0)
        for iv in intervals or []:
            left, right = x(iv.start), x(iv.end)
            c.rect(
                left,
                top + 8,
                max(right - left, 1.0),
                strip_h - 26,
                "#d62728",
                opacity=0.12,
                stroke="#d62728",
            )
        c.text(MARGIN, top + 10, name)
        c.line(MARGIN, top + strip_h - 18, WIDTH - MARGIN, top + strip_h - 18, "#cccccc")
    c.text(MARGIN, height - 12, epoch_to_iso(t0))
    c.text(WIDTH - MARGIN, height - 12, epoch_to_iso(t1), anchor="end")
    return c.render()


def report_svgs(record, frame: TimeSeriesFrame | None = None) -> dict[str, str]:
    """All plot kinds for a run record, keyed by output filename."""
    extraction = record.extraction
    ids_by_row = (
        np.asarray(extraction["cluster_ids"]) if extraction is not None else None
    )
    out = {
        "reachability.svg": reachability_svg(
            record.optics_result.reachability,
            threshold=extraction["threshold"] if extraction else None,
            cluster_ids_in_order=(
                ids_by_row[record.optics_result.ordering] if ids_by_row is not None else None
            ),
        ),
        "kdist.svg": kdist_svg(record.kdist_curve, record.suggested_eps),
        "scree.svg": scree_svg(record.scree),
        "pca_scatter.svg": pca_scatter_svg(record.pc_coords, ids_by_row),
    }
    if frame is not None:
        fmt = record.config.timestamp_format
        intervals = [
            FaultInterval(
                start=iso_to_epoch(iv["start"], fmt),
                end=iso_to_epoch(iv["end"], fmt),
                label=iv.get("label", ""),
            )
            for iv in (extraction["intervals"] if extraction else [])
        ]
        out["timeseries.svg"] = timeseries_svg(
            frame, list(record.config.analysis_channels)[:4], intervals
        )
    return out
