"""Minimal static SVG line charts for summary-statistic slices.

No plotting dependency: charts are assembled from raw SVG primitives.
Convention mirrors the usual presentation: G curves solid, F curves dashed
with diamond markers.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["line_chart_svg", "summary_slice_charts"]

WIDTH, HEIGHT = 640, 420
MARGIN = 56
PALETTE = ("#1b6ca8", "#c23b22", "#2e7d32", "#7b1fa2", "#f9a825", "#00838f")


def _scale(vals, lo, hi, out_lo, out_hi):
    if hi <= lo:
        hi = lo + 1.0
    return out_lo + (np.asarray(vals, float) - lo) / (hi - lo) * (out_hi - out_lo)


def _axis_ticks(lo, hi, n=5):
    return np.linspace(lo, hi, n)


def line_chart_svg(
    path,
    series: list[dict],
    x_label: str,
    y_label: str,
    title: str = "",
):
    """Write a standalone SVG line chart.

    Each series dict: {"x": array, "y": array, "label": str,
    "dashed": bool, "markers": bool}.  NaN y-values break the polyline.
    """
    xs = np.concatenate([np.asarray(s["x"], float) for s in series]) if series else np.array([0.0, 1.0])
    ys = np.concatenate(
        [np.asarray(s["y"], float)[~np.isnan(np.asarray(s["y"], float))] for s in series]
    ) if series else np.array([])
    x_lo, x_hi = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 1.0)
    if ys.size == 0:
        y_lo, y_hi = 0.0, 1.0
    else:
        y_lo, y_hi = float(ys.min()), float(ys.max())
        if y_hi - y_lo < 1e-12:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]
    x0, x1 = MARGIN, WIDTH - MARGIN // 2
    y0, y1 = HEIGHT - MARGIN, MARGIN // 2
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>'
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>'
    )
    for tx in _axis_ticks(x_lo, x_hi):
        px = float(_scale(tx, x_lo, x_hi, x0, x1))
        parts.append(
            f'<line x1="{px}" y1="{y0}" x2="{px}" y2="{y0 + 4}" stroke="black"/>'
            f'<text x="{px}" y="{y0 + 18}" text-anchor="middle">{tx:.3g}</text>'
        )
    for ty in _axis_ticks(y_lo, y_hi):
        py = float(_scale(ty, y_lo, y_hi, y0, y1))
        parts.append(
            f'<line x1="{x0 - 4}" y1="{py}" x2="{x0}" y2="{py}" stroke="black"/>'
            f'<text x="{x0 - 8}" y="{py + 4}" text-anchor="end">{ty:.3g}</text>'
        )
    parts.append(
        f'<text x="{(x0 + x1) / 2}" y="{HEIGHT - 12}" text-anchor="middle">{x_label}</text>'
        f'<text x="16" y="{(y0 + y1) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(y0 + y1) / 2})">{y_label}</text>'
    )
    n_drawn = 0
    for i, s in enumerate(series):
        x = np.asarray(s["x"], float)
        y = np.asarray(s["y"], float)
        color = PALETTE[i % len(PALETTE)]
        dash = ' stroke-dasharray="6 4"' if s.get("dashed") else ""
        px = _scale(x, x_lo, x_hi, x0, x1)
        py = _scale(y, y_lo, y_hi, y0, y1)
        segments: list[list[tuple[float, float]]] = [[]]
        for xx, yy, ok in zip(px, py, ~np.isnan(y)):
            if ok:
                segments[-1].append((float(xx), float(yy)))
            elif segments[-1]:
                segments.append([])
        for seg in segments:
            if len(seg) >= 2:
                pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in seg)
                parts.append(
                    f'<polyline points="{pts}" fill="none" stroke="{color}"{dash}/>'
                )
        if s.get("markers"):
            for xx, yy, ok in zip(px, py, ~np.isnan(y)):
                if ok:
                    parts.append(
                        f'<path d="M {xx:.2f} {yy - 4:.2f} L {xx + 4:.2f} {yy:.2f} '
                        f'L {xx:.2f} {yy + 4:.2f} L {xx - 4:.2f} {yy:.2f} Z" '
                        f'fill="{color}"/>'
                    )
        n_drawn += int(np.any(~np.isnan(y)))
        parts.append(
            f'<text x="{x1 - 120}" y="{y1 + 16 + 16 * i}" fill="{color}">'
            f'{s.get("label", f"series {i}")}</text>'
        )
    if n_drawn == 0:
        parts.append(
            f'<text x="{WIDTH / 2}" y="{HEIGHT / 2}" text-anchor="middle" '
            f'fill="#c23b22">no defined cells to plot</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))


def summary_slice_charts(summary: dict, out_dir, stem: str = "summary"):
    """Fixed-t and fixed-r slice charts of F and G from a summary table.

    Slice positions default to the quartiles of the (r, t) grid.  Returns
    the written file paths.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    r = np.unique(summary["r"])
    t = np.unique(summary["t"])
    shape = (r.size, t.size)
    F = summary["F_hat"].reshape(shape)
    G = summary["G_hat"].reshape(shape)
    paths = []

    def quartiles(v):
        return sorted({v[int(q * (v.size - 1))] for q in (0.25, 0.5, 0.75)})

    series_t = []
    for t0 in quartiles(t):
        l = int(np.argmin(np.abs(t - t0)))
        series_t.append({"x": r, "y": G[:, l], "label": f"G, t0={t0:.3g}"})
        series_t.append(
            {"x": r, "y": F[:, l], "label": f"F, t0={t0:.3g}", "dashed": True, "markers": True}
        )
    p = out_dir / f"{stem}_vs_r.svg"
    line_chart_svg(p, series_t, "spatial range r", "F, G", "fixed-t slices")
    paths.append(p)

    series_r = []
    for r0 in quartiles(r):
        k = int(np.argmin(np.abs(r - r0)))
        series_r.append({"x": t, "y": G[k, :], "label": f"G, r0={r0:.3g}"})
        series_r.append(
            {"x": t, "y": F[k, :], "label": f"F, r0={r0:.3g}", "dashed": True, "markers": True}
        )
    p = out_dir / f"{stem}_vs_t.svg"
    line_chart_svg(p, series_r, "temporal range t", "F, G", "fixed-r slices")
    paths.append(p)
    return paths
