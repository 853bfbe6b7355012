"""CSV / JSON serialization of point patterns and summary grids.

Pattern CSV carries one row per event with header ``x1,...,xd,t``; the
window travels in a JSON sidecar next to the CSV (same stem, ``.window.json``).
Summary CSV has one row per (r, t) grid cell.
"""

from __future__ import annotations

import csv
import json
import warnings
from pathlib import Path

import numpy as np

from .geometry import PointPattern, Window
from .summaries import RangeGrid, SummaryEstimate

__all__ = [
    "write_pattern",
    "read_pattern",
    "window_to_dict",
    "window_from_dict",
    "write_summary",
    "read_summary",
    "write_envelope",
]


def window_to_dict(w: Window) -> dict:
    return {"spatial": w.spatial.tolist(), "time": w.time.tolist()}


def window_from_dict(d: dict) -> Window:
    return Window(np.asarray(d["spatial"]), np.asarray(d["time"]))


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".window.json")


def write_pattern(path, p: PointPattern):
    path = Path(path)
    d = p.dim
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i + 1}" for i in range(d)] + ["t"])
        for i in range(len(p)):
            writer.writerow(
                [repr(float(v)) for v in p.space[i]] + [repr(float(p.time[i]))]
            )
    _sidecar(path).write_text(json.dumps(window_to_dict(p.window), indent=1))


def read_pattern(path) -> PointPattern:
    path = Path(path)
    window = window_from_dict(json.loads(_sidecar(path).read_text()))
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="loadtxt: input contained no data")
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if rows.size == 0:
        rows = rows.reshape(0, window.dim + 1)
    if rows.shape[1] != window.dim + 1:
        raise ValueError(
            f"pattern file has {rows.shape[1]} columns, window implies "
            f"{window.dim + 1}"
        )
    return PointPattern(rows[:, :-1], rows[:, -1], window)


SUMMARY_HEADER = ["r", "t", "F_hat", "G_hat", "J_hat", "K_hat", "n_centers", "n_probes", "defined"]


def write_summary(path, est: SummaryEstimate):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_HEADER)
        for k, r in enumerate(est.grid.r):
            for l, t in enumerate(est.grid.t):
                j = est.J[k, l]
                kk = est.K[k, l] if est.K is not None else float("nan")
                writer.writerow(
                    [
                        repr(float(r)),
                        repr(float(t)),
                        repr(float(est.F[k, l])),
                        repr(float(est.G[k, l])),
                        repr(float(j)),
                        repr(float(kk)),
                        int(est.n_centers[k, l]),
                        int(est.n_probes[k, l]),
                        int(not np.isnan(j)),
                    ]
                )


def read_summary(path) -> dict[str, np.ndarray]:
    """Load a summary CSV back into per-column arrays (row-per-cell layout)."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    data = np.atleast_1d(data)
    return {name: np.asarray(data[name], dtype=float) for name in data.dtype.names}


def write_envelope(path, grid: RangeGrid, lo: np.ndarray, hi: np.ndarray):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "t", "lo", "hi"])
        for k, r in enumerate(grid.r):
            for l, t in enumerate(grid.t):
                writer.writerow(
                    [
                        repr(float(r)),
                        repr(float(t)),
                        repr(float(lo[k, l])),
                        repr(float(hi[k, l])),
                    ]
                )
