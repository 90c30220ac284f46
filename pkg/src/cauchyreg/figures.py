"""Matplotlib rendering of the experiment outputs (PNG next to the CSV)."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _read_csv(path):
    with open(path) as fh:
        rd = csv.reader(fh)
        header = next(rd)
        rows = list(rd)
    return header, rows


def render_errormap(csv_path, out_png=None, title=None):
    """Scatter heatmap of log10 error over the interior grid."""
    _, rows = _read_csv(csv_path)
    x = np.array([float(r[0]) for r in rows])
    y = np.array([float(r[1]) for r in rows])
    e = np.array([float(r[2]) for r in rows])
    fig, ax = plt.subplots(figsize=(6, 6))
    sc = ax.scatter(x, y, c=e, s=8, cmap="viridis", vmin=-16, vmax=2)
    fig.colorbar(sc, ax=ax, label="log10 |error|")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    out_png = Path(out_png or Path(csv_path).with_suffix(".png"))
    fig.savefig(out_png, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_png


def render_convergence(csv_path, out_png=None, semilog=False):
    """Error-versus-M curves, one line per interpolation order."""
    _, rows = _read_csv(csv_path)
    data = {}
    for N, M, err in rows:
        data.setdefault(int(N), []).append((int(M), float(err)))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for N in sorted(data):
        pts = sorted(data[N])
        M = [p[0] for p in pts]
        e = [p[1] for p in pts]
        if semilog:
            ax.semilogy(M, e, "o-", label=f"N = {N}")
        else:
            ax.loglog(M, e, "o-", label=f"N = {N}")
    ax.set_xlabel("M")
    ax.set_ylabel("relative error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    out_png = Path(out_png or Path(csv_path).with_suffix(".png"))
    fig.savefig(out_png, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_png


def render_table1(csv_path, out_png=None):
    """Near-boundary error bands versus interpolation order."""
    _, rows = _read_csv(csv_path)
    labels, series = [], {0: [], 1: [], 2: []}
    for row in rows:
        labels.append(row[0])
        for n in range(3):
            val = row[1 + n]
            series[n].append(float(val) if val else np.nan)
    x = np.arange(len(labels))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for n in range(3):
        ax.semilogy(x, series[n], "o-", label=f"E{n}")
    ax.set_xticks(x, labels)
    ax.set_xlabel("interpolation order")
    ax.set_ylabel("max relative error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    out_png = Path(out_png or Path(csv_path).with_suffix(".png"))
    fig.savefig(out_png, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_png


def render_conformal(csv_path, out_png=None):
    """Source grid and its image under the map, side by side."""
    _, rows = _read_csv(csv_path)
    z = np.array([complex(float(r[0]), float(r[1])) for r in rows])
    f = np.array([complex(float(r[2]), float(r[3])) for r in rows])
    fig, axes = plt.subplots(1, 2, figsize=(10, 5))
    for ax, w, name in ((axes[0], z, "source grid"),
                        (axes[1], f, "mapped grid")):
        ax.plot(w.real, w.imag, ".", ms=2)
        ax.set_aspect("equal")
        ax.set_title(name)
    out_png = Path(out_png or Path(csv_path).with_suffix(".png"))
    fig.savefig(out_png, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_png
