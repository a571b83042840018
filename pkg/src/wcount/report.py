"""Figure and CSV rendering for root-location and convergence reports.

Each report writes a PNG figure and a CSV with the plotted data next to
it, so results can be inspected visually and post-processed numerically.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from wcount.errors import AllWeightsZeroError
from wcount.instance import WeightedInstance, normalize
from wcount.interpolate import choose_s, effective_gamma, truncation_bound
from wcount.oracle import roots_of_w


def save_roots_report(inst: WeightedInstance, outdir, stem: str = "roots"):
    """Scatter the roots of w(X; zeta) against the certified zero-free disc.

    Writes `<stem>.csv` (index, re, im, modulus) and `<stem>.png`; returns
    the two paths.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    reduced, _ = normalize(inst)
    roots = roots_of_w(reduced)
    try:
        gamma = effective_gamma(reduced)
    except AllWeightsZeroError:
        gamma = None

    csv_path = outdir / f"{stem}.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "re", "im", "modulus"])
        for idx, z in enumerate(roots):
            writer.writerow([idx, repr(z.real), repr(z.imag), repr(abs(z))])

    fig, ax = plt.subplots(figsize=(6, 6))
    theta = np.linspace(0, 2 * math.pi, 512)
    ax.plot(np.cos(theta), np.sin(theta), "--", color="gray", lw=0.8, label="|z| = 1")
    if gamma is not None and math.isfinite(gamma):
        ax.plot(
            gamma * np.cos(theta),
            gamma * np.sin(theta),
            "-",
            color="tab:red",
            lw=1.0,
            label=f"certified disc, gamma = {gamma:.4g}",
        )
    if roots:
        xs = [z.real for z in roots]
        ys = [z.imag for z in roots]
        ax.scatter(xs, ys, s=18, color="tab:blue", zorder=3, label="roots of w(X; z)")
        lim = 1.2 * max(max(abs(v) for v in xs + ys), gamma or 1.0, 1.0)
    else:
        lim = 1.2 * max(gamma or 1.0, 1.0)
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_aspect("equal")
    ax.axhline(0, color="black", lw=0.4)
    ax.axvline(0, color="black", lw=0.4)
    ax.set_xlabel("Re(z)")
    ax.set_ylabel("Im(z)")
    ax.set_title(f"{len(roots)} roots; all must avoid the certified disc")
    ax.legend(loc="upper right", fontsize=8)
    png_path = outdir / f"{stem}.png"
    fig.savefig(png_path, dpi=140)
    plt.close(fig)
    return {"csv": str(csv_path), "png": str(png_path)}


def save_convergence_report(
    N: int, gamma: float, epsilon: float, s_chosen: int, outdir, stem: str = "convergence"
):
    """Truncation bound versus order s, with the chosen order marked."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    s_hi = max(s_chosen + 5, 10)
    orders = list(range(s_hi + 1))
    bounds = [truncation_bound(N, gamma, s) for s in orders]

    csv_path = outdir / f"{stem}.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "bound", "chosen"])
        for s, b in zip(orders, bounds):
            writer.writerow([s, repr(b), int(s == s_chosen)])

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    finite = [(s, b) for s, b in zip(orders, bounds) if math.isfinite(b) and b > 0]
    if finite:
        ax.semilogy([s for s, _ in finite], [b for _, b in finite], "o-", ms=3.5, lw=1.0)
    ax.axhline(epsilon, color="tab:red", lw=0.9, ls="--", label=f"epsilon = {epsilon:g}")
    ax.axvline(s_chosen, color="tab:green", lw=0.9, ls=":", label=f"chosen s = {s_chosen}")
    ax.set_xlabel("truncation order s")
    ax.set_ylabel("certified bound")
    ax.set_title(f"N = {N}, gamma = {gamma:.4g}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    png_path = outdir / f"{stem}.png"
    fig.savefig(png_path, dpi=140)
    plt.close(fig)
    return {"csv": str(csv_path), "png": str(png_path)}
