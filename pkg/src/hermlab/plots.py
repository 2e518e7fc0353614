"""Figure rendering for report, check, and spectrum outputs.

Figures are written next to the delimited output as PNG files; rendering is
side-effect-only and never alters report contents.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def sample_profile_figure(rows: list, path: str, geometry: str) -> str:
    """2x2 panels of |del u|^2, Q, p, and the Bochner residual over sample points."""
    r = np.array([row["radius"] for row in rows])
    order = np.argsort(r)
    fig, axes = plt.subplots(2, 2, figsize=(9, 6.5), sharex=True)
    panels = [
        ("grad_norm_sq", "|du|^2"),
        ("q_composite", "Q"),
        ("p_ratio", "p = |du|^2/(1-u^2)"),
        ("bochner_residual", "Bochner residual"),
    ]
    for ax, (key, label) in zip(axes.ravel(), panels):
        vals = np.array([row[key] for row in rows])
        ax.plot(r[order], vals[order], ".", ms=3)
        ax.set_ylabel(label)
        if key == "bochner_residual":
            ax.set_yscale("log")
        ax.grid(alpha=0.3)
    for ax in axes[1]:
        ax.set_xlabel("|z|")
    fig.suptitle(f"sample profile: {geometry}")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def checks_figure(reports: list, path: str, geometry: str) -> str:
    """Residual/margin magnitudes against tolerances, one bar per check."""
    names = [f"{rep.name}" for rep in reports]
    vals = [max(abs(rep.value), 1e-18) for rep in reports]
    tols = [max(rep.tolerance, 1e-18) for rep in reports]
    colors = ["tab:green" if rep.passed else "tab:red" for rep in reports]
    y = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(9, 0.4 * len(names) + 1.8))
    ax.barh(y, vals, color=colors, alpha=0.8)
    ax.plot(tols, y, "k|", ms=12, label="tolerance")
    ax.set_xscale("log")
    ax.set_yticks(y)
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("|value|")
    ax.legend(loc="lower right")
    ax.set_title(f"checks: {geometry}")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def spectrum_figure(result, path: str, geometry: str) -> str:
    """Mesh route: eigenvector against a coordinate; exact route: eigenvalue card."""
    fig, ax = plt.subplots(figsize=(7, 5))
    if result.mesh is not None:
        verts = result.mesh["vertices"]
        vec = result.mesh["eigenvector"]
        vec = vec / np.max(np.abs(vec))
        ax.plot(verts[:, 2], vec, ".", ms=2, alpha=0.6)
        ax.set_xlabel("vertex x3")
        ax.set_ylabel("eigenvector (normalized)")
        ax.set_title(
            f"{geometry}: lambda1 = {result.lambda1:.6f} "
            f"(mesh level {result.resolution}, residual {result.residual:.1e})"
        )
    else:
        ax.axis("off")
        ax.text(0.5, 0.6, f"lambda1 = {result.lambda1:.12g}", ha="center", fontsize=16)
        ax.text(0.5, 0.4, f"diameter = {result.diameter:.12g}", ha="center", fontsize=14)
        ax.text(0.5, 0.25, f"method = {result.method}", ha="center", fontsize=11)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
