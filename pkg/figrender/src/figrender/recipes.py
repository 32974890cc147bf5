"""One render recipe per figure id.

Every recipe takes the loaded dataset columns and draws with matplotlib;
branch coloring follows the continuity-tracked sheet columns written by the
dataset generator, so crossings render consistently without re-deriving
continuity here.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from .io import grid_reshape, load_dataset, require_columns

HALF_PI = math.pi / 2

_SHEET_COLORS = ("#1f77b4", "#d62728", "#7f7f7f")


def _surface_panels(ax, columns, sheet_names, figure_id, alphas=None):
    outer, inner, grids = grid_reshape(
        columns, "j_over_g", "theta", tuple(sheet_names)
    )
    T, R = np.meshgrid(inner / HALF_PI, outer)
    for k, name in enumerate(sheet_names):
        ax.plot_surface(
            T,
            R,
            grids[name],
            color=_SHEET_COLORS[k % len(_SHEET_COLORS)],
            alpha=(alphas[k] if alphas else 0.8),
            linewidth=0,
            antialiased=True,
        )
    ax.set_xlabel(r"$\theta / (\pi/2)$")
    ax.set_ylabel(r"$J/G$")


def render_fig2a(columns, out_path):
    require_columns(
        columns,
        ("theta", "j_over_g", "sheet0_re", "sheet1_re"),
        "fig2a",
    )
    fig = plt.figure(figsize=(7, 5.5))
    ax = fig.add_subplot(111, projection="3d")
    _surface_panels(ax, columns, ("sheet0_re", "sheet1_re"), "fig2a")
    ax.set_zlabel(r"$\mathrm{Re}\,\lambda_\pm$")
    ax.set_title("Supermode frequency sheets (closed form)")
    ax.view_init(elev=25, azim=-60)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_fig2b(columns, out_path):
    require_columns(
        columns,
        ("theta", "j_over_g", "sheet0_re", "sheet1_re", "sheet2_re", "sheet2_im"),
        "fig2b",
    )
    fig = plt.figure(figsize=(7, 5.5))
    ax = fig.add_subplot(111, projection="3d")
    # the mediator-like branch (large negative imaginary part) drawn
    # semi-transparent behind the two cavity-like sheets
    names = ["sheet0_re", "sheet1_re", "sheet2_re"]
    im_medians = [
        np.median(columns[n.replace("_re", "_im")]) for n in names
    ]
    mech = int(np.argmin(im_medians))
    alphas = [0.85, 0.85, 0.85]
    alphas[mech] = 0.25
    _surface_panels(ax, columns, tuple(names), "fig2b", alphas=alphas)
    ax.set_zlabel(r"$\mathrm{Re}\,\lambda$")
    ax.set_title("Three-mode numeric sheets")
    ax.view_init(elev=25, azim=-60)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def _render_fig3(columns, out_path, title):
    require_columns(columns, ("delta", "j_over_g", "s21_abs"), "fig3")
    ratios = np.unique(columns["j_over_g"])
    fig, ax = plt.subplots(figsize=(5.5, 7))
    for k, ratio in enumerate(ratios):
        sel = columns["j_over_g"] == ratio
        ax.plot(
            columns["delta"][sel],
            columns["s21_abs"][sel] + 1.1 * k,
            lw=1.0,
            color=plt.cm.viridis(k / max(1, ratios.size - 1)),
        )
    ax.set_xlabel(r"$\delta$")
    ax.set_ylabel(r"$|S_{21}|$ (offset per curve, $J/G$ from 0 to 1.5)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_fig3a(columns, out_path):
    _render_fig3(columns, out_path, r"Transmission spectra, $\theta = 0$")


def render_fig3b(columns, out_path):
    _render_fig3(columns, out_path, r"Transmission spectra, $\theta = \pi/2$")


def render_fig4a(columns, out_path):
    require_columns(
        columns, ("delta", "theta_over_halfpi", "s41_abs", "s14_abs"), "fig4a"
    )
    panels = np.unique(columns["theta_over_halfpi"])
    fig, axes = plt.subplots(2, 2, figsize=(8, 6), sharex=True, sharey=True)
    for ax, value in zip(axes.ravel(), panels):
        sel = columns["theta_over_halfpi"] == value
        ax.plot(columns["delta"][sel], columns["s41_abs"][sel],
                "-", color="#1f77b4", label=r"$|S_{41}|$")
        ax.plot(columns["delta"][sel], columns["s14_abs"][sel],
                "--", color="#2ca02c", label=r"$|S_{14}|$")
        ax.set_title(rf"$\theta/(\pi/2) = {value:g}$")
    axes[0, 0].legend(loc="upper right", fontsize=8)
    for ax in axes[-1]:
        ax.set_xlabel(r"$\delta$")
    for ax in axes[:, 0]:
        ax.set_ylabel("transmission")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_fig4b(columns, out_path):
    require_columns(columns, ("theta", "j_over_g", "s41_abs", "s14_abs"), "fig4b")
    fig = plt.figure(figsize=(10, 4.5))
    for i, name in enumerate(("s41_abs", "s14_abs")):
        ax = fig.add_subplot(1, 2, 1 + i, projection="3d")
        outer, inner, grids = grid_reshape(
            columns, "j_over_g", "theta", (name,)
        )
        T, R = np.meshgrid(inner / HALF_PI, outer)
        ax.plot_surface(T, R, grids[name], cmap="viridis", linewidth=0)
        ax.set_xlabel(r"$\theta / (\pi/2)$")
        ax.set_ylabel(r"$J/G$")
        ax.set_zlabel(r"$|S_{41}|$" if name == "s41_abs" else r"$|S_{14}|$")
        ax.view_init(elev=30, azim=-55)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_fig5(columns, out_path):
    require_columns(columns, ("delta", "d_effective"), "fig5")
    gamma_cols = sorted(
        (name for name in columns if name.startswith("d_gamma_")),
        key=lambda n: float(n.removeprefix("d_gamma_")),
    )
    if not gamma_cols:
        require_columns(columns, ("d_gamma_1",), "fig5")
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for k, name in enumerate(gamma_cols):
        ax.plot(
            columns["delta"],
            columns[name],
            lw=1.4,
            color=plt.cm.plasma(k / max(1, len(gamma_cols) - 1)),
            label=rf"$\gamma/G = {name.removeprefix('d_gamma_')}$",
        )
    ax.plot(columns["delta"], columns["d_effective"], "k--", lw=1.0,
            label="adiabatic limit")
    ax.set_xlabel(r"$\delta$")
    ax.set_ylabel(r"$|S_{14}| - |S_{41}|$")
    ax.set_title("Nonreciprocity vs. mediator decay rate")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_fig6b(columns, out_path):
    require_columns(columns, ("theta_over_halfpi", "alpha"), "fig6b")
    fig, ax = plt.subplots(figsize=(6.5, 4))
    ax.plot(columns["theta_over_halfpi"], columns["alpha"], lw=1.5,
            color="#9467bd")
    ax.axhline(0.0, color="0.7", lw=0.6)
    ax.set_xlabel(r"$\theta / (\pi/2)$")
    ax.set_ylabel(r"chirality $\alpha$")
    top = ax.secondary_xaxis(
        "top", functions=(lambda r: (r + 1) / 2, lambda n: 2 * n - 1)
    )
    top.set_xlabel(r"phase-matching $n$")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def _render_fig8(columns, out_path, axis, axis_label):
    require_columns(
        columns,
        (axis, "branch", "circ_re", "circ_im", "paper_re", "paper_im",
         "discrepancy"),
        "fig8",
    )
    x_all = columns[axis]
    if axis == "theta":
        x_all = x_all / HALF_PI
        axis_label = r"$\theta/(\pi/2)$"
    fig, axes = plt.subplots(3, 1, figsize=(6.5, 8), sharex=True)
    for row, part in zip(axes[:2], ("re", "im")):
        for b in range(3):
            sel = columns["branch"] == b
            row.plot(x_all[sel], columns[f"circ_{part}"][sel], "-",
                     color=_SHEET_COLORS[b], lw=1.4,
                     label=f"exact, branch {b}" if part == "re" else None)
            row.plot(x_all[sel], columns[f"paper_{part}"][sel], "--",
                     color=_SHEET_COLORS[b], lw=1.0,
                     label=f"as published, branch {b}" if part == "re" else None)
        row.set_ylabel(
            r"$\mathrm{Re}\,\lambda$" if part == "re" else r"$\mathrm{Im}\,\lambda$"
        )
    axes[0].legend(fontsize=7, ncol=2)
    for b in range(3):
        sel = columns["branch"] == b
        axes[2].plot(x_all[sel], columns["discrepancy"][sel],
                     color=_SHEET_COLORS[b], lw=1.2)
    axes[2].set_ylabel("|exact - published|")
    axes[2].set_xlabel(axis_label)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_fig8a(columns, out_path):
    _render_fig8(columns, out_path, "j_over_g", r"$J/G$")


def render_fig8b(columns, out_path):
    _render_fig8(columns, out_path, "theta", r"$\theta/(\pi/2)$")


def render_fig9(columns, out_path):
    require_columns(
        columns,
        ("delta", "theta_over_halfpi", "s21_abs", "s12_abs", "s32_abs",
         "s13_abs", "s23_abs", "s31_abs"),
        "fig9",
    )
    panels = np.unique(columns["theta_over_halfpi"])
    fig, axes = plt.subplots(1, panels.size, figsize=(4 * panels.size, 3.6),
                             sharey=True)
    axes = np.atleast_1d(axes)
    cw = ("s21_abs", "s32_abs", "s13_abs")
    ccw = ("s12_abs", "s23_abs", "s31_abs")
    for ax, value in zip(axes, panels):
        sel = columns["theta_over_halfpi"] == value
        for name in cw:
            ax.semilogy(columns["delta"][sel], columns[name][sel], "-",
                        color="#d62728", lw=1.0)
        for name in ccw:
            ax.semilogy(columns["delta"][sel], columns[name][sel], "--",
                        color="#1f77b4", lw=1.0)
        ax.set_title(rf"$\theta/(\pi/2) = {value:g}$")
        ax.set_xlabel(r"$\delta$")
    axes[0].set_ylabel(r"$|S_{ji}|$")
    axes[0].plot([], [], "-", color="#d62728", label="clockwise")
    axes[0].plot([], [], "--", color="#1f77b4", label="counterclockwise")
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


_RECIPES = {
    "fig2a": render_fig2a,
    "fig2b": render_fig2b,
    "fig3a": render_fig3a,
    "fig3b": render_fig3b,
    "fig4a": render_fig4a,
    "fig4b": render_fig4b,
    "fig5": render_fig5,
    "fig6b": render_fig6b,
    "fig8a": render_fig8a,
    "fig8b": render_fig8b,
    "fig9": render_fig9,
}

FIGURE_IDS = tuple(_RECIPES)


def render(figure_id: str, data_dir: Path, out_dir: Path) -> Path:
    """Render one figure id from its dataset files; returns the image path."""
    if figure_id not in _RECIPES:
        raise ValueError(
            f"unknown figure id '{figure_id}'; valid: {', '.join(FIGURE_IDS)}"
        )
    columns, _meta = load_dataset(Path(data_dir), figure_id)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{figure_id}.png"
    _RECIPES[figure_id](columns, out_path)
    return out_path
