"""Panel renderers. Every figure has a fixed canvas and no timestamps, so
regeneration is byte-deterministic."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .loader import RunArtifact

FIGSIZE = (6.4, 3.6)
DPI = 150
TAU_STYLE = dict(color="crimson", linestyle="--", linewidth=1.0)


def _heatmap(artifact, family, ylabel, cmap, vmin=None, vmax=None):
    data = artifact.bands[family]
    t = artifact.times
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI, constrained_layout=True)
    n = data.shape[1]
    mesh = ax.pcolormesh(t, np.arange(1, n + 1), data.T, cmap=cmap,
                         vmin=vmin, vmax=vmax, shading="nearest", rasterized=True)
    fig.colorbar(mesh, ax=ax)
    ax.set_xlabel("time")
    ax.set_ylabel(ylabel)
    return fig


def _mark_tau(ax, artifact):
    if artifact.tau is not None:
        ax.axvline(float(artifact.tau), **TAU_STYLE)


def walls_heatmap(artifact: RunArtifact):
    """Bond-resolved domain-wall density over time."""
    fig = _heatmap(artifact, "D_bond", "bond", "inferno", vmin=0.0, vmax=1.0)
    fig.axes[0].set_title("domain walls $D_j$")
    return fig


def magnetization_heatmap(artifact: RunArtifact):
    fig = _heatmap(artifact, "sigma_z", "site", "RdBu_r", vmin=-1.0, vmax=1.0)
    fig.axes[0].set_title(r"local magnetization $\langle\sigma^z_j\rangle$")
    return fig


def phonon_heatmap(artifact: RunArtifact):
    fig = _heatmap(artifact, "n_mean", "site", "viridis", vmin=0.0)
    fig.axes[0].set_title(r"phonon occupation $\langle n_j\rangle$")
    return fig


def phonon_spread_heatmap(artifact: RunArtifact):
    fig = _heatmap(artifact, "n_std", "site", "viridis", vmin=0.0)
    fig.axes[0].set_title(r"phonon spread $\Delta n_j$")
    return fig


def wall_counts(artifact: RunArtifact):
    """Interior vs boundary wall counts with the lambda-widened bands and the
    detected string-breaking time."""
    t = artifact.times
    s = artifact.scalars
    lam = artifact.lam
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI, constrained_layout=True)
    ax.plot(t, s["D_in"], color="tab:blue", label=r"$D_\mathrm{in}$")
    ax.plot(t, s["D_bd"], color="tab:orange", label=r"$D_\mathrm{bd}$")
    if lam > 0:
        ax.fill_between(t, s["D_in"] - lam * s["Delta_in"],
                        s["D_in"] + lam * s["Delta_in"],
                        color="tab:blue", alpha=0.25, linewidth=0)
        ax.fill_between(t, s["D_bd"] - lam * s["Delta_bd"],
                        s["D_bd"] + lam * s["Delta_bd"],
                        color="tab:orange", alpha=0.25, linewidth=0)
    _mark_tau(ax, artifact)
    ax.set_xlabel("time")
    ax.set_ylabel("domain walls")
    ax.legend(loc="lower right")
    ax.set_title(rf"wall counts with $\pm\lambda\Delta$ bands ($\lambda={lam}$)")
    return fig


def core_edge_magnetization(artifact: RunArtifact):
    t = artifact.times
    s = artifact.scalars
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI, constrained_layout=True)
    ax.plot(t, s["S_cr"], color="tab:green", label=r"$S_\mathrm{cr}$")
    ax.plot(t, s["S_ed"], color="black", label=r"$S_\mathrm{ed}$")
    _mark_tau(ax, artifact)
    ax.set_xlabel("time")
    ax.set_ylabel("magnetization")
    ax.legend(loc="best")
    ax.set_title("string core and edge magnetization")
    return fig


_FATE_MARKERS = {"breaking": "o", "contraction": "s", "ambiguous": "D", None: "x", "": "x"}


def sbt_curve(rows, sweep_key="value"):
    """String-breaking/contraction time versus the swept parameter; the fate
    label picks the marker style."""
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI, constrained_layout=True)
    detected = [r for r in rows if r["tau"] is not None]
    if detected:
        ax.plot([r["value"] for r in detected], [r["tau"] for r in detected],
                color="tab:blue", linewidth=1.0, zorder=1)
    for fate, marker in _FATE_MARKERS.items():
        pts = [r for r in detected if (r["fate"] or "") == (fate or "")]
        if pts:
            ax.scatter([r["value"] for r in pts], [r["tau"] for r in pts],
                       marker=marker, s=45, zorder=2, label=fate or "undetected")
    missed = [r for r in rows if r["tau"] is None]
    for r in missed:
        ax.axvline(r["value"], color="0.8", linewidth=0.8, zorder=0)
    ax.set_xlabel(sweep_key)
    ax.set_ylabel(r"$\tau$")
    if detected:
        ax.legend(loc="best")
    ax.set_title("string-breaking time vs swept parameter")
    return fig


RUN_PANELS = {
    "walls": walls_heatmap,
    "wall-counts": wall_counts,
    "magnetization": magnetization_heatmap,
    "core-edge": core_edge_magnetization,
    "phonons": phonon_heatmap,
    "phonon-spread": phonon_spread_heatmap,
}


def save(fig, path, fmt="png"):
    """Deterministic export: strip the PDF creation date; Agg PNGs carry none."""
    metadata = {"CreationDate": None} if fmt == "pdf" else None
    fig.savefig(path, format=fmt, metadata=metadata)
    plt.close(fig)
