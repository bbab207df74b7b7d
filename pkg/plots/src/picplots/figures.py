"""Figure builders: diagnostics traces and snapshot views.

Each builder returns a matplotlib Figure; the save helpers write PNGs into
an output directory. Input files are never modified.
"""

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import RunSeries, equilibrium_overlay, load_runs, read_score_csv, read_snapshot

SNAPSHOT_KINDS = ("phase_space", "v_marginal", "v_marginal_log",
                  "quiver_score", "quiver_force")


# ---------------------------------------------------------------------------
# diagnostics families
# ---------------------------------------------------------------------------


def _energy_figure(runs):
    fig, axs = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
    panels = (("E_K", "kinetic"), ("E_E", "electric"), ("E_B", "magnetic"),
              ("E_total", "total"))
    for ax, (col, title) in zip(axs.ravel(), panels):
        for r in runs:
            ax.plot(r.columns["t"], r.columns[col], label=r.label)
        ax.set_title(title)
        ax.set_xlabel("t")
    axs[0, 0].legend(loc="best")
    fig.suptitle("energies")
    fig.tight_layout()
    return fig


def _entropy_figure(runs, log_scale=True):
    fig, ax = plt.subplots(figsize=(7, 5))
    for r in runs:
        t, h = r.columns["t"], r.columns["H_dot"]
        if log_scale:
            pos = h > 0
            ax.semilogy(t[pos], h[pos], label=r.label)
        else:
            ax.plot(t, h, label=r.label)
    ax.set_xlabel("t")
    ax.set_ylabel("estimated entropy production")
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


def _momentum_figure(runs):
    fig, ax = plt.subplots(figsize=(7, 5))
    for r in runs:
        for name in r.momentum_names:
            ax.plot(r.columns["t"], r.columns[name],
                    label=f"{r.label} {name}")
    ax.set_xlabel("t")
    ax.set_ylabel("momentum components")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def _field_norm_figure(runs):
    fig, ax = plt.subplots(figsize=(7, 5))
    for r in runs:
        E = r.columns["E_l2"]
        ax.semilogy(r.columns["t"], np.where(E > 0, E, np.nan), label=r.label)
    ax.set_xlabel("t")
    ax.set_ylabel(r"electric field L2 norm")
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


DIAGNOSTIC_FAMILIES = {
    "energies": _energy_figure,
    "entropy_production": _entropy_figure,
    "momentum": _momentum_figure,
    "field_norm": _field_norm_figure,
}


def diagnostics_figures(runs: list, log_entropy: bool = True) -> dict:
    out = {}
    for name, builder in DIAGNOSTIC_FAMILIES.items():
        if name == "entropy_production":
            out[name] = builder(runs, log_scale=log_entropy)
        else:
            out[name] = builder(runs)
    return out


def plot_diagnostics(csv_paths, out_dir: str, log_entropy: bool = True) -> list:
    """One PNG per diagnostic family, all runs overlaid with manifest labels."""
    runs = load_runs(csv_paths)
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for name, fig in diagnostics_figures(runs, log_entropy).items():
        path = os.path.join(out_dir, f"{name}.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# snapshot views
# ---------------------------------------------------------------------------


def _phase_space_figure(snap, bins):
    cfg = snap.config or {}
    L = cfg.get("L", float(snap.x.max()) or 1.0)
    fig, ax = plt.subplots(figsize=(7, 5))
    h = ax.hist2d(snap.x, snap.v[:, 0], bins=bins, range=[[0.0, L], None],
                  cmap="jet", density=True)
    fig.colorbar(h[3], ax=ax, label="density")
    ax.set_xlabel("x")
    ax.set_ylabel("v1")
    ax.set_title("phase space (x, v1)")
    fig.tight_layout()
    return fig


def _v_marginal_figure(snap, component, bins, log_scale, overlay):
    vals = snap.v[:, component]
    fig, ax = plt.subplots(figsize=(7, 5))
    counts, edges = np.histogram(vals, bins=bins, weights=snap.w, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    title = f"v{component + 1} marginal"
    if log_scale:
        live = counts > 0  # log of empty bins is masked, not plotted
        ax.semilogy(centers[live], counts[live], drawstyle="steps-mid",
                    label="histogram")
    else:
        ax.plot(centers, counts, drawstyle="steps-mid", label="histogram")
    if overlay:
        u, T = equilibrium_overlay(snap, component)
        curve = np.exp(-0.5 * (centers - u) ** 2 / T) / np.sqrt(2 * np.pi * T)
        if log_scale:
            ax.semilogy(centers, curve, "k--", label=f"Maxwellian(u={u:.3g}, T={T:.3g})")
        else:
            ax.plot(centers, curve, "k--", label=f"Maxwellian(u={u:.3g}, T={T:.3g})")
        gap = float(np.max(np.abs(counts - curve)))
        title += f", max |hist - curve| = {gap:.3g}"
    ax.set_xlabel(f"v{component + 1}")
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


def _quiver_figure(csv_path, prefix, max_arrows):
    cols = read_score_csv(csv_path)
    names = (f"{prefix}1", f"{prefix}2")
    if any(n not in cols for n in names):
        raise ValueError(f"{csv_path}: missing {names[0]}/{names[1]} columns "
                         f"(pass the CSV written by the simulator's score test)")
    v1, v2 = cols["v1"], cols["v2"]
    f1, f2 = cols[names[0]], cols[names[1]]
    n = v1.shape[0]
    step = max(1, int(np.ceil(n / max_arrows)))
    sl = slice(0, None, step)
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.quiver(v1[sl], v2[sl], f1[sl], f2[sl], angles="xy", alpha=0.8)
    ax.scatter(v1[sl], v2[sl], s=2, c="k", alpha=0.3)
    ax.set_xlabel("v1")
    ax.set_ylabel("v2")
    ax.set_title("score" if prefix == "s_est" else "collision force")
    ax.axis("equal")
    fig.tight_layout()
    return fig


def snapshot_figure(path: str, kind: str, *, component: int = 1,
                    bins: int = 80, overlay: bool = True, csv: str | None = None,
                    max_arrows: int = 2000):
    if kind not in SNAPSHOT_KINDS:
        raise ValueError(f"unknown kind: {kind!r} (choose from {SNAPSHOT_KINDS})")
    if kind in ("quiver_score", "quiver_force"):
        if csv is None:
            raise ValueError(f"kind {kind!r} needs the score-test CSV (--csv)")
        prefix = "s_est" if kind == "quiver_score" else "U"
        return _quiver_figure(csv, prefix, max_arrows)
    snap = read_snapshot(path)
    if kind == "phase_space":
        return _phase_space_figure(snap, bins)
    log_scale = kind == "v_marginal_log"
    component = min(component, snap.dv - 1)
    return _v_marginal_figure(snap, component, bins, log_scale, overlay)


def plot_snapshot(path: str, kind: str, out_dir: str, **options) -> str:
    fig = snapshot_figure(path, kind, **options)
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.splitext(os.path.basename(path))[0]
    out = os.path.join(out_dir, f"{stem}_{kind}.png")
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out
