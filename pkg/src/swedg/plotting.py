"""Matplotlib figures for runs and benchmarks (only imported with --figures)."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_fields(path, W, mesh, eps, t, title=""):
    """Total water height H = h + b (dry nodes masked) next to the element viscosity."""
    h = W[0]
    H = np.where(h > 1e-4, h + mesh.b, np.nan)
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.5), constrained_layout=True)
    sc = axes[0].scatter(mesh.x.ravel(), mesh.y.ravel(), c=H.ravel(), s=2, cmap="viridis")
    fig.colorbar(sc, ax=axes[0], label="H = h + b")
    e = np.broadcast_to(np.asarray(eps)[:, None, None], mesh.x.shape)
    sc = axes[1].scatter(mesh.x.ravel(), mesh.y.ravel(), c=e.ravel(), s=2, cmap="magma")
    fig.colorbar(sc, ax=axes[1], label="viscosity coefficient")
    for ax, name in zip(axes, ("water height", "viscosity")):
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title(f"{title} {name}, t = {t:.4g}".strip())
    return _save(fig, path)


def plot_slice(path, rows, t, axis, coordinate):
    rows = np.asarray(rows, dtype=float)
    order = np.argsort(rows[:, 2], kind="stable")
    s, H, b = rows[order, 2], rows[order, 9], rows[order, 8]
    fig, ax = plt.subplots(figsize=(7, 3.5), constrained_layout=True)
    ax.plot(s, H, ".-", ms=3, lw=0.8, label="H = h + b")
    if np.any(b != 0):
        ax.plot(s, b, "k-", lw=0.8, label="b")
    ax.set_xlabel("y" if axis == "x" else "x")
    ax.set_ylabel("height")
    ax.set_title(f"slice {axis} = {coordinate:g}, t = {t:.4g}")
    ax.legend()
    return _save(fig, path)


def plot_diagnostics(path, records):
    t = np.array([r.t for r in records])
    ent = np.array([r.entropy for r in records])
    mass = np.array([r.mass for r in records])
    fig, axes = plt.subplots(1, 2, figsize=(10, 3.5), constrained_layout=True)
    axes[0].plot(t, ent - ent[0])
    axes[0].set_ylabel("total entropy change")
    axes[1].plot(t, (mass - mass[0]) / abs(mass[0]))
    axes[1].set_ylabel("relative mass drift")
    for ax in axes:
        ax.set_xlabel("t")
    return _save(fig, path)


def plot_bench(path, records):
    N = np.array([r.N for r in records])
    fig, axes = plt.subplots(1, 2, figsize=(11, 4), constrained_layout=True)
    w = 0.4
    axes[0].bar(N - w / 2, [r.us_per_mdof_split for r in records], w, label="split form")
    axes[0].bar(N + w / 2, [r.us_per_mdof_standard for r in records], w, label="standard")
    axes[0].set_ylabel("runtime (us per million DOFs)")
    gf_s = [r.flops_split / r.t_split / 1e9 for r in records]
    gf_t = [r.flops_standard / r.t_standard / 1e9 for r in records]
    axes[1].plot(N, gf_s, "o-", label="split form")
    axes[1].plot(N, gf_t, "s-", label="standard")
    axes[1].plot(N, [r.roofline_split for r in records], "k--", lw=0.8, label="roofline (split)")
    axes[1].set_ylabel("GFLOP/s")
    axes[1].set_yscale("log")
    for ax in axes:
        ax.set_xlabel("N")
        ax.legend()
    return _save(fig, path)
