"""Self-contained SVG plots of solution profiles."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_BRANCH_STYLE = {"small": dict(ls="--", lw=1.2), "large": dict(ls="-", lw=1.6)}


def plot_profiles(profiles, j: int, path, n_eval: int = 800) -> None:
    """Small and large profiles for one nodal class on shared axes."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for p in profiles:
        traj = p.trajectory
        rr = np.linspace(traj.r[0], traj.r[-1], n_eval)
        style = _BRANCH_STYLE.get(p.branch, {})
        ax.plot(rr, traj.u_at(rr), label=f"eta={p.eta:.6g} ({p.branch})", **style)
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel("r")
    ax.set_ylabel("u(r)")
    ax.set_title(f"j = {j}: {j} interior zeros, {j + 1} nodal domains")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_csv_profiles(rows_by_label, j: int, path) -> None:
    """Same plot, from already-loaded (label, branch, r, u) tuples."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for label, branch, r, u in rows_by_label:
        ax.plot(r, u, label=label, **_BRANCH_STYLE.get(branch, {}))
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel("r")
    ax.set_ylabel("u(r)")
    ax.set_title(f"j = {j}: {j} interior zeros, {j + 1} nodal domains")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
