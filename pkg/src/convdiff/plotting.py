"""Figure rendering for solutions and convergence tables.

Every report written by the command line tool is paired with a matplotlib
figure rendered straight to a file; the Agg backend keeps this headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_solution_plot_1d(sol, path, exact=None, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if exact is not None:
        xs = np.linspace(0.0, 1.0, 2001)
        ax.plot(xs, exact(xs), "-", color="0.6", lw=1.0, label="exact")
    ax.plot(sol.mesh.nodes, sol.values, "o-", ms=3, lw=1.0, label="computed")
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_solution_plot_2d(x, y, values, path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(5.4, 4.4))
    mesh = ax.pcolormesh(x, y, np.asarray(values).T, shading="gouraud", cmap="viridis")
    fig.colorbar(mesh, ax=ax)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_convergence_plot(tables, path, title: str = "") -> None:
    """Log-log error against N, one line per eps (and per scheme when several)."""
    if not isinstance(tables, dict):
        tables = {"": tables}
    fig, ax = plt.subplots(figsize=(6.0, 4.4))
    for label, table in tables.items():
        by_eps = {}
        for row in table.rows:
            if row.error is not None:
                by_eps.setdefault(row.eps, []).append((row.n, row.error))
        for eps, pts in by_eps.items():
            ns, errs = zip(*pts)
            name = f"eps={eps:g}" if not label else f"{label}, eps={eps:g}"
            ax.loglog(ns, errs, "o-", ms=4, lw=1.2, label=name)
    handles, _ = ax.get_legend_handles_labels()
    if handles:
        ns_all = sorted({row.n for t in tables.values() for row in t.rows})
        if len(ns_all) >= 2:
            n0, n1 = ns_all[0], ns_all[-1]
            anchor = max((row.error for t in tables.values() for row in t.rows
                          if row.error is not None and row.n == n0), default=None)
            if anchor:
                guide_n = np.array([n0, n1], dtype=float)
                ax.loglog(guide_n, anchor * (n0 / guide_n), "--", color="0.7",
                          lw=1.0, label="order 1")
    ax.set_xlabel("N")
    ax.set_ylabel("error")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
