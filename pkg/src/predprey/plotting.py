"""Figure rendering for trajectories, vector-field grids and plant runs.

All functions draw to a file (Agg backend, no display) and return the path
written. They take plain trajectories and report records, so they work the
same from the CLI and from scripts.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .integrators import Trajectory


def plot_trajectory_2d(traj: Trajectory, path, v_values=None, title: str = ""):
    """Phase-plane curve plus time series, with an optional V(t) panel."""
    tt, yy = traj.arrays()
    ncols = 3 if v_values is not None else 2
    fig, axes = plt.subplots(1, ncols, figsize=(4.2 * ncols, 3.6))

    ax = axes[0]
    ax.plot(yy[:, 0], yy[:, 1], lw=1.2)
    ax.plot(yy[0, 0], yy[0, 1], "o", ms=5, color="tab:green", label="start")
    ax.plot(yy[-1, 0], yy[-1, 1], "s", ms=5, color="tab:red", label="end")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("phase plane")
    ax.legend(loc="best", fontsize=8)

    ax = axes[1]
    ax.plot(tt, yy[:, 0], label="x")
    ax.plot(tt, yy[:, 1], label="y")
    ax.set_xlabel("t")
    ax.set_title("time series")
    ax.legend(loc="best", fontsize=8)

    if v_values is not None:
        ax = axes[2]
        ax.plot(tt, v_values, color="tab:purple")
        ax.set_xlabel("t")
        ax.set_ylabel("V")
        ax.set_title("Lyapunov / first integral")

    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_field_grid(rows, path, title: str = ""):
    """Quiver plot of (x, y, dx, dy) grid rows."""
    arr = np.asarray(rows, dtype=float)
    fig, ax = plt.subplots(figsize=(5.0, 4.4))
    ax.quiver(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], angles="xy")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_plant(traj: Trajectory, report, y_f: float, path, title: str = ""):
    """Shoot length with growth spurts shaded, plus concentrations."""
    tt, yy = traj.arrays()
    lengths = 1.0 / yy[:, 2]
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.8))

    ax = axes[0]
    ax.plot(tt, lengths, color="tab:green")
    for t0, t1 in report.growth_spurts:
        ax.axvspan(t0, t1, color="tab:green", alpha=0.15)
    if report.t_star is not None:
        ax.axvline(report.t_star, color="tab:red", ls="--", lw=1, label="t*")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("t")
    ax.set_ylabel("shoot length L")
    ax.set_title("growth" + (" (stopped)" if report.stopped else ""))

    ax = axes[1]
    ax.plot(tt, yy[:, 0], label="nutrient x")
    ax.plot(tt, yy[:, 1], label="hormone y")
    ax.axhline(y_f, color="k", ls=":", lw=1, label="y_f")
    ax.set_xlabel("t")
    ax.set_title("concentrations")
    ax.legend(loc="best", fontsize=8)

    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_analysis(field, report: dict, bbox, path, n: int = 18, title: str = ""):
    """Vector field with equilibria and, in coexistence, the tangent oval."""
    x0, y0, x1, y1 = bbox
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    U = np.zeros((n, n))
    V = np.zeros((n, n))
    for i, yv in enumerate(ys):
        for j, xv in enumerate(xs):
            dx, dy = field.eval((float(xv), float(yv)))
            U[i, j], V[i, j] = dx, dy
    fig, ax = plt.subplots(figsize=(5.4, 4.6))
    ax.quiver(*np.meshgrid(xs, ys), U, V, angles="xy", color="0.55")

    eq = report["equilibrium"]
    ax.plot(*eq["boundary"], "s", color="tab:orange", ms=7, label="boundary eq.")
    bx, by = eq["interior"]
    if eq["interior_in_quadrant"]:
        ax.plot(bx, by, "o", color="tab:red", ms=7, label="interior eq.")

    peak = report.get("peak_bound")
    if peak is not None:
        from .lyapunov import value  # local import avoids cycle at module load

        spec = peak["_spec"]
        gx = np.linspace(max(x0, 1e-6), x1, 160)
        gy = np.linspace(max(y0, 1e-6), y1, 160)
        Z = np.array([[value(spec, (float(a), float(b))) for a in gx] for b in gy])
        ax.contour(gx, gy, Z, levels=[peak["C"]], colors="tab:blue")
        ax.axhline(peak["y_bar"], color="tab:blue", ls="--", lw=1, label="peak bound")

    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(loc="best", fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
