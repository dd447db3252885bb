"""Figure rendering for CLI runs.

Everything draws through the Agg backend straight to PNG files; no window
is ever opened.  Each function returns the path it wrote.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .geometry import A1
from .measures import weighted_potential


def _axes_pair(cloud):
    """Pick the two most spread coordinate axes for a 2D scatter."""
    spread = np.ptp(cloud.points, axis=0)
    order = np.argsort(spread)[::-1]
    return int(order[0]), int(order[1])


def plot_solution(sol, p, path) -> str:
    """Node scatter: positive part in warm, swept negative part in cold."""
    cloud = p.cloud
    ax0, ax1 = _axes_pair(cloud)
    wp = sol.lam.plus.weights
    wm = sol.lam.minus.weights
    fig, ax = plt.subplots(figsize=(7.0, 5.5))
    for w, cmap, label in ((wp, "Reds", "lambda+"), (wm, "Blues", "lambda-")):
        idx = np.flatnonzero(w > 0)
        if len(idx) == 0:
            continue
        ax.scatter(cloud.points[idx, ax0], cloud.points[idx, ax1],
                   c=w[idx], cmap=cmap, s=12.0 + 300.0 * w[idx] / w.max(),
                   alpha=0.75, label=label, linewidths=0)
    rest = np.flatnonzero((wp == 0) & (wm == 0))
    ax.scatter(cloud.points[rest, ax0], cloud.points[rest, ax1],
               c="0.85", s=3, linewidths=0, label="unused nodes")
    ax.set_xlabel(f"x{ax0 + 1}")
    ax.set_ylabel(f"x{ax1 + 1}")
    ax.set_title("condenser solution: weights per node")
    ax.legend(loc="best", fontsize=8)
    ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def plot_potentials(sol, p, path) -> str:
    """Weighted potential on A1 against distance from the boundary of D."""
    cloud = p.cloud
    W = weighted_potential(sol.lam, p.k_riesz, p.f)
    depth = p.domain.boundary_distance(cloud.points)
    a1 = cloud.a1_indices
    active = sol.lam.plus.weights[a1] > 0
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.scatter(depth[a1][active], W[a1][active], s=10, c="firebrick",
               label="A1, carrying mass", linewidths=0)
    ax.scatter(depth[a1][~active], W[a1][~active], s=10, c="steelblue",
               label="A1, at the constraint", linewidths=0)
    if sol.frostman_c is not None:
        ax.axhline(sol.frostman_c, color="0.3", ls="--", lw=1,
                   label=f"c = {sol.frostman_c:.4g}")
    ax.set_xlabel("distance to the boundary of D")
    ax.set_ylabel("weighted potential W")
    ax.set_title("Frostman structure of the minimizer")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def plot_capacity_scaling(radii, capacities, path) -> str:
    radii = np.asarray(radii, float)
    capacities = np.asarray(capacities, float)
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    ax.plot(radii, capacities, "o-", color="firebrick", label="measured")
    slope = capacities[-1] / radii[-1]
    ax.plot(radii, slope * radii, "--", color="0.4",
            label=f"linear fit {slope:.4g} r")
    ax.set_xlabel("disc radius r")
    ax.set_ylabel("capacity")
    ax.set_title("disc capacity scaling")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def plot_experiment(name: str, report: dict, path) -> str:
    """One summary figure per canned experiment."""
    fig, ax = plt.subplots(figsize=(6.0, 4.4))
    if name == "short-circuit":
        ax.semilogy(report["levels"], report["w"], "o-", color="firebrick",
                    label="1/c_g(K_j)  (Green optimum)")
        ax.semilogy(report["levels"], report["riesz_identity"], "s--",
                    color="steelblue", label="|lam - lam'|^2  (Riesz identity)")
        ax.set_xlabel("exhaustion level j")
        ax.set_ylabel("minimal Green energy")
        ax.set_title("short circuit: optima decrease toward 0")
    elif name == "unbounded-constraint":
        ax.semilogy(report["levels"], report["optima"], "o-",
                    color="firebrick", label="constrained optimum")
        ax.semilogy(report["levels"], report["component_norms"], "s--",
                    color="steelblue", label="component Riesz norm")
        ax.semilogy(report["levels"], report["norm_bounds"], ":",
                    color="0.4", label="1/j^2 bound")
        ax.set_xlabel("truncation level m")
        ax.set_title("escaping constraint: optima toward 0")
    elif name == "counterexample":
        ax.plot(report["terms"], report["green_partial_norms"], "o-",
                color="firebrick", label="Green partial norm (bounded)")
        ax2 = ax.twinx()
        ax2.plot(report["terms"], report["riesz_partial_sums"], "s--",
                 color="steelblue", label="Riesz partial sum (divergent)")
        ax.set_xlabel("terms m")
        ax.set_ylabel("Green norm")
        ax2.set_ylabel("Riesz energy")
        ax.set_title("finite Green energy, infinite Riesz energy")
        h1, l1 = ax.get_legend_handles_labels()
        h2, l2 = ax2.get_legend_handles_labels()
        ax.legend(h1 + h2, l1 + l2, loc="center right", fontsize=8)
        fig.tight_layout()
        fig.savefig(path, dpi=130)
        plt.close(fig)
        return str(path)
    elif name == "duality":
        keys = ["maxviol_wsc1", "maxviol_wsc2", "objective_gap_rel"]
        ax.bar(range(len(keys)), [report[k] for k in keys], color="firebrick")
        ax.set_xticks(range(len(keys)))
        ax.set_xticklabels(["flatness on supp", "lower bound", "objective gap"],
                           fontsize=8)
        ax.set_yscale("log")
        ax.set_title(f"duality check, eta = {report['eta']:.4g}")
        fig.tight_layout()
        fig.savefig(path, dpi=130)
        plt.close(fig)
        return str(path)
    else:
        raise ValueError(f"no figure defined for experiment {name!r}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)
