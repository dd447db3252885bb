"""Ready-made condenser problems used by the CLI examples and the tests.

Two geometries recur everywhere: the ball condenser with a scaled
equilibrium constraint (alpha < 2) and the half-space condenser whose
positive plate is a stack of growing discs with the 1/k^2 equilibrium
series as constraint (alpha = 2).
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .balayage import equilibrium_measure
from .geometry import (A1, A2, BallInterior, ComplementShell, DiscStack,
                       Domain, PlateSpec, discretize, merge_clouds, subcloud)
from .kernels import DEFAULT_BETA, GreenAlpha, RieszAlpha, assemble
from .measures import ConstraintMeasure, DiscreteMeasure, ExternalField
from .solver import Problem


def ball_problem(alpha: float = 1.5, q: float = 1.5, radius: float = 1.0,
                 nodes_a1: int = 500, nodes_a2: int = 2000,
                 outer_radius: Optional[float] = None, seed: int = 0,
                 beta: Optional[float] = None, margin: float = 0.3) -> Problem:
    """Ball condenser: A1 fills D = B(0, radius), xi = q x equilibrium of A1."""
    dom = Domain("ball", alpha=alpha, radius=radius,
                 center=(0.0, 0.0, 0.0))
    if beta is None:
        # alpha < 2 sweeps onto a singular volume density; a wider smearing
        # radius removes the near-field bias of the lumped self-energies
        beta = 0.8 if alpha < 2 else DEFAULT_BETA
    if outer_radius is None:
        outer_radius = 20.0 * radius if alpha < 2 else 5.0 * radius
    c1 = discretize(dom, PlateSpec(A1, BallInterior(margin=margin * radius),
                                   nodes_a1), seed=seed)
    shell = ComplementShell(outer_radius=outer_radius, core_radius=radius,
                            boundary_fraction=0.5 if alpha < 2 else 0.8,
                            n_layers=8 if alpha < 2 else 4)
    c2 = discretize(dom, PlateSpec(A2, shell, nodes_a2), seed=seed)
    cloud = merge_clouds(c1, c2)
    k_riesz = assemble(RieszAlpha(alpha, 3), cloud, beta=beta)
    a1c = subcloud(cloud, cloud.a1_indices)
    complement = subcloud(cloud, cloud.a2_indices) if alpha < 2 else None
    k_green = assemble(GreenAlpha(dom, complement_cloud=complement), a1c,
                       beta=beta)
    eq, _ = equilibrium_measure(cloud.a1_indices, k_riesz)
    xi = ConstraintMeasure(eq.scaled(q))
    return Problem(domain=dom, cloud=cloud, k_riesz=k_riesz, k_green=k_green,
                   constraint=xi, f=ExternalField.zero(cloud))


def halfspace_problem(levels: int = 3, nodes_a1: int = 600,
                      nodes_a2: int = 1600, seed: int = 0,
                      beta: float = DEFAULT_BETA,
                      outer_radius: Optional[float] = None) -> Problem:
    """Half-space condenser: discs K_k at x1 = 1/k of radius k, k <= levels,
    with the constraint sum lambda_k / k^2 over the per-disc equilibria."""
    dom = Domain("halfspace", alpha=2.0)
    stack = DiscStack.of(*[(1.0 / k, float(k)) for k in range(1, levels + 1)])
    c1 = discretize(dom, PlateSpec(A1, stack, nodes_a1), seed=seed)
    if outer_radius is None:
        outer_radius = 80.0 * levels
    shell = ComplementShell(outer_radius=outer_radius,
                            core_radius=levels + 1.0, depth=6.0,
                            boundary_fraction=0.8, n_layers=4)
    c2 = discretize(dom, PlateSpec(A2, shell, nodes_a2), seed=seed)
    cloud = merge_clouds(c1, c2)
    k_riesz = assemble(RieszAlpha(2.0, 3), cloud, beta=beta)
    a1c = subcloud(cloud, cloud.a1_indices)
    k_green = assemble(GreenAlpha(dom), a1c, beta=beta)

    # constraint: per-disc equilibrium measures weighted by 1/k^2
    xi_w = np.zeros(len(cloud))
    a1 = cloud.a1_indices
    for k in range(1, levels + 1):
        on_disc = a1[np.abs(cloud.points[a1, 0] - 1.0 / k) < 1e-12]
        eq, _ = equilibrium_measure(on_disc, k_riesz)
        xi_w += eq.weights / k**2
    xi = ConstraintMeasure(DiscreteMeasure(xi_w, cloud))
    return Problem(domain=dom, cloud=cloud, k_riesz=k_riesz, k_green=k_green,
                   constraint=xi, f=ExternalField.zero(cloud))
