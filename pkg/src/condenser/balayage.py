"""Balayage as an energy-norm projection, equilibrium measures and capacities.

Sweeping a measure out of D is computed as the orthogonal projection, in
the Riesz energy norm, onto the cone of nonnegative measures on the A2
nodes; the Green energy then follows from the projection identity
|mu|_g^2 = |mu - mu'|^2 = |mu|^2 - |mu'|^2.
"""

from __future__ import annotations

from typing import Callable, Optional, Tuple

import numpy as np

from . import qp
from .errors import OutsideDomain
from .geometry import Domain, PointCloud
from .kernels import KernelMatrix, RieszAlpha, cross_matrix
from .measures import DiscreteMeasure, energy


def balayage(mu: DiscreteMeasure, k_riesz: KernelMatrix,
             tol_rel: float = qp.KKT_TOL_REL, max_iter: int = qp.MAX_ITER,
             keep_trace: bool = False) -> DiscreteMeasure:
    """Sweep mu onto the A2 nodes: the unique nonnegative minimizer of |mu - theta|^2."""
    cloud = k_riesz.cloud
    a2 = cloud.a2_indices
    K22 = k_riesz.values[np.ix_(a2, a2)]
    c = -(k_riesz.values[a2] @ mu.weights)
    x0 = mu.weights[a2] if mu.weights[a2].sum() > 0 else None
    res = qp.minimize_nonneg(K22, c, x0=x0, tol_rel=tol_rel, max_iter=max_iter,
                             keep_trace=keep_trace)
    w = np.zeros(len(cloud))
    w[a2] = np.maximum(res.x, 0.0)
    out = DiscreteMeasure(w, cloud)
    object.__setattr__(out, "solver_result", res)
    return out


def green_energy_via_identity(mu: DiscreteMeasure, k_riesz: KernelMatrix) -> float:
    """Green energy |mu|_g^2 computed as |mu - mu'|^2 in the Riesz norm."""
    if mu.mass() == 0.0:
        return 0.0
    swept = balayage(mu, k_riesz)
    diff = mu.weights - swept.weights
    return float(diff @ k_riesz.values @ diff)


def equilibrium_measure(indices: np.ndarray, k: KernelMatrix,
                        tol_rel: float = qp.KKT_TOL_REL) -> Tuple[DiscreteMeasure, float]:
    """Capacitary measure on the node subset and the capacity 1/min-energy."""
    indices = np.asarray(indices, dtype=int)
    if len(indices) == 0:
        raise ValueError("empty node subset")
    sub = k.values[np.ix_(indices, indices)]
    res = qp.minimize_simplex(sub, np.zeros(len(indices)), tol_rel=tol_rel)
    w = np.zeros(len(k.cloud))
    w[indices] = np.maximum(res.x, 0.0)
    lam = DiscreteMeasure(w, k.cloud)
    e = energy(lam, lam, k)
    return lam, 1.0 / e


def dirac_balayage(y, k_riesz: KernelMatrix,
                   domain: Optional[Domain] = None) -> DiscreteMeasure:
    """Sweep of the unit point mass at an interior point y onto the A2 nodes."""
    y = np.asarray(y, dtype=float)
    if domain is not None and not bool(domain.contains(y[None, :])[0]):
        raise OutsideDomain("dirac_balayage needs y strictly inside D")
    cloud = k_riesz.cloud
    kind = k_riesz.kind
    if not isinstance(kind, RieszAlpha):
        raise TypeError("dirac_balayage needs a Riesz kernel matrix")
    a2 = cloud.a2_indices
    K22 = k_riesz.values[np.ix_(a2, a2)]
    c = -cross_matrix(kind, cloud.points[a2], y[None, :])[:, 0]
    res = qp.minimize_nonneg(K22, c)
    w = np.zeros(len(cloud))
    w[a2] = np.maximum(res.x, 0.0)
    out = DiscreteMeasure(w, cloud)
    object.__setattr__(out, "solver_result", res)
    return out


def dirac_sweep_oracle(k_riesz: KernelMatrix,
                       domain: Optional[Domain] = None) -> Callable:
    """Oracle y -> (support points, weights) for green_kernel_numeric."""
    def oracle(y: np.ndarray):
        swept = dirac_balayage(y, k_riesz, domain)
        idx = swept.support(0.0)
        return k_riesz.cloud.points[idx], swept.weights[idx]
    return oracle
