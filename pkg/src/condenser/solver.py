"""Constrained condenser solvers.

The authoritative route to the signed Riesz minimizer is the bridge: solve
the constrained Green problem on the positive plate, then set the negative
part to the sweep of the positive part onto the complement.  The direct
block-coordinate solve of the full signed problem serves as an independent
consistency oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import qp
from .balayage import balayage, equilibrium_measure
from .errors import Infeasible, InvalidSigma, SolverDiverged
from .geometry import A1, Domain, PointCloud, subcloud
from .kernels import KernelMatrix
from .measures import (ConstraintMeasure, DiscreteMeasure, ExternalField,
                       SignedDiscreteMeasure, check_admissible, energy,
                       weighted_energy)

DEGENERATE_MARGIN = 1e-10


@dataclass
class Problem:
    """Condenser geometry + constraint + field + assembled kernel handles.

    Normalization is fixed at unit mass on each plate.  k_green lives on the
    A1 subcloud (index order given by cloud.a1_indices).
    """

    domain: Domain
    cloud: PointCloud
    k_riesz: KernelMatrix
    k_green: KernelMatrix
    constraint: ConstraintMeasure
    f: ExternalField

    def __post_init__(self):
        mass = self.constraint.mass()
        if mass <= 1.0 + DEGENERATE_MARGIN:
            raise Infeasible(
                f"constraint mass {mass} leaves a numerically empty feasible set")

    @property
    def a1(self) -> np.ndarray:
        return self.cloud.a1_indices

    @property
    def a2(self) -> np.ndarray:
        return self.cloud.a2_indices

    def a1_cloud(self) -> PointCloud:
        return self.k_green.cloud

    def feasible_start(self) -> SignedDiscreteMeasure:
        """Feasible point built like the admissibility lemma: clip the largest
        constraint weights to unit mass; negative part is the A2 equilibrium."""
        xi = self.constraint.xi.weights[self.a1]
        order = np.argsort(xi)[::-1]
        w = np.zeros_like(xi)
        acc = 0.0
        for i in order:
            take = min(xi[i], 1.0 - acc)
            w[i] = take
            acc += take
            if acc >= 1.0:
                break
        if acc < 1.0 - 1e-12:
            raise Infeasible("constraint mass below 1 on the positive plate")
        plus = DiscreteMeasure.on_plate(self.cloud, A1, w)
        minus, _ = equilibrium_measure(self.a2, self.k_riesz)
        return SignedDiscreteMeasure(plus=plus, minus=minus)


@dataclass
class Solution:
    lam: SignedDiscreteMeasure
    green_minimizer: DiscreteMeasure
    objective_riesz: float
    objective_green: float
    frostman_c: Optional[float] = None
    kkt_residuals: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)


def _green_field_values(p: Problem) -> np.ndarray:
    return p.f.values[p.a1]


def solve_green_constrained(p: Problem, x0: Optional[np.ndarray] = None,
                            tol_rel: float = qp.KKT_TOL_REL,
                            keep_trace: bool = False) -> DiscreteMeasure:
    """Unique minimizer of nu' G nu + 2 f' nu over {0 <= nu <= xi, sum nu = 1}."""
    ub = p.constraint.xi.weights[p.a1]
    res = qp.minimize_box_simplex(p.k_green.values, _green_field_values(p), ub,
                                  x0=x0, tol_rel=tol_rel, keep_trace=keep_trace)
    out = DiscreteMeasure.on_plate(p.cloud, A1, np.maximum(res.x, 0.0))
    object.__setattr__(out, "solver_result", res)
    return out


def solve_riesz_via_bridge(p: Problem, tol_rel: float = qp.KKT_TOL_REL) -> Solution:
    """Bridge route: positive part from the Green problem, negative part its sweep."""
    ok, report = check_admissible(p.feasible_start(), p.constraint, tol=1e-8)
    if not ok:
        raise Infeasible(f"no admissible measure: {report}")
    nu = solve_green_constrained(p, tol_rel=tol_rel)
    swept = balayage(nu, p.k_riesz, tol_rel=tol_rel)
    lam = SignedDiscreteMeasure(plus=nu, minus=swept)
    nu_a1 = nu.weights[p.a1]
    obj_green = float(nu_a1 @ p.k_green.values @ nu_a1
                      + 2.0 * _green_field_values(p) @ nu_a1)
    obj_riesz = weighted_energy(lam, p.k_riesz, p.f)
    return Solution(
        lam=lam,
        green_minimizer=nu,
        objective_riesz=obj_riesz,
        objective_green=obj_green,
        kkt_residuals={
            "green": nu.solver_result.kkt_residual,
            "balayage": swept.solver_result.kkt_residual,
        },
        metadata={"route": "bridge", "minus_mass": swept.mass()},
    )


@dataclass
class DirectSolveResult:
    measure: SignedDiscreteMeasure
    objectives: List[float]
    converged: bool


def solve_riesz_direct(p: Problem, max_rounds: int = 80, rel_tol: float = 1e-10,
                       minus_upper: Optional[np.ndarray] = None) -> DirectSolveResult:
    """Block-coordinate minimization of the full signed quadratic form.

    Alternates exact solves in mu+ (box-simplex under xi) and mu- (simplex,
    optionally boxed by minus_upper); the objective is non-increasing by
    construction of the exact block steps.
    """
    K = p.k_riesz.values
    a1, a2 = p.a1, p.a2
    K11 = K[np.ix_(a1, a1)]
    K12 = K[np.ix_(a1, a2)]
    K22 = K[np.ix_(a2, a2)]
    f1 = p.f.values[a1]
    ub = p.constraint.xi.weights[a1]

    start = p.feasible_start()
    wp = start.plus.weights[a1]
    wm = start.minus.weights[a2]

    def objective(wp, wm):
        return float(wp @ K11 @ wp - 2.0 * wp @ K12 @ wm + wm @ K22 @ wm
                     + 2.0 * f1 @ wp)

    objectives = [objective(wp, wm)]
    converged = False
    for _ in range(max_rounds):
        rp = qp.minimize_box_simplex(K11, f1 - K12 @ wm, ub, x0=wp,
                                     raise_on_fail=False)
        wp = rp.x
        c_minus = -(K12.T @ wp)
        if minus_upper is None:
            rm = qp.minimize_simplex(K22, c_minus, x0=wm, raise_on_fail=False)
        else:
            rm = qp.minimize_box_simplex(K22, c_minus, minus_upper, x0=wm,
                                         raise_on_fail=False)
        wm = rm.x
        objectives.append(objective(wp, wm))
        if abs(objectives[-2] - objectives[-1]) <= rel_tol * (1.0 + abs(objectives[-1])):
            converged = True
            break
    measure = SignedDiscreteMeasure(
        plus=DiscreteMeasure.on_plate(p.cloud, A1, np.maximum(wp, 0.0)),
        minus=DiscreteMeasure.on_plate(p.cloud, 2, np.maximum(wm, 0.0)),
    )
    return DirectSolveResult(measure=measure, objectives=objectives,
                             converged=converged)


def solve_unconstrained_weighted(k_green: KernelMatrix, f0_values: np.ndarray,
                                 x0: Optional[np.ndarray] = None,
                                 tol_rel: float = qp.KKT_TOL_REL) -> DiscreteMeasure:
    """Minimizer over the probability simplex on the A1 nodes (no box)."""
    f0 = np.asarray(f0_values, dtype=float)
    if not np.all(np.isfinite(f0)):
        raise ValueError("weighted field must be finite at every node")
    res = qp.minimize_simplex(k_green.values, f0, x0=x0, tol_rel=tol_rel)
    out = DiscreteMeasure(np.maximum(res.x, 0.0), k_green.cloud)
    object.__setattr__(out, "solver_result", res)
    return out


def solve_signed_constraint(p: Problem, sigma_minus: DiscreteMeasure,
                            tol: float = 1e-6) -> Solution:
    """Doubly-constrained problem (mu+ <= xi, mu- <= sigma-).

    Requires sigma- >= sweep(xi); the optimum provably coincides with the
    xi-only problem's, which is recorded in the metadata for verification.
    """
    swept_xi = balayage(p.constraint.xi, p.k_riesz)
    gap = sigma_minus.weights - swept_xi.weights
    scale = max(float(np.max(swept_xi.weights)), 1e-300)
    bad = np.flatnonzero(gap < -tol * scale)
    if len(bad):
        i = int(bad[np.argmin(gap[bad])])
        raise InvalidSigma(
            f"sigma- falls below the swept constraint at node {i} "
            f"(deficit {-gap[i]:.3e})")
    direct = solve_riesz_direct(p, minus_upper=sigma_minus.weights[p.a2])
    lam = direct.measure
    obj = weighted_energy(lam, p.k_riesz, p.f)
    reference = solve_riesz_via_bridge(p)
    return Solution(
        lam=lam,
        green_minimizer=reference.green_minimizer,
        objective_riesz=obj,
        objective_green=reference.objective_green,
        kkt_residuals={"direct_converged": direct.converged},
        metadata={
            "route": "signed-constraint",
            "xi_only_objective": reference.objective_riesz,
            "descent_log": direct.objectives,
        },
    )
