"""Dense convex QP solvers for the feasible sets used throughout.

All problems minimize q(x) = x' K x + 2 c' x with K symmetric positive
definite, over one of three feasible sets: the nonnegative orthant, the
probability simplex, or the simplex intersected with a box 0 <= x <= u.
The driver is projected gradient with Barzilai-Borwein steps (safeguarded
to monotone descent) followed by an active-set polish that solves the
reduced KKT system exactly on the identified support.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import SolverDiverged

KKT_TOL_REL = 1e-7
MAX_ITER = 20000
ACTIVE_EPS = 1e-12


@dataclass
class QPResult:
    x: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool
    trace: List[Tuple[int, float, float]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# projections
# ---------------------------------------------------------------------------

def project_nonneg(v: np.ndarray) -> np.ndarray:
    return np.maximum(v, 0.0)


def project_simplex(v: np.ndarray, total: float = 1.0) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = total} (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    k = np.arange(1, len(v) + 1)
    cond = u - css / k > 0
    rho = np.max(np.flatnonzero(cond)) + 1
    tau = css[rho - 1] / rho
    return np.maximum(v - tau, 0.0)


def project_box_simplex(v: np.ndarray, ub: np.ndarray, total: float = 1.0) -> np.ndarray:
    """Projection onto {0 <= x <= ub, sum x = total} by bisection on the shift."""
    if ub.sum() < total - 1e-14:
        raise ValueError("box too small to hold the required total mass")
    lo = float(np.min(v - ub))
    hi = float(np.max(v))
    while np.clip(v - lo, 0.0, ub).sum() < total:
        lo -= max(hi - lo, 1.0)
    for _ in range(200):
        tau = 0.5 * (lo + hi)
        s = np.clip(v - tau, 0.0, ub).sum()
        if s > total:
            lo = tau
        else:
            hi = tau
    tau = 0.5 * (lo + hi)
    x = np.clip(v - tau, 0.0, ub)
    s = x.sum()
    if s > 0 and abs(s - total) > 1e-12:
        # distribute the tiny residual over non-saturated coordinates
        free = (x > 0) & (x < ub)
        if np.any(free):
            x[free] += (total - s) / free.sum()
            x = np.clip(x, 0.0, ub)
    return x


# ---------------------------------------------------------------------------
# KKT residuals
# ---------------------------------------------------------------------------

def _kkt_nonneg(x: np.ndarray, g: np.ndarray, scale: float) -> float:
    act = x <= ACTIVE_EPS * scale
    r = np.where(act, np.maximum(-g, 0.0), np.abs(g))
    return float(np.max(r)) if len(r) else 0.0


def _kkt_sum_constrained(x: np.ndarray, g: np.ndarray, ub: Optional[np.ndarray],
                         scale: float) -> float:
    at_lo = x <= ACTIVE_EPS
    at_up = np.zeros_like(at_lo) if ub is None else x >= ub - ACTIVE_EPS * np.maximum(ub, 1.0)
    # zero-width boxes satisfy both signs; they never constrain the multiplier
    pinned = at_lo & at_up
    free = ~(at_lo | at_up)
    # minimax-optimal multiplier: residual is max(a - tau, tau - b)
    a = -np.inf
    b = np.inf
    if np.any(free):
        a = max(a, float(np.max(g[free])))
        b = min(b, float(np.min(g[free])))
    up_only = at_up & ~pinned
    lo_only = at_lo & ~pinned
    if np.any(up_only):
        a = max(a, float(np.max(g[up_only])))
    if np.any(lo_only):
        b = min(b, float(np.min(g[lo_only])))
    if not np.isfinite(a) or not np.isfinite(b):
        return 0.0
    return max(0.5 * (a - b), 0.0)


# ---------------------------------------------------------------------------
# projected gradient with BB steps
# ---------------------------------------------------------------------------

def _pg_bb(K: np.ndarray, c: np.ndarray, project: Callable, kkt: Callable,
           x0: np.ndarray, tol: float, max_iter: int,
           trace: Optional[list]) -> Tuple[np.ndarray, float, int, bool]:
    x = project(x0.copy())
    Kx = K @ x
    f = float(x @ Kx + 2.0 * c @ x)
    g = 2.0 * (Kx + c)
    diag_scale = max(float(np.median(np.diag(K))), 1e-300)
    t = 0.5 / diag_scale
    res = kkt(x, g)
    it = 0
    best_res = res
    last_gain = 0
    for it in range(1, max_iter + 1):
        if res <= tol:
            return x, res, it - 1, True
        if it - last_gain > 500:
            break  # stalled; hand over to the active-set polish
        x_new = project(x - t * g)
        step = x_new - x
        # Armijo along the projection arc; keeps the logged objective monotone
        for _ in range(40):
            Kx_new = K @ x_new
            f_new = float(x_new @ Kx_new + 2.0 * c @ x_new)
            if f_new <= f + 1e-4 * float(g @ step) + 1e-14 * abs(f):
                break
            t *= 0.5
            x_new = project(x - t * g)
            step = x_new - x
        g_new = 2.0 * (Kx_new + c)
        dx = x_new - x
        dg = g_new - g
        denom = float(dx @ dg)
        if denom > 1e-300:
            t = float(dx @ dx) / denom
        x, Kx, f, g = x_new, Kx_new, f_new, g_new
        res = kkt(x, g)
        if res < 0.5 * best_res:
            best_res = res
            last_gain = it
        if trace is not None and (it % 25 == 0 or res <= tol):
            trace.append((it, f, res))
        if float(np.linalg.norm(dx)) <= 1e-15 * (1.0 + float(np.linalg.norm(x))):
            break
    return x, res, it, res <= tol


def _objective(K, c, x) -> float:
    return float(x @ (K @ x) + 2.0 * c @ x)


# ---------------------------------------------------------------------------
# active-set polish
# ---------------------------------------------------------------------------

def _polish_nonneg(K: np.ndarray, c: np.ndarray, x: np.ndarray, tol: float,
                   max_outer: int = 1000) -> np.ndarray:
    """Lawson-Hanson style refinement warm-started from the PG support.

    A bound-constrained quasi-Newton pass runs first: when the PG iterate
    stalls with a dense near-zero fringe, it identifies the true support far
    faster than one-at-a-time active-set drops would.
    """
    from scipy.optimize import minimize as _scipy_minimize

    r = _scipy_minimize(
        lambda v: (float(v @ (K @ v) + 2.0 * c @ v), 2.0 * (K @ v + c)),
        x, jac=True, method="L-BFGS-B", bounds=[(0.0, None)] * len(x),
        options={"maxiter": 5000, "ftol": 1e-18, "gtol": 0.3 * tol})
    if np.all(np.isfinite(r.x)):
        x = np.maximum(r.x, 0.0)
    n = len(x)
    passive = x > max(1e-12, ACTIVE_EPS) * max(float(np.max(x)), 1.0)
    x = np.where(passive, x, 0.0)
    for _ in range(max_outer):
        P = np.flatnonzero(passive)
        if len(P):
            try:
                z = np.linalg.solve(K[np.ix_(P, P)], -c[P])
            except np.linalg.LinAlgError:
                z, *_ = np.linalg.lstsq(K[np.ix_(P, P)], -c[P], rcond=None)
            while np.any(z <= 0):
                xP = x[P]
                mask = z <= 0
                ratios = xP[mask] / np.maximum(xP[mask] - z[mask], 1e-300)
                alpha = float(np.min(ratios))
                xP = xP + alpha * (z - xP)
                x[P] = np.maximum(xP, 0.0)
                drop = P[np.flatnonzero(x[P] <= 1e-300)]
                if len(drop) == 0:
                    drop = P[mask][:1]
                    x[drop] = 0.0
                passive[drop] = False
                P = np.flatnonzero(passive)
                if len(P) == 0:
                    break
                try:
                    z = np.linalg.solve(K[np.ix_(P, P)], -c[P])
                except np.linalg.LinAlgError:
                    z, *_ = np.linalg.lstsq(K[np.ix_(P, P)], -c[P], rcond=None)
            if len(P):
                x[P] = z
        g = 2.0 * (K @ x + c)
        cand = np.flatnonzero(~passive & (g < -tol))
        if len(cand) == 0:
            return x
        # admit a block of the most violating candidates per pass; the
        # feasibility loop above prunes any overshoot
        take = max(1, min(len(cand), 64))
        passive[cand[np.argsort(g[cand])[:take]]] = True
    return x


def _polish_sum_constrained(K: np.ndarray, c: np.ndarray, x: np.ndarray,
                            ub: Optional[np.ndarray], tol: float, total: float = 1.0,
                            max_outer: int = 200) -> np.ndarray:
    """Primal active-set refinement for {0 <= x (<= ub), sum x = total}."""
    n = len(x)
    inf_ub = np.full(n, np.inf) if ub is None else ub
    up_eps = np.where(np.isfinite(inf_ub), ACTIVE_EPS * np.maximum(inf_ub, 1.0), 0.0)
    at_lo = x <= ACTIVE_EPS
    at_up = np.isfinite(inf_ub) & (x >= inf_ub - up_eps)
    x = x.copy()
    for _ in range(max_outer):
        free = ~(at_lo | at_up)
        F = np.flatnonzero(free)
        if len(F) == 0:
            at_lo[np.argmax(at_lo)] = False
            continue
        fixed_up = np.flatnonzero(at_up)
        rhs_mass = total - float(inf_ub[fixed_up].sum())
        m = len(F)
        A = np.empty((m + 1, m + 1))
        A[:m, :m] = 2.0 * K[np.ix_(F, F)]
        A[:m, m] = 1.0
        A[m, :m] = 1.0
        A[m, m] = 0.0
        b = np.empty(m + 1)
        b[:m] = -2.0 * (c[F] + K[np.ix_(F, fixed_up)] @ inf_ub[fixed_up])
        b[m] = rhs_mass
        try:
            sol = np.linalg.solve(A, b)
        except np.linalg.LinAlgError:
            sol, *_ = np.linalg.lstsq(A, b, rcond=None)
        z = sol[:m]
        lo_bad = z < 0.0
        up_bad = np.isfinite(inf_ub[F]) & (z > inf_ub[F])
        if np.any(lo_bad) or np.any(up_bad):
            xF = x[F]
            alpha = 1.0
            tgt = np.where(lo_bad, 0.0, inf_ub[F])
            viol = lo_bad | up_bad
            denom = z[viol] - xF[viol]
            ok = np.abs(denom) > 1e-300
            if np.any(ok):
                ratios = (tgt[viol][ok] - xF[viol][ok]) / denom[ok]
                ratios = ratios[ratios >= 0.0]
                if len(ratios):
                    alpha = min(1.0, float(np.min(ratios)))
            x[F] = xF + alpha * (z - xF)
            newly_lo = F[x[F] <= 1e-14]
            newly_up = F[np.isfinite(inf_ub[F]) & (x[F] >= inf_ub[F] - 1e-14)]
            if len(newly_lo) == 0 and len(newly_up) == 0:
                # numerical stall: pin the worst violator directly
                worst = F[np.argmin(np.where(lo_bad, z, np.inf))] if np.any(lo_bad) \
                    else F[np.argmax(np.where(up_bad, z - inf_ub[F], -np.inf))]
                if lo_bad[np.flatnonzero(F == worst)[0]]:
                    x[worst] = 0.0
                    at_lo[worst] = True
                else:
                    x[worst] = inf_ub[worst]
                    at_up[worst] = True
            else:
                x[newly_lo] = 0.0
                at_lo[newly_lo] = True
                x[newly_up] = inf_ub[newly_up]
                at_up[newly_up] = True
            continue
        x[F] = z
        x[at_lo] = 0.0
        x[at_up] = inf_ub[at_up]
        tau = float(sol[m])
        g = 2.0 * (K @ x + c)
        movable = inf_ub > ACTIVE_EPS
        rel_lo = np.flatnonzero(at_lo & movable & (g - tau < -tol))
        rel_up = np.flatnonzero(at_up & movable & (g - tau > tol))
        if len(rel_lo) == 0 and len(rel_up) == 0:
            return x
        # release the most negative multiplier; lowest index breaks ties
        best = None
        if len(rel_lo):
            i = rel_lo[np.argmin(g[rel_lo] - tau)]
            best = ("lo", i, tau - g[i])
        if len(rel_up):
            j = rel_up[np.argmax(g[rel_up] - tau)]
            if best is None or g[j] - tau > best[2]:
                best = ("up", j, g[j] - tau)
        if best[0] == "lo":
            at_lo[best[1]] = False
        else:
            at_up[best[1]] = False
    return x


# ---------------------------------------------------------------------------
# public drivers
# ---------------------------------------------------------------------------

def _drive(K, c, project, kkt, x0, tol_rel, max_iter, polish_fn, keep_trace,
           raise_on_fail) -> QPResult:
    K = np.asarray(K, float)
    c = np.asarray(c, float)
    scale = max(float(np.median(np.diag(K))) * 2.0, 1e-300)
    tol = tol_rel * scale
    trace = [] if keep_trace else None
    x, res, it, ok = _pg_bb(K, c, project, kkt, x0, tol, max_iter, trace)
    if res > tol * 1e-3:
        x_p = polish_fn(K, c, x.copy(), tol)
        g_p = 2.0 * (K @ x_p + c)
        res_p = kkt(x_p, g_p)
        if res_p <= res and np.all(np.isfinite(x_p)):
            x, res = x_p, res_p
    ok = res <= tol
    if not ok and raise_on_fail:
        raise SolverDiverged(f"KKT residual {res:.3e} above tolerance {tol:.3e} "
                             f"after {it} iterations")
    return QPResult(x=x, objective=_objective(K, c, x), kkt_residual=res,
                    iterations=it, converged=ok, trace=trace or [])


def minimize_nonneg(K, c, x0=None, tol_rel: float = KKT_TOL_REL,
                    max_iter: int = MAX_ITER, keep_trace: bool = False,
                    raise_on_fail: bool = True) -> QPResult:
    n = len(c)
    if x0 is None:
        x0 = np.maximum(-np.asarray(c) / np.maximum(np.diag(K), 1e-300), 0.0)
    scale = max(float(np.max(np.abs(x0))), 1.0)
    return _drive(K, c, project_nonneg,
                  lambda x, g: _kkt_nonneg(x, g, scale),
                  np.asarray(x0, float), tol_rel, max_iter,
                  _polish_nonneg, keep_trace, raise_on_fail)


def minimize_simplex(K, c, x0=None, tol_rel: float = KKT_TOL_REL,
                     max_iter: int = MAX_ITER, keep_trace: bool = False,
                     raise_on_fail: bool = True) -> QPResult:
    n = len(c)
    if x0 is None:
        x0 = np.full(n, 1.0 / n)
    return _drive(K, c, project_simplex,
                  lambda x, g: _kkt_sum_constrained(x, g, None, 1.0),
                  np.asarray(x0, float), tol_rel, max_iter,
                  lambda K_, c_, x_, t_: _polish_sum_constrained(K_, c_, x_, None, t_),
                  keep_trace, raise_on_fail)


def minimize_box_simplex(K, c, ub, x0=None, tol_rel: float = KKT_TOL_REL,
                         max_iter: int = MAX_ITER, keep_trace: bool = False,
                         raise_on_fail: bool = True) -> QPResult:
    ub = np.asarray(ub, float)
    if x0 is None:
        x0 = project_box_simplex(ub / max(ub.sum(), 1e-300), ub)
    return _drive(K, c, lambda v: project_box_simplex(v, ub),
                  lambda x, g: _kkt_sum_constrained(x, g, ub, 1.0),
                  np.asarray(x0, float), tol_rel, max_iter,
                  lambda K_, c_, x_, t_: _polish_sum_constrained(K_, c_, x_, ub, t_),
                  keep_trace, raise_on_fail)
