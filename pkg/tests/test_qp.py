"""QP drivers against scipy oracles and projection properties."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize as scipy_minimize
from scipy.optimize import nnls

from condenser import qp


def _random_spd(n, rng, cond=10.0):
    A = rng.standard_normal((n, n))
    K = A @ A.T / n + np.eye(n) / cond
    return 0.5 * (K + K.T)


def _objective(K, c, x):
    return float(x @ K @ x + 2.0 * c @ x)


# ---------------------------------------------------------------------------
# nonnegative orthant: nnls oracle
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_nonneg_matches_nnls(seed):
    # min |Ax - b|^2 = x'(A'A)x - 2(A'b)'x, so K = A'A and c = -A'b
    rng = np.random.default_rng(seed)
    m, n = 40, 25
    A = rng.standard_normal((m, n))
    b = rng.standard_normal(m)
    K = A.T @ A
    c = -A.T @ b
    res = qp.minimize_nonneg(K, c)
    x_ref, _ = nnls(A, b)
    assert np.all(res.x >= 0.0)
    assert _objective(K, c, res.x) <= _objective(K, c, x_ref) + 1e-8
    assert np.max(np.abs(res.x - x_ref)) <= 1e-6 * (1.0 + np.max(x_ref))


# ---------------------------------------------------------------------------
# simplex and box-simplex: SLSQP oracle
# ---------------------------------------------------------------------------

def _slsqp(K, c, n, ub=None):
    cons = [{"type": "eq", "fun": lambda x: x.sum() - 1.0}]
    bounds = [(0.0, None if ub is None else ub[i]) for i in range(n)]
    r = scipy_minimize(lambda x: _objective(K, c, x),
                       np.full(n, 1.0 / n), jac=lambda x: 2.0 * (K @ x + c),
                       method="SLSQP", bounds=bounds, constraints=cons,
                       options={"maxiter": 500, "ftol": 1e-14})
    return r.x


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_simplex_matches_slsqp(seed):
    rng = np.random.default_rng(10 + seed)
    n = 15
    K = _random_spd(n, rng)
    c = rng.standard_normal(n)
    res = qp.minimize_simplex(K, c)
    ref = _slsqp(K, c, n)
    assert abs(res.x.sum() - 1.0) <= 1e-10
    assert np.all(res.x >= -1e-12)
    assert _objective(K, c, res.x) <= _objective(K, c, ref) + 1e-8


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_box_simplex_matches_slsqp(seed):
    rng = np.random.default_rng(20 + seed)
    n = 15
    K = _random_spd(n, rng)
    c = rng.standard_normal(n)
    ub = rng.uniform(0.08, 0.4, n)
    while ub.sum() <= 1.2:
        ub *= 1.2
    res = qp.minimize_box_simplex(K, c, ub)
    ref = _slsqp(K, c, n, ub=ub)
    assert abs(res.x.sum() - 1.0) <= 1e-9
    assert np.all(res.x >= -1e-12)
    assert np.all(res.x <= ub + 1e-12)
    assert _objective(K, c, res.x) <= _objective(K, c, ref) + 1e-8


def test_box_too_small_rejected():
    with pytest.raises(ValueError):
        qp.project_box_simplex(np.zeros(3), np.full(3, 0.2))


# ---------------------------------------------------------------------------
# convergence reporting
# ---------------------------------------------------------------------------

def test_monotone_trace():
    rng = np.random.default_rng(5)
    n = 60
    K = _random_spd(n, rng, cond=1000.0)
    c = rng.standard_normal(n)
    res = qp.minimize_simplex(K, c, keep_trace=True)
    assert res.converged
    if len(res.trace) >= 2:
        objs = [f for _, f, _ in res.trace]
        assert np.all(np.diff(objs) <= 1e-12 * (1.0 + np.abs(objs[:-1])))


def test_kkt_residual_reported():
    rng = np.random.default_rng(6)
    n = 30
    K = _random_spd(n, rng)
    res = qp.minimize_simplex(K, rng.standard_normal(n))
    scale = 2.0 * float(np.median(np.diag(K)))
    assert res.kkt_residual <= qp.KKT_TOL_REL * scale


# ---------------------------------------------------------------------------
# projections (property-based)
# ---------------------------------------------------------------------------

vectors = st.lists(st.floats(-10.0, 10.0), min_size=2, max_size=12)


@given(vectors)
@settings(max_examples=80, deadline=None)
def test_project_simplex_feasible(vals):
    v = np.asarray(vals)
    x = qp.project_simplex(v)
    assert np.all(x >= 0.0)
    assert abs(x.sum() - 1.0) <= 1e-9


@given(vectors, st.randoms(use_true_random=False))
@settings(max_examples=50, deadline=None)
def test_project_simplex_is_nearest(vals, rnd):
    v = np.asarray(vals)
    x = qp.project_simplex(v)
    # any other simplex point is at least as far from v
    y = np.asarray([rnd.random() for _ in vals])
    y = y / y.sum() if y.sum() > 0 else np.full(len(vals), 1.0 / len(vals))
    assert np.linalg.norm(x - v) <= np.linalg.norm(y - v) + 1e-9


@given(vectors)
@settings(max_examples=80, deadline=None)
def test_project_box_simplex_feasible(vals):
    v = np.asarray(vals)
    ub = np.full(len(v), 2.0 / len(v))
    x = qp.project_box_simplex(v, ub)
    assert np.all(x >= -1e-12)
    assert np.all(x <= ub + 1e-12)
    assert abs(x.sum() - 1.0) <= 1e-9
