"""Shared solved instances.

The three preset problems are expensive enough (dense kernels on 2100+
nodes) that each is built and solved once per session and shared across
the solver, verify and acceptance suites.
"""

import time

import numpy as np
import pytest

from condenser import ball_problem, halfspace_problem
from condenser.solver import solve_riesz_via_bridge

SUITE_T0 = time.time()


@pytest.fixture(scope="session")
def suite_t0():
    return SUITE_T0


@pytest.fixture(scope="session")
def ball15():
    """Ball condenser, alpha = 1.5, q = 1.5, 500 + 2000 nodes."""
    p = ball_problem(seed=0)
    return p, solve_riesz_via_bridge(p)


@pytest.fixture(scope="session")
def ball2():
    """Ball condenser with the alpha = 2 closed-form Green kernel."""
    p = ball_problem(alpha=2.0, seed=0)
    return p, solve_riesz_via_bridge(p)


@pytest.fixture(scope="session")
def hspace():
    """Half-space condenser, 3 discs, 600 + 1600 nodes."""
    p = halfspace_problem(seed=0)
    return p, solve_riesz_via_bridge(p)


@pytest.fixture(scope="session")
def small_hspace():
    """Cheap half-space instance for the solver cross-checks."""
    p = halfspace_problem(levels=2, nodes_a1=240, nodes_a2=600, seed=1)
    return p, solve_riesz_via_bridge(p)


def random_a1_measure(p, rng):
    """Unit-mass measure with random positive weights on the A1 nodes."""
    from condenser.measures import DiscreteMeasure
    w = np.zeros(len(p.cloud))
    a1 = p.a1
    w[a1] = rng.random(len(a1))
    w[a1] /= w[a1].sum()
    return DiscreteMeasure(w, p.cloud)
