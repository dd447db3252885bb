"""Discrete measures, potentials, energies, fields and admissibility."""

import csv

import numpy as np
import pytest

from condenser import (A1, A2, AnnulusOnBoundary, ConstraintMeasure, Custom,
                       DiscreteMeasure, Domain, ExternalField, PlateSpec,
                       RieszAlpha, SignedDiscreteMeasure, assemble,
                       discretize, energy, merge_clouds, potential,
                       weighted_energy, weighted_potential)
from condenser.balayage import balayage
from condenser.errors import CloudMismatch
from condenser.measures import check_admissible, write_measure_csv

HALF = Domain("halfspace", alpha=2.0)


@pytest.fixture(scope="module")
def small():
    """60 A1 nodes on a disc plus 140 A2 nodes, with the Riesz matrix."""
    from condenser import DiscStack
    a = discretize(HALF, PlateSpec(A1, DiscStack.of((1.0, 1.0)), 60), seed=0)
    b = discretize(HALF, PlateSpec(A2, AnnulusOnBoundary(0.0, 4.0), 140), seed=0)
    cloud = merge_clouds(a, b)
    return cloud, assemble(RieszAlpha(2.0, 3), cloud)


def _unit_on(cloud, i):
    w = np.zeros(len(cloud))
    w[i] = 1.0
    return DiscreteMeasure(w, cloud)


# ---------------------------------------------------------------------------
# construction rules
# ---------------------------------------------------------------------------

def test_negative_weights_rejected(small):
    cloud, _ = small
    w = np.zeros(len(cloud))
    w[0] = -1e-9
    with pytest.raises(ValueError):
        DiscreteMeasure(w, cloud)


def test_wrong_length_rejected(small):
    cloud, _ = small
    with pytest.raises(CloudMismatch):
        DiscreteMeasure(np.ones(3), cloud)


def test_signed_measure_plate_rules(small):
    cloud, _ = small
    a2 = cloud.a2_indices
    stray = _unit_on(cloud, a2[0])
    with pytest.raises(ValueError):
        SignedDiscreteMeasure(plus=stray, minus=DiscreteMeasure.zero(cloud))


def test_constraint_needs_mass_above_one(small):
    cloud, _ = small
    a1 = cloud.a1_indices
    w = np.zeros(len(cloud))
    w[a1] = 1.0 / len(a1)
    with pytest.raises(ValueError):
        ConstraintMeasure(DiscreteMeasure(w, cloud))


def test_constraint_must_live_on_a1(small):
    cloud, _ = small
    w = np.full(len(cloud), 2.0 / len(cloud))
    with pytest.raises(ValueError):
        ConstraintMeasure(DiscreteMeasure(w, cloud))


# ---------------------------------------------------------------------------
# potentials and energies
# ---------------------------------------------------------------------------

def test_potential_single_mass():
    pts = ((0.1, 0.0, 0.0), (0.1, 2.0, 0.0))
    cloud = discretize(HALF, PlateSpec(A1, Custom(pts), 2), seed=0)
    k = assemble(RieszAlpha(2.0, 3), cloud)
    u = potential(_unit_on(cloud, 0), k)
    assert u[1] == 0.5


def test_zero_measure_zero_potential(small):
    cloud, k = small
    assert np.all(potential(DiscreteMeasure.zero(cloud), k) == 0.0)


def test_mutual_energy_unit_pair():
    pts = ((0.1, 0.0, 0.0), (0.1, 1.0, 0.0))
    cloud = discretize(HALF, PlateSpec(A1, Custom(pts), 2), seed=0)
    k = assemble(RieszAlpha(2.0, 3), cloud)
    assert energy(_unit_on(cloud, 0), _unit_on(cloud, 1), k) == 1.0


def test_energy_positive_and_symmetric(small):
    cloud, k = small
    rng = np.random.default_rng(0)
    for _ in range(10):
        mu = DiscreteMeasure(rng.random(len(cloud)), cloud)
        nu = DiscreteMeasure(rng.random(len(cloud)), cloud)
        assert energy(mu, mu, k) > 0.0
        assert abs(energy(mu, nu, k) - energy(nu, mu, k)) \
            <= 1e-12 * abs(energy(mu, nu, k))


def test_cauchy_schwarz(small):
    cloud, k = small
    rng = np.random.default_rng(1)
    for _ in range(20):
        mu = DiscreteMeasure(rng.random(len(cloud)), cloud)
        nu = DiscreteMeasure(rng.random(len(cloud)), cloud)
        lhs = abs(energy(mu, nu, k))
        rhs = np.sqrt(energy(mu, mu, k) * energy(nu, nu, k))
        assert lhs <= rhs * (1.0 + 1e-12)


def test_parallelogram_identity(small):
    cloud, k = small
    rng = np.random.default_rng(2)
    for _ in range(10):
        a = rng.random(len(cloud))
        b = rng.random(len(cloud))
        mu, nu = DiscreteMeasure(a, cloud), DiscreteMeasure(b, cloud)
        s = DiscreteMeasure(a + b, cloud)
        d = (a - b) @ k.values @ (a - b)
        lhs = energy(s, s, k) + d
        rhs = 2.0 * energy(mu, mu, k) + 2.0 * energy(nu, nu, k)
        assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def test_cloud_mismatch_detected(small):
    cloud, k = small
    other = discretize(HALF, PlateSpec(A1, Custom(((0.3, 0, 0), (0.3, 1, 0))), 2),
                       seed=0)
    with pytest.raises(CloudMismatch):
        potential(DiscreteMeasure.zero(other), k)


# ---------------------------------------------------------------------------
# external fields and weighted quantities
# ---------------------------------------------------------------------------

def test_zero_field_weighted_equals_plain(small):
    cloud, k = small
    mu = DiscreteMeasure(np.random.default_rng(3).random(len(cloud)), cloud)
    f = ExternalField.zero(cloud)
    assert np.array_equal(weighted_potential(mu, k, f), potential(mu, k))
    assert weighted_energy(mu, k, f) == energy(mu, mu, k)


def test_case_i_rules(small):
    cloud, _ = small
    vals = np.zeros(len(cloud))
    vals[cloud.a1_indices] = 1.0
    f = ExternalField.case_i(cloud, vals)
    assert f.case == "I"
    bad = vals.copy()
    bad[cloud.a2_indices[0]] = 0.5
    with pytest.raises(ValueError):
        ExternalField.case_i(cloud, bad)
    with pytest.raises(ValueError):
        ExternalField.case_i(cloud, -vals)


def test_field_must_be_finite(small):
    cloud, _ = small
    vals = np.zeros(len(cloud))
    vals[0] = np.inf
    with pytest.raises(ValueError):
        ExternalField("I", vals, cloud)


def test_case_i_weighted_potential_at_a2(small):
    # f vanishes on A2, so the weighted potential equals the plain one there
    cloud, k = small
    vals = np.zeros(len(cloud))
    vals[cloud.a1_indices] = 0.3
    f = ExternalField.case_i(cloud, vals)
    mu = DiscreteMeasure(np.random.default_rng(4).random(len(cloud)), cloud)
    a2 = cloud.a2_indices
    assert np.array_equal(weighted_potential(mu, k, f, at=a2),
                          potential(mu, k, at=a2))


def test_case_ii_energy_identity(small):
    # G_{a,f}(mu) = |mu + zeta - zeta'|^2 - |zeta - zeta'|^2 up to the
    # discretization error of "f = 0 n.e. on A2"
    cloud, k = small
    a1, a2 = cloud.a1_indices, cloud.a2_indices
    rng = np.random.default_rng(5)
    zw = np.zeros(len(cloud))
    zw[a1] = rng.random(len(a1))
    zeta = DiscreteMeasure(zw, cloud)
    f = ExternalField.case_ii(zeta, k, balayage)
    u = zeta.weights - balayage(zeta, k).weights
    assert np.allclose(f.values, k.values @ u)

    wp = np.zeros(len(cloud))
    wp[a1] = rng.random(len(a1))
    wp[a1] /= wp[a1].sum()
    wm = np.zeros(len(cloud))
    wm[a2] = rng.random(len(a2))
    wm[a2] /= wm[a2].sum()
    mu = SignedDiscreteMeasure(plus=DiscreteMeasure(wp, cloud),
                               minus=DiscreteMeasure(wm, cloud))
    lhs = weighted_energy(mu, k, f)
    v = mu.signed_weights() + u
    rhs = v @ k.values @ v - u @ k.values @ u
    norm = u @ k.values @ u
    assert abs(lhs - rhs) <= 0.02 * max(abs(lhs), norm)
    # global lower bound of the Case II functional
    assert lhs >= -norm - 0.02 * norm


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------

def _constraint(cloud):
    a1 = cloud.a1_indices
    w = np.zeros(len(cloud))
    w[a1] = 1.5 / len(a1)
    return ConstraintMeasure(DiscreteMeasure(w, cloud))


def test_uniform_shrink_admissible(small):
    cloud, _ = small
    xi = _constraint(cloud)
    a2 = cloud.a2_indices
    wm = np.zeros(len(cloud))
    wm[a2] = 1.0 / len(a2)
    mu = SignedDiscreteMeasure(
        plus=DiscreteMeasure(xi.xi.weights / xi.mass(), cloud),
        minus=DiscreteMeasure(wm, cloud))
    ok, report = check_admissible(mu, xi)
    assert ok
    assert report["constraint_violations"] == []


def test_box_violation_reported(small):
    cloud, _ = small
    xi = _constraint(cloud)
    a1 = cloud.a1_indices
    wp = xi.xi.weights / xi.mass()
    bad = int(a1[0])
    wp = wp.copy()
    wp[bad] = xi.xi.weights[bad] + 2e-8
    wm = np.zeros(len(cloud))
    wm[cloud.a2_indices] = 1.0 / len(cloud.a2_indices)
    mu = SignedDiscreteMeasure(plus=DiscreteMeasure(wp, cloud),
                               minus=DiscreteMeasure(wm, cloud))
    ok, report = check_admissible(mu, xi)
    assert not ok
    assert bad in [i for i, _ in report["constraint_violations"]]


def test_mass_deficit_flagged(small):
    cloud, _ = small
    xi = _constraint(cloud)
    mu = SignedDiscreteMeasure(
        plus=DiscreteMeasure(0.9 * xi.xi.weights / xi.mass(), cloud),
        minus=DiscreteMeasure.zero(cloud))
    ok, report = check_admissible(mu, xi)
    assert not ok
    assert not report["plus_mass_ok"]
    assert not report["minus_mass_ok"]


# ---------------------------------------------------------------------------
# CSV round trip
# ---------------------------------------------------------------------------

def test_measure_csv_roundtrip(tmp_path, small):
    cloud, _ = small
    mu = DiscreteMeasure(np.random.default_rng(6).random(len(cloud)), cloud)
    path = tmp_path / "mu.csv"
    write_measure_csv(path, mu)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["index", "x1", "x2", "x3", "weight"]
    back = np.array([float(r[4]) for r in rows[1:]])
    assert np.array_equal(back, mu.weights)
