"""Discrete (signed) measures, potentials, energies and external fields."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import CloudMismatch
from .geometry import A1, A2, PointCloud

MASS_TOL = 1e-8


def _same_cloud(a: PointCloud, b: PointCloud) -> bool:
    return a is b or (len(a) == len(b) and np.array_equal(a.points, b.points))


def _require_same_cloud(a: PointCloud, b: PointCloud) -> None:
    if not _same_cloud(a, b):
        raise CloudMismatch("objects refer to different point clouds")


@dataclass(frozen=True)
class DiscreteMeasure:
    """Nonnegative weights over the nodes of a cloud."""

    weights: np.ndarray
    cloud: PointCloud

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.cloud),):
            raise CloudMismatch("weight vector length != node count")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "weights", w)
        w.setflags(write=False)

    @staticmethod
    def on_plate(cloud: PointCloud, plate: int, plate_weights) -> "DiscreteMeasure":
        idx = cloud.a1_indices if plate == A1 else cloud.a2_indices
        w = np.zeros(len(cloud))
        w[idx] = np.asarray(plate_weights, dtype=float)
        return DiscreteMeasure(w, cloud)

    @staticmethod
    def zero(cloud: PointCloud) -> "DiscreteMeasure":
        return DiscreteMeasure(np.zeros(len(cloud)), cloud)

    def mass(self) -> float:
        return float(self.weights.sum())

    def scaled(self, factor: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.weights * factor, self.cloud)

    def support(self, threshold: float = 0.0) -> np.ndarray:
        return np.flatnonzero(self.weights > threshold)


@dataclass(frozen=True)
class SignedDiscreteMeasure:
    """Hahn-Jordan split by construction: plus on A1 nodes, minus on A2 nodes."""

    plus: DiscreteMeasure
    minus: DiscreteMeasure

    def __post_init__(self):
        _require_same_cloud(self.plus.cloud, self.minus.cloud)
        cloud = self.plus.cloud
        if np.any(self.plus.weights[cloud.plate_tag != A1] != 0):
            raise ValueError("positive part must be carried by A1 nodes")
        if np.any(self.minus.weights[cloud.plate_tag != A2] != 0):
            raise ValueError("negative part must be carried by A2 nodes")

    @property
    def cloud(self) -> PointCloud:
        return self.plus.cloud

    def signed_weights(self) -> np.ndarray:
        return self.plus.weights - self.minus.weights


def _signed(mu) -> np.ndarray:
    if isinstance(mu, SignedDiscreteMeasure):
        return mu.signed_weights()
    return mu.weights


def _cloud_of(mu) -> PointCloud:
    return mu.cloud


@dataclass(frozen=True)
class ExternalField:
    """External field values cached per node.

    Case I: given values, zero at A2 nodes, nonnegative and finite at nodes
    (lower semicontinuity has no discrete counterpart; the relaxation is
    recorded in run metadata).
    Case II: values equal the Riesz potential of zeta minus its sweep onto
    the complement.
    """

    case: str                       # "zero" | "I" | "II"
    values: np.ndarray
    cloud: PointCloud
    zeta: Optional[object] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(self.cloud),):
            raise CloudMismatch("field values length != node count")
        if not np.all(np.isfinite(v)):
            raise ValueError("field must be finite at every node")
        object.__setattr__(self, "values", v)
        v.setflags(write=False)

    @staticmethod
    def zero(cloud: PointCloud) -> "ExternalField":
        return ExternalField("zero", np.zeros(len(cloud)), cloud)

    @staticmethod
    def case_i(cloud: PointCloud, values) -> "ExternalField":
        v = np.asarray(values, dtype=float)
        if np.any(v[cloud.plate_tag == A2] != 0.0):
            raise ValueError("Case I field must vanish at A2 nodes")
        if np.any(v < 0):
            raise ValueError("Case I field must be nonnegative")
        return ExternalField("I", v, cloud)

    @staticmethod
    def case_ii(zeta, kernel_matrix, bal_op: Callable) -> "ExternalField":
        """Field U^(zeta - zeta') with zeta' produced by the supplied sweep operator."""
        cloud = _cloud_of(zeta)
        _require_same_cloud(cloud, kernel_matrix.cloud)
        if isinstance(zeta, SignedDiscreteMeasure):
            swept = bal_op(zeta.plus, kernel_matrix).weights - bal_op(zeta.minus, kernel_matrix).weights
        else:
            swept = bal_op(zeta, kernel_matrix).weights
        vals = kernel_matrix.values @ (_signed(zeta) - swept)
        return ExternalField("II", vals, cloud, zeta=zeta)


@dataclass(frozen=True)
class ConstraintMeasure:
    """Upper constraint xi on the positive part; xi(A1) must exceed 1."""

    xi: DiscreteMeasure

    def __post_init__(self):
        cloud = self.xi.cloud
        if np.any(self.xi.weights[cloud.plate_tag != A1] != 0):
            raise ValueError("constraint must be carried by A1 nodes")
        if self.xi.mass() <= 1.0:
            raise ValueError(f"constraint mass must exceed 1, got {self.xi.mass()}")

    @property
    def cloud(self) -> PointCloud:
        return self.xi.cloud

    def mass(self) -> float:
        return self.xi.mass()


# ---------------------------------------------------------------------------
# potentials and energies
# ---------------------------------------------------------------------------

def potential(mu, kernel_matrix, at: Optional[np.ndarray] = None) -> np.ndarray:
    """U[i] = sum_j K[i, j] (mu+ - mu-)[j], optionally restricted to `at` indices."""
    _require_same_cloud(_cloud_of(mu), kernel_matrix.cloud)
    u = kernel_matrix.values @ _signed(mu)
    return u if at is None else u[at]


def energy(mu, nu, kernel_matrix) -> float:
    """Mutual energy; bilinear, symmetric, positive definite on nonzero measures."""
    _require_same_cloud(_cloud_of(mu), kernel_matrix.cloud)
    _require_same_cloud(_cloud_of(nu), kernel_matrix.cloud)
    return float(_signed(mu) @ kernel_matrix.values @ _signed(nu))


def weighted_potential(mu, kernel_matrix, f: ExternalField,
                       at: Optional[np.ndarray] = None) -> np.ndarray:
    _require_same_cloud(_cloud_of(mu), f.cloud)
    w = potential(mu, kernel_matrix) + f.values
    return w if at is None else w[at]


def weighted_energy(mu, kernel_matrix, f: ExternalField) -> float:
    """E(mu, mu) + 2 <f, mu+>; the field acts on the positive part only."""
    _require_same_cloud(_cloud_of(mu), f.cloud)
    plus = mu.plus.weights if isinstance(mu, SignedDiscreteMeasure) else mu.weights
    return energy(mu, mu, kernel_matrix) + 2.0 * float(f.values @ plus)


def check_admissible(mu: SignedDiscreteMeasure, constraint: ConstraintMeasure,
                     tol: float = MASS_TOL) -> tuple:
    """True iff mu+ <= xi componentwise and both parts carry unit mass (within tol)."""
    _require_same_cloud(mu.cloud, constraint.cloud)
    xi = constraint.xi.weights
    over = mu.plus.weights - xi
    bad = np.flatnonzero(over > tol)
    plus_mass = mu.plus.mass()
    minus_mass = mu.minus.mass()
    report = {
        "constraint_violations": [(int(i), float(over[i])) for i in bad],
        "plus_mass": plus_mass,
        "minus_mass": minus_mass,
        "plus_mass_ok": abs(plus_mass - 1.0) <= tol,
        "minus_mass_ok": abs(minus_mass - 1.0) <= tol,
    }
    ok = len(bad) == 0 and report["plus_mass_ok"] and report["minus_mass_ok"]
    return ok, report


# ---------------------------------------------------------------------------
# CSV serialization
# ---------------------------------------------------------------------------

def write_measure_csv(path, mu: DiscreteMeasure) -> None:
    cloud = mu.cloud
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index"] + [f"x{i+1}" for i in range(cloud.n)] + ["weight"])
        for i in range(len(cloud)):
            writer.writerow([i] + [repr(float(v)) for v in cloud.points[i]]
                            + [repr(float(mu.weights[i]))])


def write_signed_measure_csv(path_plus, path_minus, mu: SignedDiscreteMeasure) -> None:
    write_measure_csv(path_plus, mu.plus)
    write_measure_csv(path_minus, mu.minus)
