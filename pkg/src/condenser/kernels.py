"""Riesz and Green kernels and dense regularized kernel matrices.

The alpha-Riesz kernel is |x-y|^(alpha-n).  The alpha-Green kernel of a
domain subtracts the potential of the swept-out Dirac mass; for alpha = 2
the half-space and the ball admit image closed forms, for alpha < 2 the
matrix is obtained as the Schur complement of the Riesz matrix over a
truncated complement cloud (numerically the unconstrained sweep).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist

from .errors import OutsideDomain, SingularPair, UnsupportedDomain
from .geometry import Domain, PointCloud, reflect_across_boundary

DEFAULT_BETA = 0.5


# ---------------------------------------------------------------------------
# pointwise kernels
# ---------------------------------------------------------------------------

def riesz_kernel(x, y, alpha: float, n: int) -> float:
    if not (0.0 < alpha < n):
        raise ValueError(f"Riesz kernel needs 0 < alpha < n, got alpha={alpha}, n={n}")
    d = float(np.linalg.norm(np.asarray(x, float) - np.asarray(y, float)))
    if d == 0.0:
        raise SingularPair("Riesz kernel at coincident points")
    return d ** (alpha - n)


def green_kernel_halfspace(x, y, n: int = 3) -> float:
    """Newtonian (alpha = 2) Green kernel of the half-space x1 > 0."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x[0] <= 0 or y[0] <= 0:
        raise OutsideDomain("both points must lie in the open half-space")
    d = float(np.linalg.norm(x - y))
    if d == 0.0:
        raise SingularPair("Green kernel at coincident points")
    ybar = y.copy()
    ybar[0] = -ybar[0]
    return d ** (2 - n) - float(np.linalg.norm(x - ybar)) ** (2 - n)


def green_kernel_ball_newtonian(x, y, domain: Domain, n: Optional[int] = None) -> float:
    """Newtonian Green function of the ball via the Kelvin image charge."""
    if domain.kind != "ball":
        raise UnsupportedDomain("expected a ball domain")
    n = domain.n if n is None else n
    c = np.asarray(domain.center, float)
    R = domain.radius
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if np.linalg.norm(x - c) >= R or np.linalg.norm(y - c) >= R:
        raise OutsideDomain("both points must lie in the open ball")
    d = float(np.linalg.norm(x - y))
    if d == 0.0:
        raise SingularPair("Green kernel at coincident points")
    ry = float(np.linalg.norm(y - c))
    if ry == 0.0:
        return d ** (2 - n) - R ** (2 - n)
    ystar = c + (R**2 / ry**2) * (y - c)
    return d ** (2 - n) - (R / ry) ** (n - 2) * float(np.linalg.norm(x - ystar)) ** (2 - n)


def green_kernel_numeric(x, y, alpha: float, n: int,
                         bal_oracle: Callable[[np.ndarray], tuple]) -> float:
    """g(x, y) = riesz(x, y) - potential at x of the swept Dirac mass at y.

    bal_oracle maps an interior point y to (support points, weights) of the
    discrete sweep of the unit mass at y onto the complement.
    """
    pts, w = bal_oracle(np.asarray(y, float))
    val = riesz_kernel(x, y, alpha, n)
    d = np.linalg.norm(np.asarray(pts, float) - np.asarray(x, float), axis=1)
    if np.any(d == 0.0):
        raise SingularPair("evaluation point collides with a sweep node")
    return val - float(np.sum(w * d ** (alpha - n)))


# ---------------------------------------------------------------------------
# kernel kinds and matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RieszAlpha:
    alpha: float
    n: int

    def __post_init__(self):
        if not (0.0 < self.alpha < self.n):
            raise ValueError("RieszAlpha requires 0 < alpha < n")

    def describe(self) -> str:
        return f"riesz(alpha={self.alpha},n={self.n})"


@dataclass(frozen=True)
class GreenAlpha:
    """Green kernel of a supported domain.

    For alpha < 2 a truncated complement cloud must be supplied; the matrix
    is then the Schur complement of the Riesz matrix over that cloud.
    """

    domain: Domain
    complement_cloud: Optional[PointCloud] = None

    def describe(self) -> str:
        return f"green(domain={self.domain.kind},alpha={self.domain.alpha},n={self.domain.n})"


@dataclass(frozen=True)
class KernelMatrix:
    values: np.ndarray
    kind: object
    diagonal_rule: str
    cloud: PointCloud

    def __post_init__(self):
        self.values.setflags(write=False)

    def __len__(self) -> int:
        return self.values.shape[0]

    def is_positive_definite(self) -> bool:
        try:
            np.linalg.cholesky(self.values)
            return True
        except np.linalg.LinAlgError:
            return False


def _pairwise_riesz(pts_a: np.ndarray, pts_b: np.ndarray, alpha: float, n: int) -> np.ndarray:
    d = cdist(pts_a, pts_b)
    with np.errstate(divide="ignore"):
        return d ** (alpha - n)


def assemble(kernel, cloud: PointCloud, beta: float = DEFAULT_BETA) -> KernelMatrix:
    """Dense symmetric kernel matrix with effective-separation diagonal.

    The self-energy entry is the kernel evaluated at separation
    beta * cell_radius[i]; beta is calibrated once against the disc capacity.
    """
    if len(cloud) == 0:
        raise ValueError("empty cloud")
    pts = cloud.points
    if isinstance(kernel, RieszAlpha):
        K = _pairwise_riesz(pts, pts, kernel.alpha, kernel.n)
        np.fill_diagonal(K, (beta * cloud.cell_radius) ** (kernel.alpha - kernel.n))
    elif isinstance(kernel, GreenAlpha):
        K = _assemble_green(kernel, cloud, beta)
    else:
        raise TypeError(f"unknown kernel kind {type(kernel).__name__}")
    K = np.ascontiguousarray(0.5 * (K + K.T))
    dup = ~np.isfinite(K)
    if np.any(dup):
        raise SingularPair("coincident distinct nodes in the cloud")
    return KernelMatrix(values=K, kind=kernel, cloud=cloud,
                        diagonal_rule=f"effective-separation beta={beta}")


def _assemble_green(kernel: GreenAlpha, cloud: PointCloud, beta: float) -> np.ndarray:
    dom = kernel.domain
    pts = cloud.points
    if np.any(dom.boundary_distance(pts) <= 0):
        raise OutsideDomain("Green matrix requires all nodes strictly inside D")
    alpha, n = dom.alpha, dom.n
    if alpha == 2.0:
        K = _pairwise_riesz(pts, pts, 2.0, n)
        np.fill_diagonal(K, (beta * cloud.cell_radius) ** (2 - n))
        if dom.kind == "halfspace":
            mirror = pts.copy()
            mirror[:, 0] = -mirror[:, 0]
            K -= _pairwise_riesz(pts, mirror, 2.0, n)
        else:
            c = np.asarray(dom.center, float)
            R = dom.radius
            r = np.linalg.norm(pts - c, axis=1)
            safe = np.where(r == 0.0, 1.0, r)
            star = c + (R**2 / safe**2)[:, None] * (pts - c)
            img = (R / safe) ** (n - 2) * _pairwise_riesz(pts, star, 2.0, n)
            img[:, r == 0.0] = R ** (2 - n)
            K -= img
        return K
    if kernel.complement_cloud is None:
        raise ValueError("alpha < 2 Green matrix needs a truncated complement cloud")
    comp = kernel.complement_cloud.points
    rho2 = kernel.complement_cloud.cell_radius
    K11 = _pairwise_riesz(pts, pts, alpha, n)
    np.fill_diagonal(K11, (beta * cloud.cell_radius) ** (alpha - n))
    K12 = _pairwise_riesz(pts, comp, alpha, n)
    K22 = _pairwise_riesz(comp, comp, alpha, n)
    np.fill_diagonal(K22, (beta * rho2) ** (alpha - n))
    factor = cho_factor(K22)
    G = K11 - K12 @ cho_solve(factor, K12.T)
    return np.maximum(G, 0.0)


def cross_matrix(kernel, pts_a: np.ndarray, pts_b: np.ndarray) -> np.ndarray:
    """Kernel values between two disjoint point sets (no diagonal rule)."""
    pts_a = np.atleast_2d(np.asarray(pts_a, float))
    pts_b = np.atleast_2d(np.asarray(pts_b, float))
    if isinstance(kernel, RieszAlpha):
        return _pairwise_riesz(pts_a, pts_b, kernel.alpha, kernel.n)
    if isinstance(kernel, GreenAlpha):
        dom = kernel.domain
        if dom.alpha != 2.0:
            raise UnsupportedDomain("off-cloud Green values only for the alpha = 2 closed forms")
        n = dom.n
        K = _pairwise_riesz(pts_a, pts_b, 2.0, n)
        if dom.kind == "halfspace":
            mirror = pts_b.copy()
            mirror[:, 0] = -mirror[:, 0]
            return K - _pairwise_riesz(pts_a, mirror, 2.0, n)
        c = np.asarray(dom.center, float)
        R = dom.radius
        r = np.linalg.norm(pts_b - c, axis=1)
        safe = np.where(r == 0.0, 1.0, r)
        star = c + (R**2 / safe**2)[:, None] * (pts_b - c)
        img = (R / safe) ** (n - 2) * _pairwise_riesz(pts_a, star, 2.0, n)
        img[:, r == 0.0] = R ** (2 - n)
        return K - img
    raise TypeError(f"unknown kernel kind {type(kernel).__name__}")


# ---------------------------------------------------------------------------
# binary dump (debug interface)
# ---------------------------------------------------------------------------

_MAGIC = b"CKM1"


def dump_matrix(path, matrix: KernelMatrix) -> None:
    descr = f"{matrix.kind.describe()};{matrix.diagonal_rule}".encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<QH", len(matrix), len(descr)))
        fh.write(descr)
        fh.write(np.ascontiguousarray(matrix.values, dtype="<f8").tobytes())


def load_matrix(path) -> tuple:
    """Returns (values, descriptor string)."""
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError("not a kernel matrix dump")
        count, dlen = struct.unpack("<QH", fh.read(10))
        descr = fh.read(dlen).decode()
        data = np.frombuffer(fh.read(count * count * 8), dtype="<f8")
    return data.reshape(count, count).copy(), descr
