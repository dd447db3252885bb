"""Domains, plates and deterministic low-discrepancy discretizations.

Two domains are built in: the axis-aligned half-space ``x1 > 0`` and the
open ball.  Plates are discretized into point clouds with per-node
quadrature cell radii; the cell radius feeds the kernel-diagonal
regularization downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DimensionMismatch, InfeasibleSpec, UnsupportedDomain

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
# plastic number, generator of the R3 additive recurrence
_PLASTIC = 1.324717957244746
_R3 = np.array([1.0 / _PLASTIC, 1.0 / _PLASTIC**2, 1.0 / _PLASTIC**3])

MIN_CELL_RADIUS = 1e-9

A1 = 1
A2 = 2


@dataclass(frozen=True)
class Domain:
    """Domain D with its dimension and kernel order attached.

    kind is "halfspace" (x1 > 0) or "ball".
    """

    kind: str
    n: int = 3
    alpha: float = 2.0
    center: tuple = (0.0, 0.0, 0.0)
    radius: float = 1.0
    complement_thin_at_infinity: bool = False

    def __post_init__(self):
        if self.kind not in ("halfspace", "ball"):
            raise UnsupportedDomain(f"unknown domain kind {self.kind!r}")
        if self.n < 3:
            raise DimensionMismatch(f"dimension must be >= 3, got {self.n}")
        if not (0.0 < self.alpha <= 2.0):
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")
        if self.kind == "ball":
            if self.radius <= 0:
                raise ValueError("ball radius must be positive")
            if len(self.center) != self.n:
                raise DimensionMismatch("center dimension != n")
        # Both built-in complements are unbounded with interior points.
        if self.complement_thin_at_infinity:
            raise ValueError("built-in complements are not alpha-thin at infinity")

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        """Signed distance to the boundary of D; positive inside D."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.n:
            raise DimensionMismatch("point dimension != n")
        if self.kind == "halfspace":
            return pts[:, 0]
        return self.radius - np.linalg.norm(pts - np.asarray(self.center), axis=1)

    def contains(self, points: np.ndarray) -> np.ndarray:
        return self.boundary_distance(points) > 0.0

    def in_complement(self, points: np.ndarray) -> np.ndarray:
        return self.boundary_distance(points) <= 0.0


def reflect_across_boundary(domain: Domain, point) -> np.ndarray:
    """Mirror image across the boundary plane of a half-space (an involution)."""
    if domain.kind != "halfspace":
        raise UnsupportedDomain("reflection is defined for the half-space only; "
                                "the ball uses the Kelvin image inside the kernels module")
    p = np.array(point, dtype=float)
    if p.shape != (domain.n,):
        raise DimensionMismatch("point dimension != n")
    p[0] = -p[0]
    return p


# ---------------------------------------------------------------------------
# plate shapes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscStack:
    """Discs parallel to the half-space boundary.

    Each disc is (offset along x1, radius, (c2, c3)) with the last entry the
    in-plane center; it defaults to the origin of the boundary plane.
    """

    discs: tuple

    @staticmethod
    def of(*discs) -> "DiscStack":
        norm = []
        for d in discs:
            if len(d) == 2:
                norm.append((float(d[0]), float(d[1]), (0.0, 0.0)))
            else:
                norm.append((float(d[0]), float(d[1]), (float(d[2][0]), float(d[2][1]))))
        return DiscStack(tuple(norm))


@dataclass(frozen=True)
class BallInterior:
    margin: float = 0.0


@dataclass(frozen=True)
class AnnulusOnBoundary:
    inner: float
    outer: float


@dataclass(frozen=True)
class ComplementShell:
    """Truncation of the unbounded complement D^c to a bounded shell.

    The boundary part of D^c carries boundary_fraction of the nodes (graded
    towards core_radius, the footprint of A1); the rest are volume nodes in
    n_layers strata reaching depth (half-space) or outer_radius (ball).
    """

    outer_radius: float
    core_radius: float
    depth: float = 1.0
    boundary_fraction: float = 0.6
    n_layers: int = 4
    volume_radius: float = 0.0      # lateral extent of the volume strata; 0 = auto


@dataclass(frozen=True)
class Custom:
    points: tuple
    intrinsic_dim: int = 2


@dataclass(frozen=True)
class PlateSpec:
    which: int                      # A1 or A2
    shape: object
    node_count: int
    boundary_margin: float = 0.0

    def __post_init__(self):
        if self.which not in (A1, A2):
            raise ValueError("which must be A1 or A2")
        if self.node_count <= 0:
            raise ValueError("node_count must be positive")
        if self.boundary_margin < 0:
            raise ValueError("boundary_margin must be nonnegative")


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray          # (N, n)
    cell_radius: np.ndarray     # (N,)
    plate_tag: np.ndarray       # (N,) int8, A1 or A2
    seed: int

    def __post_init__(self):
        for arr in (self.points, self.cell_radius, self.plate_tag):
            arr.setflags(write=False)
        if np.any(self.cell_radius <= 0):
            raise ValueError("cell radii must be positive")

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def a1_indices(self) -> np.ndarray:
        return np.flatnonzero(self.plate_tag == A1)

    @property
    def a2_indices(self) -> np.ndarray:
        return np.flatnonzero(self.plate_tag == A2)


def subcloud(cloud: PointCloud, indices) -> PointCloud:
    idx = np.asarray(indices, dtype=int)
    return PointCloud(
        points=cloud.points[idx].copy(),
        cell_radius=cloud.cell_radius[idx].copy(),
        plate_tag=cloud.plate_tag[idx].copy(),
        seed=cloud.seed,
    )


def merge_clouds(*clouds: PointCloud) -> PointCloud:
    return PointCloud(
        points=np.vstack([c.points for c in clouds]),
        cell_radius=np.concatenate([c.cell_radius for c in clouds]),
        plate_tag=np.concatenate([c.plate_tag for c in clouds]),
        seed=clouds[0].seed,
    )


# ---------------------------------------------------------------------------
# low-discrepancy point generators (all deterministic in the seed)
# ---------------------------------------------------------------------------

def _seed_phase(seed: int, salt: int = 0) -> float:
    """Deterministic rotation offset in [0, 2pi) derived from the seed."""
    rng = np.random.default_rng(np.uint64(seed) ^ np.uint64(0x9E3779B97F4A7C15 + salt))
    return float(rng.uniform(0.0, 2.0 * np.pi))


def golden_disc(count: int, radius: float, seed: int, salt: int = 0,
                inner: float = 0.0) -> np.ndarray:
    """Golden-angle lattice on a planar disc/annulus; returns (count, 2)."""
    i = np.arange(count)
    u = (i + 0.5) / count
    r = np.sqrt(inner**2 + (radius**2 - inner**2) * u)
    th = i * GOLDEN_ANGLE + _seed_phase(seed, salt)
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


def graded_disc(count: int, core: float, outer: float, seed: int,
                salt: int = 0) -> np.ndarray:
    """Planar disc to radius outer: equal-area core, geometric grading outside."""
    nc = max(1, count // 2)
    pts = [golden_disc(nc, core, seed, salt)]
    ng = count - nc
    if ng > 0:
        i = np.arange(ng)
        u = (i + 0.5) / ng
        r = core * (outer / core) ** u
        th = i * GOLDEN_ANGLE + _seed_phase(seed, salt + 1)
        pts.append(np.column_stack([r * np.cos(th), r * np.sin(th)]))
    return np.vstack(pts)


def fibonacci_sphere(count: int, radius: float, seed: int, salt: int = 0) -> np.ndarray:
    """Fibonacci lattice on a sphere of given radius; returns (count, 3)."""
    i = np.arange(count)
    z = 1.0 - (2.0 * i + 1.0) / count
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    th = i * GOLDEN_ANGLE + _seed_phase(seed, salt)
    return radius * np.column_stack([rho * np.cos(th), rho * np.sin(th), z])


def r3_ball(count: int, radius: float, seed: int, salt: int = 0) -> np.ndarray:
    """Uniform-density ball lattice: equal-volume Fibonacci shells; (count, 3)."""
    n_shells = max(1, int(round((3.0 * count / (4.0 * np.pi)) ** (1.0 / 3.0))))
    vol = np.diff(np.arange(n_shells + 1) ** 3).astype(float)
    raw = count * vol / vol.sum()
    per = np.floor(raw).astype(int)
    rem = count - per.sum()
    if rem > 0:
        per[np.argsort(raw - per)[::-1][:rem]] += 1
    pts = []
    for m, cnt in enumerate(per):
        if cnt == 0:
            continue
        r = radius * (m + 0.5) / n_shells
        pts.append(fibonacci_sphere(cnt, r, seed, salt=salt * 101 + m))
    return np.vstack(pts)


# ---------------------------------------------------------------------------
# cell radii
# ---------------------------------------------------------------------------

def _half_nn(points: np.ndarray) -> np.ndarray:
    if points.shape[0] == 1:
        return np.array([1.0])
    d, _ = cKDTree(points).query(points, k=2)
    return np.maximum(0.5 * d[:, 1], MIN_CELL_RADIUS)


# cell radii may exceed half-NN for tiling, but never by more than this
# factor: with beta = 0.5 it keeps sqrt(beta rho_i * beta rho_j) below the
# pair distance, the pairwise condition for kernel-matrix definiteness
_TILING_CAP = 1.8


def _tiled_cell_radius(points: np.ndarray, measure: float, dim: int) -> np.ndarray:
    """Half nearest-neighbor radii rescaled so the cells tile `measure`.

    dim is the intrinsic dimension of the component (2 for surfaces, 3 for
    volumes).  The common rescale preserves local density variation; each
    radius is capped at _TILING_CAP times its half-NN value so anomalously
    tight pairs cannot blow up the kernel diagonal.
    """
    rho = _half_nn(points)
    unit = np.pi if dim == 2 else 4.0 * np.pi / 3.0

    def tiled(s: float) -> float:
        return float(unit * np.sum(np.minimum(rho * s, rho * _TILING_CAP)**dim))

    if tiled(_TILING_CAP) <= measure:
        out = rho * _TILING_CAP
    else:
        lo, hi = 0.0, _TILING_CAP
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if tiled(mid) < measure:
                lo = mid
            else:
                hi = mid
        out = np.minimum(rho * 0.5 * (lo + hi), rho * _TILING_CAP)
    return np.maximum(out, MIN_CELL_RADIUS)


# ---------------------------------------------------------------------------
# discretize
# ---------------------------------------------------------------------------

def _embed_plane(xy: np.ndarray, x1: float, center2: Sequence[float] = (0.0, 0.0)) -> np.ndarray:
    out = np.empty((xy.shape[0], 3))
    out[:, 0] = x1
    out[:, 1] = xy[:, 0] + center2[0]
    out[:, 2] = xy[:, 1] + center2[1]
    return out


def discretize(domain: Domain, spec: PlateSpec, seed: int = 0) -> PointCloud:
    """Produce a deterministic point cloud honoring the plate's membership rules."""
    if domain.n != 3:
        raise DimensionMismatch("built-in discretizations are implemented for n = 3")
    shape = spec.shape
    if isinstance(shape, DiscStack):
        pts, rho = _discretize_disc_stack(domain, spec, seed)
    elif isinstance(shape, BallInterior):
        pts, rho = _discretize_ball_interior(domain, spec, seed)
    elif isinstance(shape, AnnulusOnBoundary):
        pts, rho = _discretize_annulus(domain, spec, seed)
    elif isinstance(shape, ComplementShell):
        pts, rho = _discretize_complement_shell(domain, spec, seed)
    elif isinstance(shape, Custom):
        pts = np.asarray(shape.points, dtype=float)
        if pts.shape[1] != domain.n:
            raise DimensionMismatch("custom points have the wrong dimension")
        rho = _half_nn(pts)
    else:
        raise InfeasibleSpec(f"unknown plate shape {type(shape).__name__}")

    tag = np.full(pts.shape[0], spec.which, dtype=np.int8)
    _check_membership(domain, pts, spec)
    return PointCloud(points=pts, cell_radius=rho, plate_tag=tag, seed=seed)


def _check_membership(domain: Domain, pts: np.ndarray, spec: PlateSpec) -> None:
    d = domain.boundary_distance(pts)
    if spec.which == A1:
        if not np.all(d > 0):
            raise InfeasibleSpec("A1 nodes must lie strictly inside D")
        if spec.boundary_margin > 0 and not np.all(d >= spec.boundary_margin * (1 - 1e-12)):
            raise InfeasibleSpec("A1 nodes violate the boundary margin")
    else:
        # boundary nodes land on d = 0 up to round-off of the sphere norm
        tol = 1e-9 * (1.0 + (domain.radius if domain.kind == "ball" else 0.0))
        if not np.all(d <= tol):
            raise InfeasibleSpec("A2 nodes must lie in the complement of D")


def _discretize_disc_stack(domain, spec, seed):
    if domain.kind != "halfspace":
        raise InfeasibleSpec("DiscStack requires the half-space domain")
    discs = [d for d in spec.shape.discs if d[0] >= spec.boundary_margin and d[0] > 0]
    if not discs:
        raise InfeasibleSpec("boundary margin excludes every disc of the stack")
    areas = np.array([np.pi * d[1] ** 2 for d in discs])
    counts = np.maximum(1, np.round(spec.node_count * areas / areas.sum()).astype(int))
    # nudge the largest disc so the total is exact
    counts[np.argmax(counts)] += spec.node_count - counts.sum()
    pts, rho = [], []
    for k, ((x1, r, c2), cnt) in enumerate(zip(discs, counts)):
        xy = golden_disc(cnt, r, seed, salt=k)
        p = _embed_plane(xy, x1, c2)
        pts.append(p)
        rho.append(_tiled_cell_radius(p, np.pi * r**2, dim=2))
    return np.vstack(pts), np.concatenate(rho)


def _discretize_ball_interior(domain, spec, seed):
    if domain.kind != "ball":
        raise InfeasibleSpec("BallInterior requires the ball domain")
    margin = max(spec.shape.margin, spec.boundary_margin)
    r_eff = domain.radius - margin
    if r_eff <= 0:
        raise InfeasibleSpec("margin excludes the whole ball interior")
    pts = r3_ball(spec.node_count, r_eff, seed) + np.asarray(domain.center)
    # keep nodes strictly interior even at margin 0
    d = domain.boundary_distance(pts)
    floor = max(1e-9 * domain.radius, 0.0)
    bad = d <= floor
    if np.any(bad):
        c = np.asarray(domain.center)
        pts[bad] = c + (pts[bad] - c) * (1.0 - 1e-6)
    vol = 4.0 * np.pi / 3.0 * r_eff**3
    return pts, _tiled_cell_radius(pts, vol, dim=3)


def _discretize_annulus(domain, spec, seed):
    if domain.kind != "halfspace":
        raise InfeasibleSpec("AnnulusOnBoundary is defined on the half-space boundary plane")
    sh = spec.shape
    if not (0 <= sh.inner < sh.outer):
        raise InfeasibleSpec("annulus radii must satisfy 0 <= inner < outer")
    xy = golden_disc(spec.node_count, sh.outer, seed, inner=sh.inner)
    pts = _embed_plane(xy, 0.0)
    area = np.pi * (sh.outer**2 - sh.inner**2)
    return pts, _tiled_cell_radius(pts, area, dim=2)


def _discretize_complement_shell(domain, spec, seed):
    sh = spec.shape
    n_total = spec.node_count
    nb = max(1, int(round(sh.boundary_fraction * n_total)))
    nv = n_total - nb
    pts, rho = [], []
    if domain.kind == "halfspace":
        xy = graded_disc(nb, sh.core_radius, sh.outer_radius, seed, salt=0)
        p = _embed_plane(xy, 0.0)
        pts.append(p)
        rho.append(_layer_cell_radius(p))
        if nv > 0:
            per = _split(nv, sh.n_layers)
            # for alpha = 2 swept measures live on the boundary, so the first
            # stratum sits well below it: shallow volume nodes are
            # energetically degenerate with the boundary layer and would
            # siphon swept mass off it; for alpha < 2 the complement carries
            # genuine volume density down to the boundary, so grade toward it
            first = 1.0 / 3.0 if domain.alpha == 2.0 else 0.02
            depths = sh.depth * np.geomspace(first, 1.0, sh.n_layers)
            vr = sh.volume_radius if sh.volume_radius > 0 else \
                max(2.0 * sh.core_radius, 0.05 * sh.outer_radius)
            for l, (cnt, d) in enumerate(zip(per, depths)):
                xy = graded_disc(cnt, sh.core_radius, min(vr, sh.outer_radius),
                                 seed, salt=10 + l)
                p = _embed_plane(xy, -d)
                pts.append(p)
                rho.append(_layer_cell_radius(p))
    else:
        c = np.asarray(domain.center)
        p = fibonacci_sphere(nb, domain.radius, seed, salt=0) + c
        pts.append(p)
        rho.append(_layer_cell_radius(p))
        if nv > 0:
            per = _split(nv, sh.n_layers)
            # same boundary-offset logic as the half-space strata
            first = 0.3 if domain.alpha == 2.0 else 0.02
            offsets = np.geomspace(first * domain.radius,
                                   sh.outer_radius - domain.radius,
                                   sh.n_layers)
            radii = domain.radius + offsets
        else:
            per, radii = [], []
        for l, (cnt, s) in enumerate(zip(per, radii)):
            p = fibonacci_sphere(cnt, s, seed, salt=10 + l) + c
            pts.append(p)
            rho.append(_layer_cell_radius(p))
    all_pts = np.vstack(pts)
    # layers can sit closer together than the in-layer spacing; the kernel
    # diagonal must respect the true nearest neighbor
    all_rho = np.minimum(np.concatenate(rho), _half_nn(all_pts))
    return all_pts, all_rho


def _layer_cell_radius(points: np.ndarray) -> np.ndarray:
    return _half_nn(points)


def _split(total: int, parts: int) -> list:
    base = total // parts
    out = [base] * parts
    for i in range(total - base * parts):
        out[i] += 1
    return [c for c in out if c > 0]


def plate_measure(domain: Domain, spec: PlateSpec) -> float:
    """Surface/volume measure of the built-in plate shapes (for tiling checks)."""
    sh = spec.shape
    if isinstance(sh, DiscStack):
        discs = [d for d in sh.discs if d[0] >= spec.boundary_margin and d[0] > 0]
        return float(sum(np.pi * d[1] ** 2 for d in discs))
    if isinstance(sh, BallInterior):
        r_eff = domain.radius - max(sh.margin, spec.boundary_margin)
        return float(4.0 * np.pi / 3.0 * r_eff**3)
    if isinstance(sh, AnnulusOnBoundary):
        return float(np.pi * (sh.outer**2 - sh.inner**2))
    raise InfeasibleSpec(f"no closed-form measure for {type(sh).__name__}")
