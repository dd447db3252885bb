"""Constrained minimum-energy problems for Riesz and Green kernels on
generalized condensers: discretization, QP solvers, and structural checks."""

from .errors import (CloudMismatch, CondenserError, ConfigError,
                     DimensionMismatch, Infeasible, InfeasibleSpec,
                     InvalidSigma, OutsideDomain, SingularPair,
                     SolverDiverged, UnsupportedDomain, WrongField)
from .geometry import (A1, A2, AnnulusOnBoundary, BallInterior,
                       ComplementShell, Custom, DiscStack, Domain, PlateSpec,
                       PointCloud, discretize, merge_clouds, subcloud)
from .kernels import (DEFAULT_BETA, GreenAlpha, KernelMatrix, RieszAlpha,
                      assemble, cross_matrix)
from .measures import (ConstraintMeasure, DiscreteMeasure, ExternalField,
                       SignedDiscreteMeasure, energy, potential,
                       weighted_energy, weighted_potential)
from .balayage import (balayage, dirac_balayage, equilibrium_measure,
                       green_energy_via_identity)
from .solver import (Problem, Solution, solve_green_constrained,
                     solve_riesz_direct, solve_riesz_via_bridge,
                     solve_signed_constraint, solve_unconstrained_weighted)
from .presets import ball_problem, halfspace_problem
from .verify import (disc_capacity, duality_check, frostman_diagnostics,
                     support_diagnostics, zone_diagnostics)

__all__ = [name for name in dir() if not name.startswith("_")]
