"""Capillary surfaces in polyhedral containers via a generalized Minkowski problem.

Given contact-angle data ``(p_j, theta_j, a_j)`` and a mean curvature ``H``
that satisfy the balancing condition, :func:`run` builds the convex body
whose surface-area measure is Lebesgue measure on the sphere minus the caps
plus point masses at the face normals, and extracts from it the capillary
surface (an outer parallel surface at distance ``1/(2H)``), the container
planes and the wetted planar disks.
"""
from .config import CapillaryConfig, Face, load_config, save_config
from .demos import DEMOS, demo_config
from .diagnostics import (DiagnosticsReport, build_report, hausdorff, quadrature_moment_error,
                          verify_convexity, verify_mean_curvature, verify_symmetry,
                          verify_uniqueness)
from .errors import (CapillaryError, ClosureError, ConfigError, ConvergenceError,
                     DegeneracyError, DomainError, GeometryError, PreconditionError,
                     PredicateError, RepairError, StageError)
from .measure import SurfaceAreaMeasure, build_measure, build_sequence_measure, close_measure
from .mesh import SphericalMesh, icosphere, triangulate_delta
from .minkowski import SolveInfo, SolverOptions, SupportVector, solve_minkowski
from .pipeline import (CapillaryOutput, ContainerPlane, TriangleMesh, WettedDisk,
                       area_identity_check, contact_angles, export_obj, reflect_double, run)
from .polytope import Polytope, mixed_area_matrix, polytope_from_support, volume_gradient
from .sphere import annulus_moment, cap_area, cap_moment, check_balancing, repair_areas

__version__ = "0.1.0"

__all__ = [
    "CapillaryConfig", "Face", "load_config", "save_config", "DEMOS", "demo_config",
    "DiagnosticsReport", "build_report", "hausdorff", "quadrature_moment_error",
    "verify_convexity", "verify_mean_curvature", "verify_symmetry", "verify_uniqueness",
    "CapillaryError", "ClosureError", "ConfigError", "ConvergenceError", "DegeneracyError",
    "DomainError", "GeometryError", "PreconditionError", "PredicateError", "RepairError",
    "StageError", "SurfaceAreaMeasure", "build_measure", "build_sequence_measure",
    "close_measure", "SphericalMesh", "icosphere", "triangulate_delta", "SolveInfo",
    "SolverOptions", "SupportVector", "solve_minkowski", "CapillaryOutput", "ContainerPlane",
    "TriangleMesh", "WettedDisk", "area_identity_check", "contact_angles", "export_obj",
    "reflect_double", "run", "Polytope", "mixed_area_matrix", "polytope_from_support",
    "volume_gradient", "annulus_moment", "cap_area", "cap_moment", "check_balancing",
    "repair_areas",
]
