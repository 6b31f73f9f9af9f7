"""Numerical toolkit for the torus reduction of lines in CP^n and the
Lagrangian cycles lifted from its real points."""
from . import _backend
from .cycles import (
    CycleDescriptor,
    LagrangianReport,
    TypeCensus,
    count_types,
    lift_cycle_sample,
    sample_base_cycle,
    verify_lagrangian,
)
from .errors import (
    DegenerateFrame,
    GeometryError,
    IllConditioned,
    NoConvergence,
    NotDecomposable,
    NotInChart,
    RankDeficient,
    StepTooSmall,
)
from .moment import MomentVector, moment_vector, moments_from_plucker, torus_flow, torus_orbit
from .plucker import PluckerLine, PluckerTangent, line_from_plucker, plucker_from_line, symplectic_form
from .projective import HomogeneousVector, ProjectiveSubspace, join, meet, project_from_center
from .reduction import (
    ReducedPoint,
    delzant_polytope,
    moment_image_sample,
    project_to_base,
    solve_fiber_point,
)

BACKEND = _backend.NAME

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CycleDescriptor",
    "DegenerateFrame",
    "GeometryError",
    "HomogeneousVector",
    "IllConditioned",
    "LagrangianReport",
    "MomentVector",
    "NoConvergence",
    "NotDecomposable",
    "NotInChart",
    "PluckerLine",
    "PluckerTangent",
    "ProjectiveSubspace",
    "RankDeficient",
    "ReducedPoint",
    "StepTooSmall",
    "TypeCensus",
    "count_types",
    "delzant_polytope",
    "join",
    "lift_cycle_sample",
    "line_from_plucker",
    "meet",
    "moment_image_sample",
    "moment_vector",
    "moments_from_plucker",
    "plucker_from_line",
    "project_from_center",
    "project_to_base",
    "sample_base_cycle",
    "solve_fiber_point",
    "symplectic_form",
    "torus_flow",
    "torus_orbit",
    "verify_lagrangian",
]
