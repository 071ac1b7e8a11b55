"""CVFE and MINI finite element solvers for 2D incompressible Stokes flow."""

from ._core import (
    CaseSolution,
    ConfigurationError,
    Discretization,
    DistortionFailure,
    InvalidMesh,
    ManufacturedCase,
    Mesh,
    Scheme,
    SolverError,
    basis,
    bercovier_engelman,
    case_from_name,
    conservation_audit,
    distort,
    donea_huerta,
    error_norms,
    generate_structured,
    mesh_stats,
    read_msh,
    run_convergence,
    scheme_from_string,
    shear_flow,
    solve_case,
    write_vtu,
)

__all__ = [
    "CaseSolution",
    "ConfigurationError",
    "Discretization",
    "DistortionFailure",
    "InvalidMesh",
    "ManufacturedCase",
    "Mesh",
    "Scheme",
    "SolverError",
    "basis",
    "bercovier_engelman",
    "case_from_name",
    "conservation_audit",
    "distort",
    "donea_huerta",
    "error_norms",
    "generate_structured",
    "mesh_stats",
    "read_msh",
    "run_convergence",
    "scheme_from_string",
    "shear_flow",
    "solve_case",
    "write_vtu",
]
