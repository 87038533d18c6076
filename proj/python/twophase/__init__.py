"""Two-phase flow in porous media: TPFA discretization, AMG-based preconditioners, Newton-GMRES."""

from ._core import (
    METHODS,
    ParseError,
    Scenario,
    SolverError,
    ValidationError,
    amg_solve,
    capture_jacobian,
    harmonic_face_permeability,
    jacobian,
    load_scenario,
    parse_scenario,
    residual,
    run,
    spectrum,
)

__all__ = [
    "METHODS",
    "ParseError",
    "Scenario",
    "SolverError",
    "ValidationError",
    "amg_solve",
    "capture_jacobian",
    "harmonic_face_permeability",
    "jacobian",
    "load_scenario",
    "parse_scenario",
    "residual",
    "run",
    "spectrum",
    "to_scipy",
]


def to_scipy(csr):
    """Convert an (indptr, indices, data, shape) tuple to a scipy.sparse.csr_matrix."""
    from scipy.sparse import csr_matrix

    indptr, indices, data, shape = csr
    return csr_matrix((data, indices, indptr), shape=shape)
