"""Riemannian optimization on the generalized quaternionic Stiefel manifold.

Quaternion matrices are float64 numpy arrays of shape (4, rows, cols) holding
the w, x, y, z component planes.
"""

from ._qstiefel import (
    ContractError,
    ConvergenceError,
    EigProblem,
    Error,
    Manifold,
    OracleError,
    ParseError,
    RankError,
    ShapeError,
    adjoint,
    complex_adjoint,
    eigh,
    generate_problem,
    her,
    load_problem,
    load_qmat,
    matmul,
    qf,
    qr,
    re_trace_inner,
    save_qmat,
    skew,
    solve,
    solve_sylvester,
    sqrt_pd,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
