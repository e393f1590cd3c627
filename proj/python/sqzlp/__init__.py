"""Squeeze-mapping LP solver.

Instances are ``max c'x  s.t.  Ax <= b, x >= 0`` with ``A`` of shape (m, n).
Index sets and squeeze indices are 1-based over z = (u, v, x, y).
"""

from ._sqzlp import (
    ContractError,
    DegenerateInput,
    NumericalError,
    base_projection,
    enumerate_optimal,
    generate_instance,
    kkt_residual,
    read_instance,
    solve,
    unidim_update,
    verify_identities,
)

__all__ = [
    "ContractError",
    "DegenerateInput",
    "NumericalError",
    "base_projection",
    "enumerate_optimal",
    "generate_instance",
    "kkt_residual",
    "read_instance",
    "solve",
    "unidim_update",
    "verify_identities",
]
