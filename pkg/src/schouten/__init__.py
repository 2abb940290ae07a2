"""Exact Schouten-bracket calculus and Poisson/Jacobi structure verification.

Every computation is exact (rational-function coefficients over Q), so each
geometric identity is decided, not approximated.
"""

__version__ = "0.1.0"

from .calculus import (
    curl,
    divergence,
    exterior_derivative,
    lie_derivative,
    schouten_bracket,
)
from .fields import (
    Chart,
    DifferentialForm,
    MultiVectorField,
    differential,
    interior_product,
    pairing,
    wedge,
)
from .report import CheckReport
from .scalars import MultiPoly, PoleError, RationalFn
from .structures import (
    ExtendedStructure,
    JacobiPair,
    automorphism_hierarchy,
    extended_jacobi_check,
    hamiltonian_field,
    invariance_conditions,
    is_poisson,
    jacobi_structure_check,
    local_bracket,
    modular_field,
    reduce_to_Q,
    suspension,
    symmetry_transfer,
)

__all__ = [
    "Chart",
    "CheckReport",
    "DifferentialForm",
    "ExtendedStructure",
    "JacobiPair",
    "MultiPoly",
    "MultiVectorField",
    "PoleError",
    "RationalFn",
    "automorphism_hierarchy",
    "curl",
    "differential",
    "divergence",
    "extended_jacobi_check",
    "exterior_derivative",
    "hamiltonian_field",
    "interior_product",
    "invariance_conditions",
    "is_poisson",
    "jacobi_structure_check",
    "lie_derivative",
    "local_bracket",
    "modular_field",
    "pairing",
    "reduce_to_Q",
    "schouten_bracket",
    "suspension",
    "symmetry_transfer",
    "wedge",
]
