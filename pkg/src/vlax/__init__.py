"""Exact lambda-bracket computations for affine vertex Lie algebras twisted by
classical R-matrices, and the integrable hierarchies they produce."""

from .diffpoly import DiffPoly, DiffRing, JetVar, ParseError
from .lambdapoly import BracketTable, LambdaPoly, master_bracket
from .liealg import LieAlgebraSpec, build_algebra, decomposition, invariant_polynomials
from .vla import (AffineVLA, RMatrix, affine_vla, builtin_rmatrix, factorization_data,
                  mybe_defect, twisted_table)
from .pva import PoissonMatrix, axioms_report, center_find, poisson_matrix
from .aks import (FlowSystem, Hamiltonian, flow, functional_bracket, hamiltonian_family,
                  involution_matrix, is_total_derivative)

__all__ = [
    "DiffPoly", "DiffRing", "JetVar", "ParseError",
    "BracketTable", "LambdaPoly", "master_bracket",
    "LieAlgebraSpec", "build_algebra", "decomposition", "invariant_polynomials",
    "AffineVLA", "RMatrix", "affine_vla", "builtin_rmatrix", "factorization_data",
    "mybe_defect", "twisted_table",
    "PoissonMatrix", "axioms_report", "center_find", "poisson_matrix",
    "FlowSystem", "Hamiltonian", "flow", "functional_bracket", "hamiltonian_family",
    "involution_matrix", "is_total_derivative",
]
