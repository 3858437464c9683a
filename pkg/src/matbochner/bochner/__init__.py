"""Eigenvalue maps, the ansatz solver and structure checks for D(W)."""
from .ansatz import OperatorSpace, ansatz_solve, ansatz_unknowns, constraint_rows
from .eigen import (AdmissibilityError, EigenSeq, Membership, dw_membership, eigenvalue_map,
                    eigenvalue_poly)
from .moments import monic_ops_from_moments, monic_sequence
from .structure import (ElementChecks, FullnessVerdict, PolyInD, centralizer_checks, fullness_probe,
                        poly_in_d, representation_check)

__all__ = ["OperatorSpace", "ansatz_solve", "ansatz_unknowns", "constraint_rows",
           "AdmissibilityError", "EigenSeq", "Membership", "dw_membership", "eigenvalue_map",
           "eigenvalue_poly", "monic_ops_from_moments", "monic_sequence", "ElementChecks",
           "FullnessVerdict", "PolyInD", "centralizer_checks", "fullness_probe", "poly_in_d",
           "representation_check"]
