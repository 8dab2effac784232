"""Structural verdicts on finite windows: submodules, isomorphisms, the
level-one constraint systems and the extension probes."""

from ..modules import quotient_weight_multiplicity
from .constraints import ConstraintSetup, check_family, constraint_oracle, determinant_pair
from .isomorphism import check_isomorphism, predicted_isomorphic
from .nonexistence import compare_with_expected, nonexistence_probe
from .simplicity import predicted_simple, predicted_structure, simplicity_scan

__all__ = [
    "ConstraintSetup",
    "check_family",
    "check_isomorphism",
    "compare_with_expected",
    "constraint_oracle",
    "determinant_pair",
    "nonexistence_probe",
    "predicted_isomorphic",
    "predicted_simple",
    "predicted_structure",
    "quotient_weight_multiplicity",
    "simplicity_scan",
]
