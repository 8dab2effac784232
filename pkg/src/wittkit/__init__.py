"""Exact computations with generalized Witt algebras and their
intermediate-series modules."""

from .foundations import GroupLattice, Signature, Window, lattice_contains, multiindex_compare, pairing
from .algebra import CommutativeAlgebra, AlgebraElement
from .witt import WittAlgebra, WittElement, generate_random_element
from .modules import Module, ModuleSpec, ModuleVector, QuotientModule, module_axiom_residual, weight_stage

__all__ = [
    "AlgebraElement",
    "CommutativeAlgebra",
    "GroupLattice",
    "Module",
    "ModuleSpec",
    "ModuleVector",
    "QuotientModule",
    "Signature",
    "WittAlgebra",
    "WittElement",
    "Window",
    "generate_random_element",
    "lattice_contains",
    "module_axiom_residual",
    "multiindex_compare",
    "pairing",
    "weight_stage",
]

__version__ = "0.1.0"
