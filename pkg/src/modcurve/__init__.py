"""Genus invariants of modular curves from closed forms, checked by brute force."""

from .families import FAMILIES, FamilyError, NonsplitAlgebra, SubgroupSpec, find_nonsplit_algebra
from .formulas import (InconsistentInvariants, InvariantSet, genus_from_invariants,
                       invariants_formula)
from .matgrp import CapExceeded, Mat2, invariants_bruteforce

__all__ = [
    "FAMILIES", "CapExceeded", "FamilyError", "InconsistentInvariants", "InvariantSet",
    "Mat2", "NonsplitAlgebra", "SubgroupSpec", "find_nonsplit_algebra",
    "genus_from_invariants", "invariants_bruteforce", "invariants_formula",
]
