"""Quantifier elimination engines."""

from .core import (
    Conj, EngineError, UndecidedAtomError, decide, eliminate_exists, qe,
    simplify, to_dnf,
)
from .engines import (
    EliminationResult, LinearConstraint, cooper_eliminate, coset_eliminate,
    fm_eliminate, full_T_eliminate, hamel_eliminate, mixed_eliminate,
)

__all__ = [
    "Conj", "EngineError", "UndecidedAtomError", "decide",
    "eliminate_exists", "qe", "simplify", "to_dnf",
    "EliminationResult", "LinearConstraint", "cooper_eliminate",
    "coset_eliminate", "fm_eliminate", "full_T_eliminate", "hamel_eliminate",
    "mixed_eliminate",
]
