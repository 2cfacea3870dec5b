"""Public per-theory elimination entry points.

Each wrapper eliminates one existential variable from a quantifier-free
formula and packages the result with a witness recipe: a callable mapping
parameter assignments to a verified model element.  The wrappers validate
that the requested signature fits the engine before dispatching.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from ..normal import NormalTerm, expand
from ..terms import (
    Atomic, Const, DOAG, Formula, InZ, Lt, PRESBURGER, Signature, T0_MIXED,
    T1_COSET, T_FULL, and_all, free_vars,
)
from .core import EngineError, eliminate_exists, simplify


@dataclass(frozen=True)
class LinearConstraint:
    """One constraint ``lhs rel 0`` with rel drawn from ``<``, ``=``, ``InZ``."""
    lhs: NormalTerm
    relation: str


@dataclass(frozen=True)
class EliminationResult:
    formula: Formula
    witness_recipe: Optional[Callable]


def _constraint_formula(constraints) -> Formula:
    parts = []
    for c in constraints:
        t = expand(c.lhs)
        if c.relation == "<":
            parts.append(Atomic(Lt(t, Const(0))))
        elif c.relation == "=":
            from ..terms import Eq
            parts.append(Atomic(Eq(t, Const(0))))
        elif c.relation == "InZ":
            parts.append(Atomic(InZ(t)))
        else:
            raise EngineError(f"unknown relation {c.relation!r}")
    return and_all(parts)


def _run(var: str, f: Formula, sig: Signature) -> EliminationResult:
    out = simplify(eliminate_exists(var, f, sig))
    if var in free_vars(out):
        raise EngineError(f"{var} survived elimination")

    def recipe(params, model=None):
        from ..witness import find_witness
        return find_witness(var, f, params, sig, model)

    return EliminationResult(out, recipe)


def fm_eliminate(var: str, conj, sig: Signature = DOAG) -> EliminationResult:
    """Dense-order elimination; ``conj`` is a list of
    :class:`LinearConstraint` or a quantifier-free formula."""
    f = conj if isinstance(conj, Formula) else _constraint_formula(conj)
    return _run(var, f, sig)


def cooper_eliminate(var: str, f: Formula,
                     sig: Signature = PRESBURGER) -> EliminationResult:
    if not sig.has_z or sig.has_floor or sig.has_q:
        raise EngineError("integer elimination needs the pure Z signature")
    return _run(var, f, sig)


def mixed_eliminate(var: str, f: Formula,
                    sig: Signature = T0_MIXED) -> EliminationResult:
    if not sig.has_floor:
        raise EngineError("mixed elimination needs the floor signature")
    return _run(var, f, sig)


def coset_eliminate(var: str, f: Formula,
                    sig: Signature = T1_COSET) -> EliminationResult:
    if not sig.has_q or sig.has_floor:
        raise EngineError("coset elimination needs the pure Q signature")
    return _run(var, f, sig)


def full_T_eliminate(var: str, f: Formula,
                     sig: Signature = T_FULL) -> EliminationResult:
    if not (sig.has_q and sig.has_floor):
        raise EngineError("full elimination needs Z, Q and the floor")
    return _run(var, f, sig)


def hamel_eliminate(var: str, f: Formula, sig: Signature) -> EliminationResult:
    if not sig.n_proj:
        raise EngineError("projection elimination needs a projection signature")
    return _run(var, f, sig)
