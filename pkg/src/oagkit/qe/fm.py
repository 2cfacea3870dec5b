"""Variable elimination over a dense divisible order (Fourier-Motzkin).

Sound whenever the eliminated variable ranges over a subset that is dense
in the ambient order and the variable occurs only in order literals.  An
equality pins the variable and turns elimination into substitution.
"""

from __future__ import annotations

from fractions import Fraction

from ..normal import nt_scale, nt_sub, nt_without_var
from .core import Conj, EngineError


def split_bounds(conj: Conj, var: str):
    """Order literals sorted by their role for ``var``.

    Returns (lowers, uppers, eqs, rest) where bounds are (bound_nt, strict)
    with the meaning ``bound < var`` / ``var < bound`` (weak when strict is
    False) and eqs are pinned values.
    """
    lowers, uppers, eqs, rest = [], [], [], []
    for nt, rel in conj.ord_lits():
        if nt.floor_mentions(var):
            raise EngineError(f"{var} under a floor in an order-only step")
        a = nt.coeff_of(var)
        if a == 0:
            rest.append((nt, rel))
            continue
        bound = nt_scale(Fraction(-1) / a, nt_without_var(nt, var))
        if rel == "eq":
            eqs.append(bound)
        elif a > 0:
            uppers.append((bound, rel == "lt"))
        else:
            lowers.append((bound, rel == "lt"))
    return lowers, uppers, eqs, rest


def eliminate(conj: Conj, var: str) -> list:
    if any(nt.mentions(var) for _, nt, _ in conj.mem_lits()):
        return _eliminate_with_mem(conj, var)
    return _eliminate_order(conj, var)


def _eliminate_with_mem(conj: Conj, var: str) -> list:
    # membership literals on the variable belong to richer engines; the only
    # legitimate route here is a pinning equality
    lowers, uppers, eqs, _ = split_bounds(conj, var)
    if not eqs:
        raise EngineError(f"membership literal on {var} in a dense-order step")
    out = conj.subst(var, eqs[0])
    return [out] if out is not None and out.ok else []


def _eliminate_order(conj: Conj, var: str) -> list:
    lowers, uppers, eqs, _ = split_bounds(conj, var)
    if eqs:
        out = conj.subst(var, eqs[0])
        return [out] if out is not None and out.ok else []
    out = Conj(conj.sig)
    for nt, rel in conj.ord_lits():
        if nt.coeff_of(var) == 0:
            if not out.add_ord(nt, rel):
                return []
    for pred, nt, pos in conj.mem_lits():
        if not out.add_mem(pred, nt, pos):
            return []
    for lo, lo_strict in lowers:
        for hi, hi_strict in uppers:
            rel = "lt" if (lo_strict or hi_strict) else "le"
            if not out.add_ord(nt_sub(lo, hi), rel):
                return []
    return [out]
