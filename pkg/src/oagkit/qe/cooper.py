"""Integer variable elimination in the style of Cooper.

Two modes share one skeleton:

* ``integer_mode=True``: the pure integer signature.  Order literals are
  first scaled to integer coefficients, then the eliminated variable's
  coefficient is normalized to one by the usual change of variable
  ``v -> v/lam`` guarded with a divisibility literal ``Z(v/lam)``.  Bound
  terms are then integer-valued and candidate witnesses are ``b + j``.
* ``integer_mode=False``: the variable is an integer living inside a mixed
  ordered group (it carries a positive ``Z(v)`` literal).  Bounds may be
  real-valued terms, so candidates are ``floor(b) + j``; spurious candidates
  eliminate themselves when substituted back into the bound literal.

In both modes ``j`` ranges over ``0..delta`` with ``delta`` the least common
period of the divisibility literals, and a separate low-end case covers
conjunctions with no effective lower bound.
"""

from __future__ import annotations

import math
from fractions import Fraction

from ..normal import (
    NormalTerm, expand, normalize_term, nt_add, nt_const, nt_scale,
    nt_subst_linear, nt_var, nt_without_var,
)
from ..terms import Floor
from .core import Conj, EngineError


def _denom_lcm(nt) -> int:
    d = nt.const.denominator
    for _, c in nt.linear:
        d = math.lcm(d, c.denominator)
    for (_, _), c in nt.proj_parts:
        d = math.lcm(d, c.denominator)
    for c, _ in nt.floor_parts:
        d = math.lcm(d, c.denominator)
    return d


def _conj_from(sig, lits):
    out = Conj(sig)
    for lit in lits:
        if not out.add(lit):
            return None
    return out


def _subst_all(lits, var, repl):
    out = []
    for lit in lits:
        nt = lit[1] if lit[0] == "ord" else lit[2]
        if nt.mentions(var):
            nt = nt_subst_linear(nt, var, repl)
        if lit[0] == "ord":
            out.append(("ord", nt, lit[2]))
        else:
            out.append(("mem", lit[1], nt, lit[3]))
    return out


def _normalize_unit(lits, var):
    """Pure-integer preprocessing: all order literals mentioning ``var`` get
    coefficient +-1 for it; returns the rewritten literal list."""
    staged = []
    coeffs = []
    for lit in lits:
        if lit[0] == "ord" and lit[1].coeff_of(var) != 0:
            nt = nt_scale(_denom_lcm(lit[1]), lit[1])
            coeffs.append(abs(nt.coeff_of(var)))
            staged.append(("ord", nt, lit[2]))
        else:
            staged.append(lit)
    lam = 1
    for a in coeffs:
        lam = math.lcm(lam, a.numerator)
    out = []
    for lit in staged:
        if lit[0] == "ord":
            a = lit[1].coeff_of(var)
            nt = lit[1]
            if a != 0:
                nt = nt_scale(Fraction(lam) / abs(a), nt)
                nt = nt_subst_linear(nt, var, nt_scale(Fraction(1, lam), nt_var(var)))
            out.append(("ord", nt, lit[2]))
        else:
            nt = lit[2]
            if nt.mentions(var):
                nt = nt_subst_linear(nt, var, nt_scale(Fraction(1, lam), nt_var(var)))
            out.append(("mem", lit[1], nt, lit[3]))
    if lam > 1:
        out.append(("mem", "Z", nt_scale(Fraction(1, lam), nt_var(var)), True))
    return out


def _floor_bases(b, int_vars):
    """Integer-valued candidate bases standing for ``floor(b)``.

    ``b`` may mix integer-valued pieces (floor summands, integer unknowns)
    with real parameters.  Writing the integer-valued part as ``G/D`` and the
    rest as ``h``, ``floor(b) = (G-i)/D + floor(h + i/D)`` for the residue
    ``i = G mod D``; wrong residues produce non-integer candidates that the
    ``Z`` guard on the candidate kills later.  Crucially the residual floor
    never wraps an integer unknown, so serial elimination cannot stall.
    """
    if b.proj_parts:
        raise EngineError("projection at the integer step")
    g_lin = tuple((v, c) for v, c in b.linear if v in int_vars)
    h_lin = tuple((v, c) for v, c in b.linear if v not in int_vars)
    g = NormalTerm(b.floor_parts, (), g_lin, Fraction(0))
    h = NormalTerm((), (), h_lin, b.const)
    d = 1
    for c, _ in b.floor_parts:
        d = math.lcm(d, c.denominator)
    for _, c in g_lin:
        d = math.lcm(d, c.denominator)
    bases = []
    for i in range(d):
        shifted = nt_add(h, nt_const(Fraction(i, d)))
        if shifted.is_constant:
            fl = nt_const(shifted.const.__floor__())
        else:
            fl = normalize_term(Floor(expand(shifted)))
        bases.append(nt_add(nt_add(g, nt_const(Fraction(-i, d))), fl))
    return bases


def _numeric_fast(lits, var, sources, offsets, has_lower, delta,
                  integer_mode, sig):
    """Ground candidate sweep when every literal is constant except for the
    variable itself: the conjunct then holds of a candidate iff plain
    rational arithmetic says so, and the eliminated form is Top or Bot.
    Returns None when a literal or candidate base is not ground."""
    ords, mems = [], []
    for lit in lits:
        nt = lit[1] if lit[0] == "ord" else lit[2]
        if nt.floor_parts or nt.proj_parts \
                or any(v != var for v, _ in nt.linear):
            return None
        if lit[0] == "ord":
            ords.append((nt.coeff_of(var), nt.const, lit[2]))
        elif lit[1] == "Q":
            if not lit[3]:  # a rational constant is always in Q
                return []
        else:
            mems.append((nt.coeff_of(var), nt.const, lit[3]))
    bases = []
    for b in sources:
        if not b.is_constant:
            return None
        # outside the pure integer mode the variable is an integer unknown
        # against real-valued bounds, so candidates start at the floor
        bases.append(b.const if integer_mode else Fraction(b.const.__floor__()))
    if not has_lower:
        bases.extend(Fraction(j) for j in range(1, delta + 1))

    def sat(x, skip_ord):
        for a, c, rel in ords:
            if skip_ord and a != 0:
                continue
            v = a * x + c
            if not (v < 0 if rel == "lt" else v <= 0 if rel == "le" else v == 0):
                return False
        for a, c, pos in mems:
            if ((a * x + c).denominator == 1) != pos:
                return False
        return True

    n_low = len(sources)
    for idx, b in enumerate(bases):
        low = idx < n_low
        for j in (offsets if low else (0,)):
            if sat(b + j, skip_ord=not low):
                return [Conj(sig)]
    return []


def eliminate(conj: Conj, var: str, integer_mode: bool) -> list:
    lits = conj.all_lits()
    for lit in lits:
        nt = lit[1] if lit[0] == "ord" else lit[2]
        if nt.floor_mentions(var):
            raise EngineError(f"{var} under a floor at the integer step")
    if integer_mode:
        lits = _normalize_unit(lits, var)

    delta = 1
    for lit in lits:
        if lit[0] == "mem" and lit[1] == "Z":
            a = lit[2].coeff_of(var)
            if a != 0:
                delta = math.lcm(delta, a.denominator)

    lowers, eqs, has_lower = [], [], False
    for lit in lits:
        if lit[0] != "ord":
            continue
        nt, rel = lit[1], lit[2]
        a = nt.coeff_of(var)
        if a == 0:
            continue
        bound = nt_scale(Fraction(-1) / a, nt_without_var(nt, var))
        if rel == "eq":
            eqs.append(bound)
            has_lower = True
        elif a < 0:
            lowers.append(bound)
            has_lower = True

    out = []
    sig = conj.sig
    if not integer_mode:
        int_vars = set()
        for lit in lits:
            if lit[0] == "mem" and lit[1] == "Z" and lit[3] \
                    and not lit[2].floor_parts and not lit[2].proj_parts \
                    and len(lit[2].linear) == 1 and lit[2].const == 0 \
                    and abs(lit[2].linear[0][1]) == 1:
                int_vars.add(lit[2].linear[0][0])
    if eqs:
        # an equality pins the variable; lower-bound candidates and period
        # offsets are redundant
        sources, offsets = eqs, [0]
    else:
        sources, offsets = lowers, range(delta + 1)
    fast = _numeric_fast(lits, var, sources, offsets, has_lower, delta,
                         integer_mode, sig)
    if fast is not None:
        return fast
    cands = {}
    for b in dict.fromkeys(sources):
        bases = [b] if integer_mode else _floor_bases(b, int_vars)
        for base in bases:
            for j in offsets:
                cands.setdefault(nt_add(base, nt_const(j)))

    # literals free of the variable survive every substitution, so they are
    # folded into one base conjunction and copied per candidate; order
    # literals go first for the early interval contradiction
    free_lits, ord_var, mem_var = [], [], []
    for lit in lits:
        nt = lit[1] if lit[0] == "ord" else lit[2]
        if not nt.mentions(var):
            free_lits.append(lit)
        elif lit[0] == "ord":
            ord_var.append(lit)
        else:
            mem_var.append(lit)
    base_conj = _conj_from(sig, free_lits)
    if base_conj is None:
        return []

    for cand in cands:
        c = base_conj.copy()
        good = all(c.add_ord(nt_subst_linear(nt, var, cand), rel)
                   for _, nt, rel in ord_var)
        good = good and all(
            c.add_mem(p, nt_subst_linear(nt, var, cand), pos)
            for _, p, nt, pos in mem_var)
        if good and (integer_mode or c.add_mem("Z", cand, True)) and c.ok:
            if not c.ord and not c.mem:
                return [c]  # a candidate satisfies everything outright
            out.append(c)
    if not has_lower:
        # no effective lower bound: arbitrarily small witnesses exist, only
        # the residue class matters; upper-bound literals drop away
        keep_mem = [l for l in mem_var]
        for j in range(1, delta + 1):
            c = base_conj.copy()
            cj = nt_const(j)
            if all(c.add_mem(p, nt_subst_linear(nt, var, cj), pos)
                   for _, p, nt, pos in keep_mem) and c.ok:
                if not c.ord and not c.mem:
                    return [c]
                out.append(c)
    return out
