"""Elimination of a real variable in the signatures with integer parts.

The variable is split as ``x = k + u`` with ``k`` an integer unknown and
``u`` ranging over ``[0, 1)``.  Floors then unfold finitely:

* a floor argument ``c*k + e*u + d`` first forces ``c`` to be an integer,
  by refining ``k`` through residue classes of its denominator;
* with ``c`` integral, ``floor(c*k + e*u + d) = c*k + floor(d) + i`` where
  ``i = floor(e*u + frac(d))`` ranges over a short window of integers, so
  the floor becomes a case split with interval guards and no nesting;
* ``Z``- and ``Q``-literals absorb the ``c*k`` summand the same way, and a
  ``Z``-literal still involving ``u`` pins ``e*u + frac(d)`` to one of the
  finitely many integers in its window.

After the unfolding every literal is linear in ``u`` and ``k``; ``u`` falls
to the dense-order step (with the coset refinement when the signature has
``Q``) and ``k`` to a single floor-aware integer step.  Nothing cascades:
the fresh unknowns never appear under a floor again.
"""

from __future__ import annotations

import math
from fractions import Fraction

from ..normal import (
    NormalTerm, expand, normalize_term, nt_add, nt_const, nt_scale, nt_sub,
    nt_var,
)
from ..terms import (
    Add, Const, Floor, Proj, Scale, Signature, Term, Var, fresh_name,
    subst_term, term_vars,
)
from . import cooper, coset, fm
from .core import Conj, prune

_ZERO = Fraction(0)


def _replace_in_term(t: Term, target: Term, repl: Term) -> Term:
    if t == target:
        return repl
    if isinstance(t, Add):
        return Add(_replace_in_term(t.left, target, repl),
                   _replace_in_term(t.right, target, repl))
    if isinstance(t, Scale):
        return Scale(t.coeff, _replace_in_term(t.arg, target, repl))
    if isinstance(t, Floor):
        return Floor(_replace_in_term(t.arg, target, repl))
    if isinstance(t, Proj):
        return Proj(t.index, _replace_in_term(t.arg, target, repl))
    return t


def _floor_args_with(t: Term, names: set, acc: list):
    if isinstance(t, Floor):
        if term_vars(t.arg) & names:
            acc.append(t.arg)
        _floor_args_with(t.arg, names, acc)
    elif isinstance(t, Add):
        _floor_args_with(t.left, names, acc)
        _floor_args_with(t.right, names, acc)
    elif isinstance(t, (Scale, Proj)):
        _floor_args_with(t.arg, names, acc)


def _lit_nt(lit) -> NormalTerm:
    return lit[1] if lit[0] == "ord" else lit[2]


def _with_nt(lit, nt):
    if lit[0] == "ord":
        return ("ord", nt, lit[2])
    return ("mem", lit[1], nt, lit[3])


def _touches(t: Term, target: Term) -> bool:
    if isinstance(t, Floor) and t.arg == target:
        return True
    if isinstance(t, Add):
        return _touches(t.left, target) or _touches(t.right, target)
    if isinstance(t, (Scale, Proj, Floor)):
        return _touches(t.arg, target)
    return False


def _rewrite_lits(lits, target: Term, repl: Term):
    out = []
    for lit in lits:
        nt = _lit_nt(lit)
        if any(a == target or _touches(a, target) for _, a in nt.floor_parts):
            nt = normalize_term(
                _replace_in_term(expand(nt), Floor(target), repl))
        out.append(_with_nt(lit, nt))
    return out


def _subst_deep(lits, name: str, repl: Term):
    out = []
    for lit in lits:
        nt = _lit_nt(lit)
        if nt.mentions(name):
            nt = normalize_term(subst_term(expand(nt), name, repl))
        out.append(_with_nt(lit, nt))
    return out


def _floor_obstruction(lits, names: set):
    """An innermost floor argument mentioning one of the unknowns."""
    cands = []
    for lit in lits:
        for _, arg in _lit_nt(lit).floor_parts:
            if term_vars(arg) & names:
                cands.append(arg)
            _floor_args_with(arg, names, cands)
    for a in cands:
        inner = []
        _floor_args_with(a, names, inner)
        if not inner:
            return a
    return None


def _window(e: Fraction):
    """Integers that ``e*u + frac`` can reach for u in [0,1), frac in [0,1).

    The sum ranges over [min(0,e), max(0,e) + 1) with the endpoints only
    approached, which pins the extreme floor values exactly."""
    lo = min(0, math.floor(e))
    if e > 0:
        hi = int(e) if e.denominator == 1 else math.floor(e) + 1
    else:
        hi = 0
    return range(lo, hi + 1)


def _frac_parts(d: NormalTerm):
    """(floor(d), d - floor(d)) as normal terms, plus the [0,1) tautology
    literals for the fractional part (they let the guards prune)."""
    if d.is_constant:
        fl = nt_const(d.const.__floor__())
        return fl, nt_sub(d, fl), []
    fl = normalize_term(Floor(expand(d)))
    frac = nt_sub(d, fl)
    taut = [("ord", nt_scale(Fraction(-1), frac), "le"),
            ("ord", nt_sub(frac, nt_const(1)), "lt")]
    return fl, frac, taut


def preprocess(conj: Conj, var: str, sig: Signature, unknowns=None):
    """Unfold the variable into its integer and fractional parts.

    Returns a list of branches ``(conj, k, u, mult, shift)`` whose
    disjunction is equivalent to the input; within a branch the original
    variable equals ``mult*k + shift + u`` with ``Z(k)`` and ``0 <= u < 1``.
    """
    if unknowns is None:
        taken = conj.vars() | {var}
        k = fresh_name("k", taken)
        taken.add(k)
        u = fresh_name("u", taken)
    else:
        k, u = unknowns
    names = {k, u}

    start = _subst_deep(conj.all_lits(), var, Add(Var(k), Var(u)))
    work = [(start, 1, _ZERO)]
    done = []
    while work:
        lits, mult, shift = work.pop()

        arg = _floor_obstruction(lits, names)
        if arg is not None:
            nta = normalize_term(arg)
            c, e = nta.coeff_of(k), nta.coeff_of(u)
            b = c.denominator
            if b > 1:
                # refine k through its residue classes so c*k integerizes
                for r in range(b):
                    repl = Add(Scale(Fraction(b), Var(k)), Const(Fraction(r)))
                    work.append((_subst_deep(lits, k, repl),
                                 mult * b, shift + mult * r))
                continue
            d = NormalTerm(nta.floor_parts, nta.proj_parts,
                           tuple(p for p in nta.linear if p[0] not in names),
                           nta.const)
            fl, frac, taut = _frac_parts(d)
            ck = nt_scale(c, nt_var(k)) if c else nt_const(0)
            if e == 0:
                repl = nt_add(ck, fl)
                work.append((_rewrite_lits(lits, arg, expand(repl)),
                             mult, shift))
                continue
            eu_frac = nt_add(nt_scale(e, nt_var(u)), frac)
            for i in _window(e):
                repl = nt_add(nt_add(ck, fl), nt_const(i))
                guards = [("ord", nt_sub(nt_const(i), eu_frac), "le"),
                          ("ord", nt_sub(eu_frac, nt_const(i + 1)), "lt")]
                work.append((_rewrite_lits(lits, arg, expand(repl))
                             + guards + taut, mult, shift))
            continue

        for idx, lit in enumerate(lits):
            if lit[0] != "mem":
                continue
            nt = lit[2]
            c = nt.coeff_of(k)
            if lit[1] == "Q":
                if c == 0:
                    continue
            elif not nt.mentions(k) and not nt.mentions(u):
                continue
            b = c.denominator
            if b > 1:
                for r in range(b):
                    repl = Add(Scale(Fraction(b), Var(k)), Const(Fraction(r)))
                    work.append((_subst_deep(lits, k, repl),
                                 mult * b, shift + mult * r))
                break
            # c*k is an integer: both predicates absorb it
            rest = NormalTerm(nt.floor_parts, nt.proj_parts,
                              tuple(p for p in nt.linear if p[0] != k),
                              nt.const)
            others = lits[:idx] + lits[idx + 1:]
            e = rest.coeff_of(u)
            if lit[1] == "Q" or e == 0:
                work.append((others + [_with_nt(lit, rest)], mult, shift))
                break
            d = NormalTerm(rest.floor_parts, rest.proj_parts,
                           tuple(p for p in rest.linear if p[0] != u),
                           rest.const)
            fl, frac, taut = _frac_parts(d)
            eu_frac = nt_add(nt_scale(e, nt_var(u)), frac)
            if lit[3]:
                # Z(e*u + d): e*u + frac(d) must hit an integer in the window
                for i in _window(e):
                    work.append((others + taut
                                 + [("ord", nt_sub(eu_frac, nt_const(i)), "eq")],
                                 mult, shift))
            else:
                # the negation dodges every integer in the window
                branches = [others + taut]
                for i in _window(e):
                    split = []
                    for base in branches:
                        split.append(base + [("ord", nt_sub(eu_frac, nt_const(i)), "lt")])
                        split.append(base + [("ord", nt_sub(nt_const(i), eu_frac), "lt")])
                    branches = split
                for base in branches:
                    work.append((base, mult, shift))
            break
        else:
            done.append((lits, mult, shift))

    out = []
    for lits, mult, shift in done:
        c = Conj(sig)
        good = all(c.add(lit) for lit in lits)
        good = good and c.add_mem("Z", nt_var(k), True)
        good = good and c.add_ord(nt_scale(Fraction(-1), nt_var(u)), "le")
        good = good and c.add_ord(nt_sub(nt_var(u), nt_const(1)), "lt")
        if good and c.ok:
            out.append((c, k, u, mult, shift))
    return out


def eliminate_many(conjs, var: str, sig: Signature) -> list:
    """Eliminate the variable from several conjuncts at once.

    The unfolding branches of related conjuncts overlap heavily once their
    guards lose the fractional part, so the dense-order results are pruned
    jointly before the integer step runs."""
    taken = {var}
    for c in conjs:
        taken |= c.vars()
    k = fresh_name("k", taken)
    taken.add(k)
    u = fresh_name("u", taken)
    mid = []
    for conj in conjs:
        for c, _, _, _, _ in preprocess(conj, var, sig, (k, u)):
            mid.extend(coset.eliminate(c, u) if sig.has_q
                       else fm.eliminate(c, u))
    out = []
    for r in prune([r for r in mid if r.ok]):
        if r.mentions(k):
            out.extend(cooper.eliminate(r, k, integer_mode=False))
        else:
            out.append(r)
    return prune([r for r in out if r.ok])


def eliminate(conj: Conj, var: str, sig: Signature) -> list:
    return eliminate_many([conj], var, sig)
