"""Elimination of a dense-group variable in the presence of ``Q``.

Every ``Q``-literal mentioning the variable normalizes to ``Q(x + s)``
(``Q`` is closed under rational scaling).  With at least one positive
literal the variable is pinned to a single coset, which is dense, so the
existence question splits exactly into

* the order constraints having a non-empty open interval (Fourier-Motzkin
  combinations of the bounds), and
* pairwise compatibility ``Q(s_i - s_1)`` of the positive literals, and
* avoidance ``~Q(t_j - s_1)`` for each negative literal.

With only negative literals any non-empty open interval works: an interval
meets infinitely many cosets, so finitely many forbidden ones never cover
it.  Weak bounds on the variable are split into strict/equal branches
first, and an equality turns the step into substitution.
"""

from __future__ import annotations

from fractions import Fraction

from ..normal import nt_scale, nt_sub, nt_without_var
from . import fm
from .core import Conj, EngineError


def eliminate(conj: Conj, var: str) -> list:
    # split weak bounds mentioning the variable: a degenerate interval needs
    # the substitution path, not the density argument
    for nt, rel in conj.ord_lits():
        if rel == "le" and nt.coeff_of(var) != 0:
            out = []
            for new_rel in ("lt", "eq"):
                c = Conj(conj.sig)
                good = c.add_ord(nt, new_rel)
                for lit in conj.all_lits():
                    if lit == ("ord", nt, "le"):
                        continue
                    good = good and c.add(lit)
                if good and c.ok:
                    out.extend(eliminate(c, var))
            return out
    return _strict(conj, var)


def _strict(conj: Conj, var: str) -> list:
    lowers, uppers, eqs, _ = fm.split_bounds(conj, var)
    if eqs:
        out = conj.subst(var, eqs[0])
        return [out] if out is not None and out.ok else []

    qpos, qneg = [], []
    out = Conj(conj.sig)
    for nt, rel in conj.ord_lits():
        if nt.coeff_of(var) == 0:
            if not out.add_ord(nt, rel):
                return []
    for pred, nt, pos in conj.mem_lits():
        if not nt.mentions(var):
            if not out.add_mem(pred, nt, pos):
                return []
            continue
        if pred != "Q":
            raise EngineError(f"integrality on {var} at the coset step")
        a = nt.coeff_of(var)
        if a == 0 or nt.floor_mentions(var):
            raise EngineError(f"{var} occurs non-linearly in a Q literal")
        s = nt_scale(Fraction(1) / a, nt_without_var(nt, var))
        (qpos if pos else qneg).append(s)

    for lo, lo_strict in lowers:
        for hi, hi_strict in uppers:
            rel = "lt" if (lo_strict or hi_strict) else "le"
            if not out.add_ord(nt_sub(lo, hi), rel):
                return []

    if qpos:
        anchor = qpos[0]
        for s in qpos[1:]:
            if not out.add_mem("Q", nt_sub(s, anchor), True):
                return []
        for t in qneg:
            if not out.add_mem("Q", nt_sub(t, anchor), False):
                return []
    return [out] if out.ok else []
