"""Elimination for the projection signatures.

A quantified element decomposes as ``x = x_1 + ... + x_n + x_0`` with
``x_r`` in the image of ``pi_r`` and ``x_0`` in the common kernel, so the
quantifier splits into one per component, each ranging over a dense
subgroup.  Literals are rewritten over the component unknowns
(``pi_r(x) -> x_r``, bare ``x`` -> the full sum) and the components are
eliminated serially:

* an equality pins a component to a term ``v``; the pin is only realizable
  when ``v`` lies in the component's subgroup, which unfolds to the exact
  linear conditions ``v = pi_r(v)`` (image) or ``pi_s(v) = 0`` for all s
  (kernel), themselves new literals over the remaining unknowns;
* otherwise the component is constrained to an open interval and density
  reduces elimination to Fourier-Motzkin.
"""

from __future__ import annotations

from fractions import Fraction

from ..normal import NormalTerm, nt_add, nt_scale, nt_sub, nt_var
from ..terms import Signature, fresh_name
from . import fm
from .core import Conj, EngineError

_ZERO = Fraction(0)


def _rewrite(nt: NormalTerm, var: str, comp_names: dict) -> NormalTerm:
    """Replace pi_r(var) by the component unknowns and bare var by their sum.

    comp_names maps kind (0 for kernel, 1..n for images) to variable name.
    """
    if nt.floor_mentions(var):
        raise EngineError("floors are not part of the projection signatures")
    out = NormalTerm(nt.floor_parts,
                     tuple(p for p in nt.proj_parts if p[0][1] != var),
                     tuple(p for p in nt.linear if p[0] != var),
                     nt.const)
    c = nt.coeff_of(var)
    if c != 0:
        for name in comp_names.values():
            out = nt_add(out, nt_scale(c, nt_var(name)))
    for (r, w), coeff in nt.proj_parts:
        if w == var:
            out = nt_add(out, nt_scale(coeff, nt_var(comp_names[r])))
    return out


def _proj_apply(r: int, nt: NormalTerm, kinds: dict) -> NormalTerm:
    """Symbolic pi_r of a term over component unknowns and parameters."""
    linear = []
    projs = {}
    for w, c in nt.linear:
        k = kinds.get(w)
        if k is None:
            projs[(r, w)] = projs.get((r, w), _ZERO) + c
        elif k == r:
            linear.append((w, c))
        # other components vanish under pi_r
    for (s, w), c in nt.proj_parts:
        if s == r:
            projs[(s, w)] = projs.get((s, w), _ZERO) + c
    return NormalTerm((), tuple(sorted((k, c) for k, c in projs.items() if c != 0)),
                      tuple(sorted(linear)), _ZERO)


def component_setup(conj: Conj, var: str, sig: Signature):
    """Rewrite over component unknowns; returns (conj, comp_names, kinds)
    or None when the rewritten literals clash."""
    n = sig.n_proj
    if conj.mem:
        raise EngineError("membership literals in a projection signature")
    taken = conj.vars() | {var}
    comp_names = {}
    for kind in list(range(1, n + 1)) + [0]:
        name = fresh_name(f"{var}_c{kind}", taken)
        taken.add(name)
        comp_names[kind] = name
    kinds = {name: kind for kind, name in comp_names.items()}

    c0 = Conj(conj.sig)
    for nt, rel in conj.ord_lits():
        if not c0.add_ord(_rewrite(nt, var, comp_names), rel):
            return None
    return c0, comp_names, kinds


def eliminate(conj: Conj, var: str, sig: Signature) -> list:
    setup = component_setup(conj, var, sig)
    if setup is None:
        return []
    c0, comp_names, kinds = setup
    return _elim_components(c0, list(comp_names.values()), kinds, sig.n_proj)


def _elim_components(c: Conj, remaining: list, kinds: dict, n: int) -> list:
    if not remaining:
        return [c] if c.ok else []
    chosen = None
    for nt, rel in c.ord_lits():
        if rel != "eq":
            continue
        for name in remaining:
            if nt.coeff_of(name) != 0:
                chosen = name
                break
        if chosen:
            break
    if chosen is None:
        chosen = remaining[0]
    rest = [r for r in remaining if r != chosen]
    out = []
    for c2 in _elim_one(c, chosen, kinds, n):
        out.extend(_elim_components(c2, rest, kinds, n))
    return out


def _elim_one(c: Conj, name: str, kinds: dict, n: int) -> list:
    lowers, uppers, eqs, _ = fm.split_bounds(c, name)
    if not eqs:
        # density of the component subgroup reduces this to interval talk
        return fm.eliminate(c, name)
    v = eqs[0]
    c2 = c.subst(name, v)
    if c2 is None or not c2.ok:
        return []
    kind = kinds[name]
    if kind == 0:
        for r in range(1, n + 1):
            if not c2.add_ord(_proj_apply(r, v, kinds), "eq"):
                return []
    else:
        if not c2.add_ord(nt_sub(v, _proj_apply(kind, v, kinds)), "eq"):
            return []
    return [c2] if c2.ok else []
