"""Canonical linear form for terms.

Every term is flattened into

    sum(c_i * floor(s_i))  +  sum(d_(r,v) * pi_r(v))  +  sum(e_v * v)  +  k

with exact rational coefficients, no zero coefficients stored, and floor
arguments themselves kept in canonical (re-expanded) form.  Integer-valued
contributions are pulled out of floors: ``floor(u + 3) = floor(u) + 3`` and
``floor(floor(x) + y) = floor(x) + floor(y)``.  Projections distribute over
sums and rational scalings, annihilate rational constants and satisfy
``pi_i(pi_j(t)) = pi_i(t)`` when ``i = j`` and ``0`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .terms import (
    Add, Const, Floor, Proj, Scale, Term, Var, tadd, term_of,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class NormalTerm:
    floor_parts: tuple  # ((coeff, arg_term), ...) sorted by arg key
    proj_parts: tuple   # (((index, var), coeff), ...) sorted
    linear: tuple       # ((var, coeff), ...) sorted
    const: Fraction

    def __hash__(self):
        # hot path: profiles key the bound tables and frozenset dedup, and
        # Fraction hashing is slow enough to dominate without a cache
        try:
            return self._hash
        except AttributeError:
            h = hash((self.floor_parts, self.proj_parts, self.linear, self.const))
            object.__setattr__(self, "_hash", h)
            return h

    @property
    def is_constant(self) -> bool:
        return not (self.floor_parts or self.proj_parts or self.linear)

    @property
    def is_zero(self) -> bool:
        return self.is_constant and self.const == 0

    def coeff_of(self, var: str) -> Fraction:
        for v, c in self.linear:
            if v == var:
                return c
        return _ZERO

    def proj_coeff(self, index: int, var: str) -> Fraction:
        for (i, v), c in self.proj_parts:
            if (i, v) == (index, var):
                return c
        return _ZERO

    def mentions(self, var: str) -> bool:
        """True if ``var`` occurs anywhere, including inside floor args."""
        if any(v == var for v, _ in self.linear):
            return True
        if any(v == var for (_, v), _ in self.proj_parts):
            return True
        from .terms import term_vars
        return any(var in term_vars(arg) for _, arg in self.floor_parts)

    def floor_mentions(self, var: str) -> bool:
        from .terms import term_vars
        return any(var in term_vars(arg) for _, arg in self.floor_parts)

    def vars(self) -> set:
        from .terms import term_vars
        out = {v for v, _ in self.linear}
        out |= {v for (_, v), _ in self.proj_parts}
        for _, arg in self.floor_parts:
            out |= term_vars(arg)
        return out


def _mk(floors: dict, projs: dict, linear: dict, const: Fraction) -> NormalTerm:
    f = tuple(sorted(((c, a) for a, c in floors.items() if c != 0),
                     key=lambda p: _term_key(p[1])))
    # store as (coeff, arg)
    p = tuple(sorted(((k, c) for k, c in projs.items() if c != 0)))
    l = tuple(sorted(((v, c) for v, c in linear.items() if c != 0)))
    return NormalTerm(f, p, l, const)


_key_memo: dict = {}


def _term_key(t: Term):
    # deterministic ordering key for canonical floor args; memoized since
    # the same argument terms recur across thousands of conjuncts
    key = _key_memo.get(t)
    if key is None:
        from .parser import print_term
        key = _key_memo[t] = print_term(t)
        if len(_key_memo) > 100000:
            _key_memo.clear()
    return key


def nt_const(q) -> NormalTerm:
    return NormalTerm((), (), (), Fraction(q))


def nt_var(v: str) -> NormalTerm:
    return NormalTerm((), (), ((v, _ONE),), _ZERO)


def nt_add(a: NormalTerm, b: NormalTerm) -> NormalTerm:
    floors = {arg: c for c, arg in a.floor_parts}
    for c, arg in b.floor_parts:
        floors[arg] = floors.get(arg, _ZERO) + c
    projs = dict(a.proj_parts)
    for k, c in b.proj_parts:
        projs[k] = projs.get(k, _ZERO) + c
    linear = dict(a.linear)
    for v, c in b.linear:
        linear[v] = linear.get(v, _ZERO) + c
    return _mk(floors, projs, linear, a.const + b.const)


def nt_scale(q: Fraction, a: NormalTerm) -> NormalTerm:
    q = Fraction(q)
    if q == 0:
        return nt_const(0)
    floors = {arg: q * c for c, arg in a.floor_parts}
    projs = {k: q * c for k, c in a.proj_parts}
    linear = {v: q * c for v, c in a.linear}
    return _mk(floors, projs, linear, q * a.const)


def nt_sub(a: NormalTerm, b: NormalTerm) -> NormalTerm:
    return nt_add(a, nt_scale(Fraction(-1), b))


def nt_subst_linear(nt: NormalTerm, var: str, repl: NormalTerm) -> NormalTerm:
    """Substitute for a variable that occurs only linearly (not under floors
    or projections)."""
    if nt.floor_mentions(var) or any(v == var for (_, v), _ in nt.proj_parts):
        raise ValueError(f"{var} occurs non-linearly")
    c = nt.coeff_of(var)
    if c == 0:
        return nt
    linear = dict(nt.linear)
    del linear[var]
    base = NormalTerm(nt.floor_parts, nt.proj_parts,
                      tuple(sorted(linear.items())), nt.const)
    return nt_add(base, nt_scale(c, repl))


def normalize_term(t: Term, sig=None) -> NormalTerm:
    """Flatten ``t`` into canonical form.  ``sig`` is accepted for interface
    symmetry; the rewriting itself is signature-independent."""
    t = term_of(t)
    if isinstance(t, Var):
        return nt_var(t.name)
    if isinstance(t, Const):
        return nt_const(t.value)
    if isinstance(t, Add):
        return nt_add(normalize_term(t.left), normalize_term(t.right))
    if isinstance(t, Scale):
        return nt_scale(t.coeff, normalize_term(t.arg))
    if isinstance(t, Floor):
        return _norm_floor(normalize_term(t.arg))
    if isinstance(t, Proj):
        return _norm_proj(t.index, normalize_term(t.arg))
    raise TypeError(t)


def _norm_floor(inner: NormalTerm) -> NormalTerm:
    # pull out integer-certain parts: the integer part of the constant and
    # floor summands with integer coefficients
    k_floors = {}
    rest_floors = {}
    for c, arg in inner.floor_parts:
        if c.denominator == 1:
            k_floors[arg] = k_floors.get(arg, _ZERO) + c
        else:
            rest_floors[arg] = rest_floors.get(arg, _ZERO) + c
    from math import floor as _floor
    k_const = Fraction(_floor(inner.const))
    frac_const = inner.const - k_const
    rest = _mk(rest_floors, dict(inner.proj_parts), dict(inner.linear), frac_const)
    pulled = _mk(k_floors, {}, {}, k_const)
    if rest.is_constant:
        # 0 <= frac_const < 1, so the residual floor is 0
        return pulled
    arg_term = expand(rest)
    return nt_add(pulled, NormalTerm(((_ONE, arg_term),), (), (), _ZERO))


def _norm_proj(index: int, inner: NormalTerm) -> NormalTerm:
    if inner.floor_parts:
        raise ValueError("projection applied to a floor term")
    projs = {}
    for (i, v), c in inner.proj_parts:
        if i == index:
            projs[(i, v)] = projs.get((i, v), _ZERO) + c
    for v, c in inner.linear:
        projs[(index, v)] = projs.get((index, v), _ZERO) + c
    # rational constants vanish under projections
    return _mk({}, projs, {}, _ZERO)


def expand(nt: NormalTerm) -> Term:
    """Rebuild a Term; pointwise equal to the original in every model."""
    parts = []
    for c, arg in nt.floor_parts:
        f = Floor(arg)
        parts.append(f if c == 1 else Scale(c, f))
    for (i, v), c in nt.proj_parts:
        p = Proj(i, Var(v))
        parts.append(p if c == 1 else Scale(c, p))
    for v, c in nt.linear:
        parts.append(Var(v) if c == 1 else Scale(c, Var(v)))
    if nt.const != 0 or not parts:
        parts.append(Const(nt.const))
    return tadd(*parts)


def nt_key(nt: NormalTerm):
    """Hashable canonical key (suitable for dict/set membership)."""
    return nt


def nt_without_var(nt: NormalTerm, var: str) -> NormalTerm:
    linear = tuple((v, c) for v, c in nt.linear if v != var)
    return NormalTerm(nt.floor_parts, nt.proj_parts, linear, nt.const)
