"""First-order syntax for ordered Abelian group languages.

Terms are built from variables, exact rational constants, addition, rational
scaling, the integer-part function and Hamel-basis projections.  Atoms are
strict order comparisons, equalities and the unary membership predicates Z
(integers) and Q (rationals).  Which constructors are legal is governed by a
:class:`Signature`.

All values are immutable; arithmetic is exact (``fractions.Fraction``
throughout, never floats).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union


class SignatureError(ValueError):
    """A term or formula uses a symbol not present in its signature."""


# ---------------------------------------------------------------------------
# signatures

@dataclass(frozen=True)
class Signature:
    """One of the concrete languages the engines work over.

    ``n_proj`` is nonzero only for the Hamel-projection theories, where it
    fixes the number of projection symbols.
    """

    name: str
    has_floor: bool = False
    has_z: bool = False
    has_q: bool = False
    n_proj: int = 0

    def __str__(self) -> str:
        if self.n_proj:
            return f"{self.name}({self.n_proj})"
        return self.name


DOAG = Signature("doag")
PRESBURGER = Signature("presburger", has_z=True)
T0_MIXED = Signature("t0", has_floor=True, has_z=True)
T1_COSET = Signature("t1", has_q=True)
T_FULL = Signature("t", has_floor=True, has_z=True, has_q=True)


def TN_HAMEL(n: int) -> Signature:
    if n < 1:
        raise ValueError("number of projections must be positive")
    return Signature("tn", n_proj=n)


# ---------------------------------------------------------------------------
# terms

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Add:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Scale:
    coeff: Fraction
    arg: "Term"

    def __post_init__(self):
        if not isinstance(self.coeff, Fraction):
            object.__setattr__(self, "coeff", Fraction(self.coeff))


@dataclass(frozen=True)
class Floor:
    arg: "Term"


@dataclass(frozen=True)
class Proj:
    index: int
    arg: "Term"


Term = Union[Var, Const, Add, Scale, Floor, Proj]


def term_of(x) -> Term:
    if isinstance(x, (Var, Const, Add, Scale, Floor, Proj)):
        return x
    if isinstance(x, str):
        return Var(x)
    if isinstance(x, (int, Fraction)):
        return Const(Fraction(x))
    raise TypeError(f"cannot coerce {x!r} to a term")


def tadd(*parts) -> Term:
    terms = [term_of(p) for p in parts]
    if not terms:
        return Const(Fraction(0))
    out = terms[0]
    for t in terms[1:]:
        out = Add(out, t)
    return out


def tneg(t) -> Term:
    return Scale(Fraction(-1), term_of(t))


def tsub(a, b) -> Term:
    return Add(term_of(a), tneg(b))


# ---------------------------------------------------------------------------
# atoms and formulas

@dataclass(frozen=True)
class Lt:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class InZ:
    arg: Term


@dataclass(frozen=True)
class InQ:
    arg: Term


Atom = Union[Lt, Eq, InZ, InQ]


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Atomic:
    atom: Atom


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Top, Bot, Atomic, Not, And, Or, Exists, Forall]

TOP = Top()
BOT = Bot()


def _balanced(fs, cls):
    # balanced trees keep recursion over large disjunctions logarithmic
    if len(fs) == 1:
        return fs[0]
    mid = len(fs) // 2
    return cls(_balanced(fs[:mid], cls), _balanced(fs[mid:], cls))


def and_all(fs) -> Formula:
    fs = list(fs)
    return _balanced(fs, And) if fs else TOP


def or_all(fs) -> Formula:
    fs = list(fs)
    return _balanced(fs, Or) if fs else BOT


def atoms_of(f: Formula) -> Iterator[Atom]:
    if isinstance(f, Atomic):
        yield f.atom
    elif isinstance(f, Not):
        yield from atoms_of(f.arg)
    elif isinstance(f, (And, Or)):
        yield from atoms_of(f.left)
        yield from atoms_of(f.right)
    elif isinstance(f, (Exists, Forall)):
        yield from atoms_of(f.body)


# ---------------------------------------------------------------------------
# free variables

def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    if isinstance(t, Add):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, (Scale, Floor, Proj)):
        return term_vars(t.arg)
    raise TypeError(t)


def atom_vars(a: Atom) -> set:
    if isinstance(a, (Lt, Eq)):
        return term_vars(a.lhs) | term_vars(a.rhs)
    return term_vars(a.arg)


def free_vars(f: Formula) -> set:
    if isinstance(f, (Top, Bot)):
        return set()
    if isinstance(f, Atomic):
        return atom_vars(f.atom)
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f)


# ---------------------------------------------------------------------------
# signature validation

def validate_term(t: Term, sig: Signature) -> None:
    if isinstance(t, (Var, Const)):
        return
    if isinstance(t, Add):
        validate_term(t.left, sig)
        validate_term(t.right, sig)
        return
    if isinstance(t, Scale):
        validate_term(t.arg, sig)
        return
    if isinstance(t, Floor):
        if not sig.has_floor:
            raise SignatureError(f"floor not available in {sig}: {t}")
        validate_term(t.arg, sig)
        return
    if isinstance(t, Proj):
        if sig.n_proj == 0:
            raise SignatureError(f"projections not available in {sig}: {t}")
        if not (1 <= t.index <= sig.n_proj):
            raise SignatureError(
                f"projection index {t.index} out of range 1..{sig.n_proj}")
        validate_term(t.arg, sig)
        return
    raise TypeError(t)


def validate_atom(a: Atom, sig: Signature) -> None:
    if isinstance(a, (Lt, Eq)):
        validate_term(a.lhs, sig)
        validate_term(a.rhs, sig)
        return
    if isinstance(a, InZ):
        if not sig.has_z:
            raise SignatureError(f"Z not available in {sig}: {a}")
        validate_term(a.arg, sig)
        return
    if isinstance(a, InQ):
        if not sig.has_q:
            raise SignatureError(f"Q not available in {sig}: {a}")
        validate_term(a.arg, sig)
        return
    raise TypeError(a)


def validate(f: Formula, sig: Signature) -> None:
    """Raise :class:`SignatureError` if ``f`` uses symbols outside ``sig``."""
    if isinstance(f, (Top, Bot)):
        return
    if isinstance(f, Atomic):
        validate_atom(f.atom, sig)
    elif isinstance(f, Not):
        validate(f.arg, sig)
    elif isinstance(f, (And, Or)):
        validate(f.left, sig)
        validate(f.right, sig)
    elif isinstance(f, (Exists, Forall)):
        validate(f.body, sig)
    else:
        raise TypeError(f)


# ---------------------------------------------------------------------------
# substitution

def subst_term(t: Term, var: str, repl: Term) -> Term:
    if isinstance(t, Var):
        return repl if t.name == var else t
    if isinstance(t, Const):
        return t
    if isinstance(t, Add):
        return Add(subst_term(t.left, var, repl), subst_term(t.right, var, repl))
    if isinstance(t, Scale):
        return Scale(t.coeff, subst_term(t.arg, var, repl))
    if isinstance(t, Floor):
        return Floor(subst_term(t.arg, var, repl))
    if isinstance(t, Proj):
        return Proj(t.index, subst_term(t.arg, var, repl))
    raise TypeError(t)


def subst_atom(a: Atom, var: str, repl: Term) -> Atom:
    if isinstance(a, Lt):
        return Lt(subst_term(a.lhs, var, repl), subst_term(a.rhs, var, repl))
    if isinstance(a, Eq):
        return Eq(subst_term(a.lhs, var, repl), subst_term(a.rhs, var, repl))
    if isinstance(a, InZ):
        return InZ(subst_term(a.arg, var, repl))
    if isinstance(a, InQ):
        return InQ(subst_term(a.arg, var, repl))
    raise TypeError(a)


def fresh_name(base: str, taken) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def substitute(f: Formula, var: str, repl: Term) -> Formula:
    """Capture-avoiding substitution of ``repl`` for free ``var`` in ``f``."""
    repl_vars = term_vars(repl)

    def go(g: Formula) -> Formula:
        if isinstance(g, (Top, Bot)):
            return g
        if isinstance(g, Atomic):
            return Atomic(subst_atom(g.atom, var, repl))
        if isinstance(g, Not):
            return Not(go(g.arg))
        if isinstance(g, And):
            return And(go(g.left), go(g.right))
        if isinstance(g, Or):
            return Or(go(g.left), go(g.right))
        if isinstance(g, (Exists, Forall)):
            if g.var == var:
                return g
            if g.var in repl_vars:
                # rename the bound variable out of the way first
                nv = fresh_name(g.var, repl_vars | free_vars(g.body) | {var})
                body = substitute(g.body, g.var, Var(nv))
                g = type(g)(nv, body)
            return type(g)(g.var, go(g.body))
        raise TypeError(g)

    return go(f)


def alpha_eq(f: Formula, g: Formula, env=None) -> bool:
    """Structural equality up to renaming of bound variables."""
    if env is None:
        env = {}
    if type(f) is not type(g):
        return False
    if isinstance(f, (Top, Bot)):
        return True
    if isinstance(f, Atomic):
        return _atom_alpha(f.atom, g.atom, env)
    if isinstance(f, Not):
        return alpha_eq(f.arg, g.arg, env)
    if isinstance(f, (And, Or)):
        return alpha_eq(f.left, g.left, env) and alpha_eq(f.right, g.right, env)
    if isinstance(f, (Exists, Forall)):
        env2 = dict(env)
        env2[f.var] = g.var
        return alpha_eq(f.body, g.body, env2)
    raise TypeError(f)


def _term_alpha(s: Term, t: Term, env) -> bool:
    if type(s) is not type(t):
        return False
    if isinstance(s, Var):
        return env.get(s.name, s.name) == t.name
    if isinstance(s, Const):
        return s.value == t.value
    if isinstance(s, Add):
        return _term_alpha(s.left, t.left, env) and _term_alpha(s.right, t.right, env)
    if isinstance(s, Scale):
        return s.coeff == t.coeff and _term_alpha(s.arg, t.arg, env)
    if isinstance(s, Floor):
        return _term_alpha(s.arg, t.arg, env)
    if isinstance(s, Proj):
        return s.index == t.index and _term_alpha(s.arg, t.arg, env)
    raise TypeError(s)


def _atom_alpha(a: Atom, b: Atom, env) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, (Lt, Eq)):
        return _term_alpha(a.lhs, b.lhs, env) and _term_alpha(a.rhs, b.rhs, env)
    return _term_alpha(a.arg, b.arg, env)
