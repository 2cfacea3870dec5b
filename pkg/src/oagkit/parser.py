"""Parser and printer for the ASCII formula grammar.

Grammar (terms):   t  ::= var | rat | t + t | t - t | rat * t | t / rat
                         | floor(t) | pi<i>(t)
Atoms:             t < t | t <= t | t > t | t >= t | t = t | Z(t) | Q(t)
Connectives:       ~  &  |  ->  with  E x. / A x.  quantifiers.

``a <= b`` is read as ``~(b < a)`` and printed back the same way, so
parse/print round-trips are exact.  ``>`` and ``>=`` are accepted on input
only; the printer always emits ``<`` / ``<=``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .terms import (
    Add, And, Atomic, Bot, Const, Eq, Exists, Floor, Forall, Formula, InQ,
    InZ, Lt, Not, Or, Proj, Scale, Signature, Term, Top, Var, validate,
)


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<num>\d+(?:/\d+)?)
      | (?P<pi>pi\d+)\b
      | (?P<floor>floor)\b
      | (?P<name>[a-z][a-z0-9_]*)
      | (?P<upper>[EAZQ])
      | (?P<op><=|>=|->|[-+*/<>=()&|~.])
    )""",
    re.VERBOSE,
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos:].lstrip()[0]!r}",
                             pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.next()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    # -- formulas ----------------------------------------------------------

    def formula(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "upper" and val in ("E", "A"):
            self.next()
            nkind, name, npos = self.next()
            if nkind != "name":
                raise ParseError("expected a variable after quantifier", npos)
            self.expect(".")
            body = self.formula()
            return Exists(name, body) if val == "E" else Forall(name, body)
        return self.implies()

    def implies(self) -> Formula:
        left = self.disj()
        if self.peek()[1] == "->":
            self.next()
            right = self.formula()
            return Or(Not(left), right)
        return left

    def disj(self) -> Formula:
        out = self.conj()
        while self.peek()[1] == "|":
            self.next()
            out = Or(out, self.conj())
        return out

    def conj(self) -> Formula:
        out = self.unary()
        while self.peek()[1] == "&":
            self.next()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "~":
            self.next()
            return Not(self.unary())
        if kind == "upper" and val in ("E", "A"):
            return self.formula()
        if val == "(":
            # could be a parenthesized formula or a parenthesized term that
            # starts an atom; try the formula reading first and back off
            save = self.i
            try:
                self.next()
                f = self.formula()
                self.expect(")")
                if self.peek()[1] in ("<", "<=", ">", ">=", "=", "+", "-", "*", "/"):
                    raise ParseError("term context", pos)
                return f
            except ParseError:
                self.i = save
                return self.atom()
        return self.atom()

    def atom(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "upper" and val in ("Z", "Q"):
            self.next()
            self.expect("(")
            t = self.term()
            self.expect(")")
            return Atomic(InZ(t) if val == "Z" else InQ(t))
        lhs = self.term()
        okind, op, opos = self.next()
        if op == "<":
            return Atomic(Lt(lhs, self.term()))
        if op == "=":
            return Atomic(Eq(lhs, self.term()))
        if op == "<=":
            return Not(Atomic(Lt(self.term(), lhs)))
        if op == ">":
            return Atomic(Lt(self.term(), lhs))
        if op == ">=":
            rhs = self.term()
            return Not(Atomic(Lt(lhs, rhs)))
        raise ParseError(f"expected a relation, found {op or 'end of input'!r}", opos)

    # -- terms -------------------------------------------------------------

    def term(self) -> Term:
        out = self.factor()
        while True:
            _, op, _ = self.peek()
            if op == "+":
                self.next()
                out = Add(out, self.factor())
            elif op == "-":
                self.next()
                out = Add(out, Scale(Fraction(-1), self.factor()))
            else:
                return out

    def factor(self) -> Term:
        base = self.primary()
        # division by a rational literal (input convenience)
        while self.peek()[1] == "/":
            self.next()
            nkind, nval, npos = self.next()
            if nkind != "num":
                raise ParseError("expected a rational after '/'", npos)
            base = Scale(Fraction(1) / Fraction(nval), base)
        return base

    def primary(self) -> Term:
        kind, val, pos = self.next()
        if kind == "num":
            frac = Fraction(val)
            if self.peek()[1] == "*":
                self.next()
                return Scale(frac, self.factor())
            return Const(frac)
        if val == "-":
            arg = self.primary()
            if isinstance(arg, Const):
                return Const(-arg.value)
            if isinstance(arg, Scale):
                return Scale(-arg.coeff, arg.arg)
            return Scale(Fraction(-1), arg)
        if kind == "name":
            return Var(val)
        if kind == "floor":
            self.expect("(")
            t = self.term()
            self.expect(")")
            return Floor(t)
        if kind == "pi":
            idx = int(val[2:])
            self.expect("(")
            t = self.term()
            self.expect(")")
            return Proj(idx, t)
        if val == "(":
            t = self.term()
            self.expect(")")
            return t
        raise ParseError(f"unexpected {val or 'end of input'!r} in term", pos)


def parse(text: str, sig: Signature | None = None) -> Formula:
    """Parse ``text``; validate against ``sig`` when given."""
    p = _Parser(text)
    f = p.formula()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {val!r}", pos)
    if sig is not None:
        validate(f, sig)
    return f


def parse_term(text: str, sig: Signature | None = None) -> Term:
    p = _Parser(text)
    t = p.term()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {val!r}", pos)
    if sig is not None:
        from .terms import validate_term
        validate_term(t, sig)
    return t


# ---------------------------------------------------------------------------
# printing

def _print_frac(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# term precedence: 1 = sum, 2 = scale, 3 = atom-like
def _term_prec(t: Term) -> int:
    if isinstance(t, Add):
        return 1
    if isinstance(t, Scale):
        return 2
    return 3


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        if t.value < 0:
            return f"(0 - {_print_frac(-t.value)})"
        return _print_frac(t.value)
    if isinstance(t, Add):
        left = print_term(t.left)
        if _term_prec(t.left) < 1:
            left = f"({left})"
        # negative-scaled right operands print as subtraction
        r = t.right
        if isinstance(r, Scale) and r.coeff < 0:
            pos = Scale(-r.coeff, r.arg)
            if pos.coeff == 1:
                rs = print_term(pos.arg)
                if _term_prec(pos.arg) < 2:
                    rs = f"({rs})"
            else:
                rs = print_term(pos)
            return f"{left} - {rs}"
        if isinstance(r, Const) and r.value < 0:
            return f"{left} - {_print_frac(-r.value)}"
        rs = print_term(r)
        if _term_prec(r) < 2:
            rs = f"({rs})"
        return f"{left} + {rs}"
    if isinstance(t, Scale):
        if t.coeff == -1 and isinstance(t.arg, (Var, Floor, Proj)):
            return f"0 - {print_term(t.arg)}"
        inner = print_term(t.arg)
        if _term_prec(t.arg) < 3:
            inner = f"({inner})"
        if t.coeff < 0:
            return f"0 - {_print_frac(-t.coeff)} * {inner}"
        return f"{_print_frac(t.coeff)} * {inner}"
    if isinstance(t, Floor):
        return f"floor({print_term(t.arg)})"
    if isinstance(t, Proj):
        return f"pi{t.index}({print_term(t.arg)})"
    raise TypeError(t)


# formula precedence: 0 quantifier/implication, 1 or, 2 and, 3 unary
def _prec(f: Formula) -> int:
    if isinstance(f, (Exists, Forall)):
        return 0
    if isinstance(f, Or):
        return 1
    if isinstance(f, And):
        return 2
    return 3


def print_formula(f: Formula) -> str:
    if isinstance(f, Top):
        return "0 = 0"
    if isinstance(f, Bot):
        return "0 < 0"
    if isinstance(f, Atomic):
        a = f.atom
        if isinstance(a, Lt):
            return f"{print_term(a.lhs)} < {print_term(a.rhs)}"
        if isinstance(a, Eq):
            return f"{print_term(a.lhs)} = {print_term(a.rhs)}"
        if isinstance(a, InZ):
            return f"Z({print_term(a.arg)})"
        if isinstance(a, InQ):
            return f"Q({print_term(a.arg)})"
        raise TypeError(a)
    if isinstance(f, Not):
        if isinstance(f.arg, Atomic) and isinstance(f.arg.atom, Lt):
            a = f.arg.atom
            return f"{print_term(a.rhs)} <= {print_term(a.lhs)}"
        inner = print_formula(f.arg)
        if _prec(f.arg) < 3:
            return f"~({inner})"
        return f"~{inner}"
    if isinstance(f, And):
        parts = []
        for side in (f.left, f.right):
            s = print_formula(side)
            if _prec(side) < 2:
                s = f"({s})"
            parts.append(s)
        return " & ".join(parts)
    if isinstance(f, Or):
        parts = []
        for side in (f.left, f.right):
            s = print_formula(side)
            if _prec(side) < 1:
                s = f"({s})"
            parts.append(s)
        return " | ".join(parts)
    if isinstance(f, Exists):
        return f"E {f.var}. {print_formula(f.body)}"
    if isinstance(f, Forall):
        return f"A {f.var}. {print_formula(f.body)}"
    raise TypeError(f)
