"""Exact computable models used as differential-testing oracles.

Three element kinds:

* :class:`RatPoint` - a rational, for the divisible group, Presburger
  (restricted to integer samples) and the integer/real mixed theory;
* :class:`QuadPoint` - ``a + b*sqrt(2)``, for the theories with the rational
  coset predicate (Q holds exactly when ``b = 0``);
* :class:`RootCombo` - ``a0 + a1*sqrt(p1) + ... + an*sqrt(pn)`` over the
  first ``n`` primes, for the projection theories (the square roots play the
  role of the chosen basis elements; projections pick out coordinates).

All comparisons go through exact sign computation; zero testing is purely
algebraic, never numeric.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .terms import (
    Add, And, Atomic, Bot, Const, Eq, Exists, Floor, Forall, Formula, InQ,
    InZ, Lt, Not, Or, Proj, Scale, Signature, Term, Top, Var,
)

_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]


class EvalError(ValueError):
    """Operation not supported on this element kind."""


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatPoint:
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))

    def add(self, other):
        return RatPoint(self.value + other.value)

    def scale(self, q):
        return RatPoint(self.value * q)

    def neg(self):
        return RatPoint(-self.value)

    def sub(self, other):
        return RatPoint(self.value - other.value)

    def sign(self) -> int:
        v = self.value
        return (v > 0) - (v < 0)

    def floor(self):
        return RatPoint(Fraction(math.floor(self.value)))

    def is_integer(self) -> bool:
        return self.value.denominator == 1

    def is_rational(self) -> bool:
        return True

    def to_float(self) -> float:
        return float(self.value)

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class QuadPoint:
    """``a + b * sqrt(2)`` with rational a, b."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        if not isinstance(self.a, Fraction):
            object.__setattr__(self, "a", Fraction(self.a))
        if not isinstance(self.b, Fraction):
            object.__setattr__(self, "b", Fraction(self.b))

    def add(self, other):
        return QuadPoint(self.a + other.a, self.b + other.b)

    def scale(self, q):
        return QuadPoint(self.a * q, self.b * q)

    def neg(self):
        return QuadPoint(-self.a, -self.b)

    def sub(self, other):
        return QuadPoint(self.a - other.a, self.b - other.b)

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 against 2 b^2
        if a > 0:  # b < 0: positive iff a^2 > 2 b^2
            return 1 if a * a > 2 * b * b else -1
        return -1 if a * a > 2 * b * b else 1

    def floor(self):
        # bracket with exact sign tests around a float estimate
        est = math.floor(float(self.a) + float(self.b) * math.sqrt(2))
        n = est
        while self.sub(QuadPoint(Fraction(n), Fraction(0))).sign() < 0:
            n -= 1
        while self.sub(QuadPoint(Fraction(n + 1), Fraction(0))).sign() >= 0:
            n += 1
        return QuadPoint(Fraction(n), Fraction(0))

    def is_integer(self) -> bool:
        return self.b == 0 and self.a.denominator == 1

    def is_rational(self) -> bool:
        return self.b == 0

    def to_float(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(2)

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a}+{self.b}*sqrt2"


@dataclass(frozen=True)
class RootCombo:
    """``coeffs[0] + coeffs[1]*sqrt(p_1) + ... + coeffs[n]*sqrt(p_n)``."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @property
    def n(self) -> int:
        return len(self.coeffs) - 1

    def add(self, other):
        return RootCombo(tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    def scale(self, q):
        return RootCombo(tuple(x * q for x in self.coeffs))

    def neg(self):
        return RootCombo(tuple(-x for x in self.coeffs))

    def sub(self, other):
        return RootCombo(tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def sign(self) -> int:
        if all(c == 0 for c in self.coeffs):
            return 0
        if all(c == 0 for c in self.coeffs[1:]):
            return 1 if self.coeffs[0] > 0 else -1
        # interval refinement; doubling precision terminates because a
        # nonzero combination is bounded away from zero
        bits = 64
        while True:
            lo = self.coeffs[0]
            hi = self.coeffs[0]
            scale = 1 << bits
            for c, p in zip(self.coeffs[1:], _PRIMES):
                if c == 0:
                    continue
                s = math.isqrt(p * scale * scale)
                root_lo = Fraction(s, scale)
                root_hi = Fraction(s + 1, scale)
                if c > 0:
                    lo += c * root_lo
                    hi += c * root_hi
                else:
                    lo += c * root_hi
                    hi += c * root_lo
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def proj(self, index: int):
        out = [Fraction(0)] * len(self.coeffs)
        out[index] = self.coeffs[index]
        return RootCombo(tuple(out))

    def floor(self):
        raise EvalError("floor is not defined on root-combination elements")

    def is_integer(self) -> bool:
        raise EvalError("Z is not interpreted on root-combination elements")

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def to_float(self) -> float:
        out = float(self.coeffs[0])
        for c, p in zip(self.coeffs[1:], _PRIMES):
            out += float(c) * math.sqrt(p)
        return out

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coeffs) + ")"


ModelElement = object  # RatPoint | QuadPoint | RootCombo


def el_cmp(x, y) -> int:
    return x.sub(y).sign()


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleModel:
    """Interpretation of one signature over one element kind."""

    sig: Signature
    kind: str  # "rat" | "int" | "quad" | "combo"

    def const(self, q: Fraction):
        q = Fraction(q)
        if self.kind in ("rat", "int"):
            return RatPoint(q)
        if self.kind == "quad":
            return QuadPoint(q, Fraction(0))
        return RootCombo((q,) + (Fraction(0),) * self.sig.n_proj)

    def zero(self):
        return self.const(Fraction(0))

    def eval_term(self, t: Term, env: dict):
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise EvalError(f"unassigned variable {t.name}") from None
        if isinstance(t, Const):
            return self.const(t.value)
        if isinstance(t, Add):
            return self.eval_term(t.left, env).add(self.eval_term(t.right, env))
        if isinstance(t, Scale):
            return self.eval_term(t.arg, env).scale(t.coeff)
        if isinstance(t, Floor):
            return self.eval_term(t.arg, env).floor()
        if isinstance(t, Proj):
            x = self.eval_term(t.arg, env)
            if not isinstance(x, RootCombo):
                raise EvalError("projection applied outside the combo model")
            return x.proj(t.index)
        raise TypeError(t)

    def eval_atom(self, a, env: dict) -> bool:
        if isinstance(a, Lt):
            return el_cmp(self.eval_term(a.lhs, env), self.eval_term(a.rhs, env)) < 0
        if isinstance(a, Eq):
            return el_cmp(self.eval_term(a.lhs, env), self.eval_term(a.rhs, env)) == 0
        if isinstance(a, InZ):
            return self.eval_term(a.arg, env).is_integer()
        if isinstance(a, InQ):
            return self.eval_term(a.arg, env).is_rational()
        raise TypeError(a)

    def eval_qf(self, f: Formula, env: dict) -> bool:
        if isinstance(f, Top):
            return True
        if isinstance(f, Bot):
            return False
        if isinstance(f, Atomic):
            return self.eval_atom(f.atom, env)
        if isinstance(f, Not):
            return not self.eval_qf(f.arg, env)
        if isinstance(f, And):
            return self.eval_qf(f.left, env) and self.eval_qf(f.right, env)
        if isinstance(f, Or):
            return self.eval_qf(f.left, env) or self.eval_qf(f.right, env)
        if isinstance(f, (Exists, Forall)):
            raise EvalError("eval_qf expects a quantifier-free formula")
        raise TypeError(f)

    def sample(self, count: int, bound: int, seed: int) -> list:
        """Deterministic pseudo-random elements covering each stratum of the
        element kind (rational/irrational parts, integers)."""
        rng = random.Random(seed)

        def frac():
            return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))

        out = []
        for i in range(count):
            if self.kind == "int":
                out.append(RatPoint(Fraction(rng.randint(-bound, bound))))
            elif self.kind == "rat":
                if i % 3 == 0:
                    out.append(RatPoint(Fraction(rng.randint(-bound, bound))))
                else:
                    out.append(RatPoint(frac()))
            elif self.kind == "quad":
                stratum = i % 3
                if stratum == 0:
                    out.append(QuadPoint(frac(), Fraction(0)))
                elif stratum == 1:
                    out.append(QuadPoint(frac(), frac()))
                else:
                    b = Fraction(0)
                    while b == 0:
                        b = frac()
                    out.append(QuadPoint(Fraction(rng.randint(-bound, bound)), b))
            else:
                coeffs = []
                for j in range(self.sig.n_proj + 1):
                    if rng.random() < 0.3:
                        coeffs.append(Fraction(0))
                    else:
                        coeffs.append(frac())
                out.append(RootCombo(tuple(coeffs)))
        return out


def model_for(sig: Signature) -> OracleModel:
    if sig.n_proj:
        return OracleModel(sig, "combo")
    if sig.has_q:
        return OracleModel(sig, "quad")
    if sig.name == "presburger":
        return OracleModel(sig, "int")
    return OracleModel(sig, "rat")
