"""Seeded random formulas and differential soundness checks.

The differential protocol, per formula ``E x. body`` (body possibly holding
one more quantifier):

* eliminate the inner quantifier, then the outer one;
* under sampled parameter environments, if the eliminated formula is true
  the witness finder must produce a verified witness for the body; if it is
  false, a batch of sampled points must all falsify the body;
* for the pure integer signature, additionally relativize every quantifier
  to a small box and compare the decision procedure against brute force.

All checks are one-sided but together they pin the engines from both
directions: a spurious "true" fails witness extraction, a spurious "false"
dies on a sampled witness or on the brute-force box.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .models import model_for
from .parser import print_formula
from .qe import core, decide, qe, simplify
from .terms import (
    Add, And, Atomic, Bot, Const, Eq, Exists, Floor, Forall, Formula, InQ,
    InZ, Lt, Not, Or, Proj, Scale, Signature, Term, Top, Var, free_vars,
    substitute,
)
from .witness import WitnessError, find_witness

SCALAR_POOL = [Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2),
               Fraction(2), Fraction(-2), Fraction(3)]


class FormulaGen:
    """Seeded signature-aware generator: term depth <= 3, at most two
    quantifiers, scalars from the fixed pool."""

    def __init__(self, sig: Signature, seed: int):
        self.sig = sig
        self.rng = random.Random(seed)

    def term(self, vars_, depth=0) -> Term:
        r = self.rng
        if depth >= 3 or r.random() < 0.35:
            if vars_ and r.random() < 0.72:
                return Var(r.choice(vars_))
            return Const(r.choice(SCALAR_POOL + [Fraction(0)]))
        roll = r.random()
        if roll < 0.40:
            return Add(self.term(vars_, depth + 1), self.term(vars_, depth + 1))
        if roll < 0.65:
            return Scale(r.choice(SCALAR_POOL), self.term(vars_, depth + 1))
        if self.sig.has_floor and roll < 0.82:
            return Floor(self.term(vars_, depth + 1))
        if self.sig.n_proj and roll < 0.82:
            return Proj(r.randint(1, self.sig.n_proj), self.term(vars_, depth + 1))
        return Add(self.term(vars_, depth + 1), self.term(vars_, depth + 1))

    def atom(self, vars_) -> Formula:
        r = self.rng
        t = self.term(vars_)
        roll = r.random()
        if roll < 0.48:
            return Atomic(Lt(t, self.term(vars_)))
        if roll < 0.62:
            return Atomic(Eq(t, self.term(vars_)))
        if self.sig.has_z and roll < 0.84:
            return Atomic(InZ(t))
        if self.sig.has_q:
            return Atomic(InQ(t))
        return Atomic(Lt(t, self.term(vars_)))

    def qf(self, vars_, depth=0) -> Formula:
        r = self.rng
        if depth >= 2 or r.random() < 0.45:
            return self.atom(vars_)
        roll = r.random()
        if roll < 0.38:
            return And(self.qf(vars_, depth + 1), self.qf(vars_, depth + 1))
        if roll < 0.76:
            return Or(self.qf(vars_, depth + 1), self.qf(vars_, depth + 1))
        return Not(self.qf(vars_, depth + 1))

    def formula(self) -> Formula:
        """``E x. body`` with 0-2 parameters and possibly one inner
        quantifier."""
        r = self.rng
        params = [f"y{i}" for i in range(r.randint(0, 2))]
        if r.random() < 0.4:
            inner_var = "v"
            matrix = self.qf(["x", inner_var] + params)
            quant = Exists if r.random() < 0.6 else Forall
            body = And(self.qf(["x"] + params), quant(inner_var, matrix)) \
                if r.random() < 0.5 else quant(inner_var, matrix)
        else:
            body = self.qf(["x"] + params)
        return Exists("x", body)


def differential_one(orig: Exists, sig: Signature, model, env_pool,
                     refute_points, rng) -> str | None:
    """Run the protocol on one formula; None or a failure message."""
    body_qf = simplify(qe(orig.body, sig))
    elim = core.eliminate_exists("x", body_qf, sig)
    if "x" in free_vars(elim):
        return "eliminated form still mentions the variable"
    params = sorted(free_vars(orig))
    for _ in range(2):
        env = {p: rng.choice(env_pool) for p in params}
        val = model.eval_qf(elim, env)
        if val:
            try:
                w = find_witness("x", body_qf, env, sig, model)
            except WitnessError:
                return (f"eliminated form true but no witness under "
                        f"{[(p, str(v)) for p, v in env.items()]}")
            env2 = dict(env)
            env2["x"] = w
            if not model.eval_qf(body_qf, env2):
                return "witness failed verification"
        else:
            for p in refute_points:
                env2 = dict(env)
                env2["x"] = p
                if model.eval_qf(body_qf, env2):
                    return (f"eliminated form false but {p} satisfies the "
                            f"body under {[(q, str(v)) for q, v in env.items()]}")
    return None


def differential_run(sig: Signature, n_formulas: int, seed: int,
                     n_refute: int = 200):
    """Returns (checked, list of (formula, message) failures)."""
    model = model_for(sig)
    env_pool = model.sample(64, 6, seed ^ 0x5EED)
    refute_points = model.sample(n_refute, 8, seed ^ 0xF00D)
    failures = []
    for i in range(n_formulas):
        gen = FormulaGen(sig, seed * 1000003 + i)
        orig = gen.formula()
        rng = random.Random(seed * 7 + i)
        try:
            msg = differential_one(orig, sig, model, env_pool,
                                   refute_points, rng)
        except Exception as e:
            msg = f"engine raised {e!r}"
        if msg is not None:
            failures.append((print_formula(orig), msg))
    return n_formulas, failures


# ---------------------------------------------------------------------------
# bounded brute force for the pure integer signature

def _feval_term(t: Term, env) -> Fraction:
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Add):
        return _feval_term(t.left, env) + _feval_term(t.right, env)
    if isinstance(t, Scale):
        return t.coeff * _feval_term(t.arg, env)
    raise TypeError(t)


def brute_eval(f: Formula, env, lo: int, hi: int) -> bool:
    """Truth over the box: quantifiers range over the integers in
    [lo, hi]."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Atomic):
        a = f.atom
        if isinstance(a, Lt):
            return _feval_term(a.lhs, env) < _feval_term(a.rhs, env)
        if isinstance(a, Eq):
            return _feval_term(a.lhs, env) == _feval_term(a.rhs, env)
        if isinstance(a, InZ):
            return _feval_term(a.arg, env).denominator == 1
        raise TypeError(a)
    if isinstance(f, Not):
        return not brute_eval(f.arg, env, lo, hi)
    if isinstance(f, And):
        return brute_eval(f.left, env, lo, hi) and brute_eval(f.right, env, lo, hi)
    if isinstance(f, Or):
        return brute_eval(f.left, env, lo, hi) or brute_eval(f.right, env, lo, hi)
    if isinstance(f, Exists):
        return any(brute_eval(f.body, {**env, f.var: Fraction(k)}, lo, hi)
                   for k in range(lo, hi + 1))
    if isinstance(f, Forall):
        return all(brute_eval(f.body, {**env, f.var: Fraction(k)}, lo, hi)
                   for k in range(lo, hi + 1))
    raise TypeError(f)


def relativize(f: Formula, lo: int, hi: int) -> Formula:
    """Bound every quantifier to [lo, hi] syntactically."""
    box = lambda v: And(Not(Atomic(Lt(Var(v), Const(Fraction(lo))))),
                        Not(Atomic(Lt(Const(Fraction(hi)), Var(v)))))
    if isinstance(f, (Top, Bot, Atomic)):
        return f
    if isinstance(f, Not):
        return Not(relativize(f.arg, lo, hi))
    if isinstance(f, And):
        return And(relativize(f.left, lo, hi), relativize(f.right, lo, hi))
    if isinstance(f, Or):
        return Or(relativize(f.left, lo, hi), relativize(f.right, lo, hi))
    if isinstance(f, Exists):
        return Exists(f.var, And(box(f.var), relativize(f.body, lo, hi)))
    if isinstance(f, Forall):
        return Forall(f.var, Or(Not(box(f.var)), relativize(f.body, lo, hi)))
    raise TypeError(f)


def presburger_box_check(f: Formula, sig: Signature, seed: int,
                         lo: int = -8, hi: int = 8) -> str | None:
    """Exhaustive agreement of the decision procedure with brute force on
    the relativized formula; parameters drawn from the box."""
    rng = random.Random(seed)
    params = sorted(free_vars(f))
    env = {p: Fraction(rng.randint(lo, hi)) for p in params}
    closed = relativize(f, lo, hi)
    for p, v in env.items():
        closed = substitute(closed, p, Const(v))
    want = brute_eval(f, env, lo, hi)
    got = decide(closed, sig)
    if want != got:
        return (f"box disagreement: brute={want} decide={got} under "
                f"{sorted((p, str(v)) for p, v in env.items())}")
    return None
