"""Constructive witness extraction for the existential engines.

``find_witness(var, f, params, sig)`` returns a model element ``w`` with
``f[var := w]`` true in the oracle model under ``params``.  The search
mirrors the elimination: per disjunct, the variable (and any fresh integer
unknowns its floors require) is eliminated symbolically; whenever a
residual conjunction checks out under the parameters, concrete values are
back-substituted level by level.  Every candidate is verified by exact
evaluation before being returned, so a successful call is sound by
construction.

Tie-breaking for interval picks: the midpoint when both bounds are proper
elements, otherwise the smallest-denominator rational in the interval
(Stern-Brocot mediant search with galloping, driven purely by exact
comparisons).
"""

from __future__ import annotations

from fractions import Fraction

from .models import OracleModel, QuadPoint, RootCombo, el_cmp, model_for
from .normal import expand, nt_without_var
from .qe import core
from .qe import cooper, coset, fm, hamel, mixed
from .terms import Formula, Signature


class WitnessError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# smallest-denominator rational search

def _gallop_max(pred) -> int:
    """Largest k >= 0 with pred(k), assuming pred(0) and pred eventually
    fails; doubling then binary search."""
    hi = 1
    while pred(hi):
        hi *= 2
    lo = hi // 2
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def simplest_rational(too_low, too_high) -> Fraction:
    """Smallest-denominator rational q with not too_low(q) and not
    too_high(q); the predicates must describe a non-empty open interval."""

    def inside(q):
        return not too_low(q) and not too_high(q)

    if inside(Fraction(0)):
        return Fraction(0)
    if too_high(Fraction(0)):
        # interval lies left of zero; mirror it
        return -simplest_rational(lambda q: too_high(-q), lambda q: too_low(-q))
    # find the integer floor of the interval's lower edge
    if too_low(Fraction(1)):
        n = _gallop_max(lambda k: too_low(Fraction(k)))
    else:
        n = 0
    if inside(Fraction(n + 1)):
        return Fraction(n + 1)
    # search strictly inside (n, n+1) by mediants with galloping
    a, b = n, 1      # a/b is <= the lower edge
    c, d = n + 1, 1  # c/d is >= the upper edge
    while True:
        # take as many steps toward the right endpoint as stay too low
        if too_low(Fraction(a + c, b + d)):
            k = _gallop_max(lambda k: too_low(Fraction(a + k * c, b + k * d)) if k else True)
            a, b = a + k * c, b + k * d
            m = Fraction(a + c, b + d)
            if inside(m):
                return m
            c, d = m.numerator, m.denominator
        elif too_high(Fraction(a + c, b + d)):
            k = _gallop_max(lambda k: too_high(Fraction(a * k + c, b * k + d)) if k else True)
            c, d = a * k + c, b * k + d
            m = Fraction(a + c, b + d)
            if inside(m):
                return m
            a, b = m.numerator, m.denominator
        else:
            return Fraction(a + c, b + d)


# ---------------------------------------------------------------------------

def _eval_conj(conj, env, model) -> bool:
    try:
        return model.eval_qf(core.conj_formula(conj), env)
    except Exception:
        return False


def _bounds_concrete(conj, var, env, model):
    """Evaluate the order bounds on ``var``: (lowers, uppers, eqs) as model
    elements with strictness flags."""
    lowers, uppers, eqs = [], [], []
    for nt, rel in conj.ord_lits():
        a = nt.coeff_of(var)
        if a == 0 or nt.floor_mentions(var):
            continue
        rest = model.eval_term(expand(nt_without_var(nt, var)), env)
        bound = rest.scale(Fraction(-1) / a)
        if rel == "eq":
            eqs.append(bound)
        elif a > 0:
            uppers.append((bound, rel == "lt"))
        else:
            lowers.append((bound, rel == "lt"))
    return lowers, uppers, eqs


def _interval(lowers, uppers):
    lo = None
    for b, s in lowers:
        if lo is None or el_cmp(b, lo[0]) > 0:
            lo = (b, s)
    hi = None
    for b, s in uppers:
        if hi is None or el_cmp(b, hi[0]) < 0:
            hi = (b, s)
    return lo, hi


def _candidates_real(conj, var, env, model):
    lowers, uppers, eqs = _bounds_concrete(conj, var, env, model)
    if eqs:
        return eqs
    lo, hi = _interval(lowers, uppers)
    qpos, qneg = [], []
    for pred, nt, pos in conj.mem_lits():
        if pred != "Q" or not nt.mentions(var):
            continue
        a = nt.coeff_of(var)
        if a == 0:
            continue
        rest = model.eval_term(expand(nt_without_var(nt, var)), env)
        (qpos if pos else qneg).append(rest.scale(Fraction(1) / a))
    one = model.const(Fraction(1))
    if qpos:
        # pinned to the coset -s + Q: walk it by rational offsets
        anchor = qpos[0].neg()

        def too_low(q):
            if lo is None:
                return False
            return el_cmp(anchor.add(model.const(q)), lo[0]) <= 0

        def too_high(q):
            if hi is None:
                return False
            return el_cmp(anchor.add(model.const(q)), hi[0]) >= 0

        if lo is not None and hi is not None and el_cmp(lo[0], hi[0]) >= 0:
            return []
        try:
            q = simplest_rational(too_low, too_high)
        except Exception:
            return []
        return [anchor.add(model.const(q))]
    base = []
    if lo is None and hi is None:
        base.append(model.const(Fraction(0)))
    elif lo is None:
        base.append(hi[0].sub(one))
    elif hi is None:
        base.append(lo[0].add(one))
    else:
        if el_cmp(lo[0], hi[0]) >= 0:
            return []
        base.append(lo[0].add(hi[0]).scale(Fraction(1, 2)))
    if not qneg:
        return base
    # dodge finitely many forbidden cosets with pairwise inequivalent nudges
    out = list(base)
    mid = base[0]
    room = None
    if lo is not None:
        room = mid.sub(lo[0])
    if hi is not None:
        gap = hi[0].sub(mid)
        if room is None or el_cmp(gap, room) < 0:
            room = gap
    for k in range(1, len(qneg) + 3):
        eps = Fraction(1, 2 ** k)
        while room is not None and el_cmp(model.const(eps), room) >= 0:
            eps /= 2
        if isinstance(mid, QuadPoint):
            out.append(mid.add(QuadPoint(Fraction(0), eps)))
        else:
            out.append(mid.add(model.const(eps)))
    return out


def _candidates_int(conj, var, env, model):
    delta = 1
    for pred, nt, pos in conj.mem_lits():
        if pred == "Z" and nt.mentions(var):
            a = nt.coeff_of(var)
            if a != 0:
                delta = _lcm(delta, a.denominator)
    window = 2 * delta + 2
    lowers, uppers, eqs = _bounds_concrete(conj, var, env, model)
    anchors = [Fraction(0)]
    for b, _ in lowers + uppers:
        anchors.append(_el_floor(b, model))
    for b in eqs:
        anchors.append(_el_floor(b, model))
    seen = set()
    out = []
    for n in anchors:
        for j in range(-window, window + 1):
            v = n + j
            if v not in seen:
                seen.add(v)
                out.append(model.const(v))
    return out


def _el_floor(el, model) -> Fraction:
    try:
        fl = el.floor()
        return fl.value if hasattr(fl, "value") else fl.a
    except Exception:
        # element kind without a floor: gallop on exact comparisons
        if el_cmp(el, model.const(Fraction(0))) >= 0:
            return Fraction(_gallop_max(
                lambda k: el_cmp(model.const(Fraction(k)), el) <= 0))
        # for el < 0: m = floor(-el), then floor(el) is -m when el is an
        # integer and -(m+1) otherwise
        m = Fraction(_gallop_max(
            lambda k: el_cmp(model.const(Fraction(-k)), el) >= 0))
        if el_cmp(model.const(-m), el) == 0:
            return -m
        return -m - 1


def _lcm(a, b):
    import math
    return math.lcm(a, b)


def _candidates_component(conj, name, kind, env, model):
    """Values for one projection-component unknown: rational multiples of
    the kind's basis direction (the kernel uses plain rationals)."""
    n = model.sig.n_proj

    def embed(q: Fraction) -> RootCombo:
        coeffs = [Fraction(0)] * (n + 1)
        coeffs[kind if kind > 0 else 0] = q
        return RootCombo(tuple(coeffs))

    lowers, uppers, eqs = _bounds_concrete(conj, name, env, model)
    if eqs:
        return eqs
    lo, hi = _interval(lowers, uppers)
    if lo is not None and hi is not None and el_cmp(lo[0], hi[0]) >= 0:
        return []

    def too_low(q):
        return lo is not None and el_cmp(embed(q), lo[0]) <= 0

    def too_high(q):
        return hi is not None and el_cmp(embed(q), hi[0]) >= 0

    try:
        return [embed(simplest_rational(too_low, too_high))]
    except Exception:
        return []


# ---------------------------------------------------------------------------

def _sym_step(conj, var, sig, kinds):
    if kinds is not None and var in kinds:
        return hamel._elim_one(conj, var, kinds, sig.n_proj)
    if var in conj.int_vars() and sig.name != "presburger":
        return cooper.eliminate(conj, var, integer_mode=False)
    if sig.name == "doag":
        return fm.eliminate(conj, var)
    if sig.name == "presburger":
        return cooper.eliminate(conj, var, integer_mode=True)
    if sig.name == "t1":
        return coset.eliminate(conj, var)
    if sig.name in ("t0", "t"):
        if sig.has_q:
            return coset.eliminate(conj, var)
        return fm.eliminate(conj, var)
    raise WitnessError(f"no symbolic step for {sig}")


def _concrete(conj, var, sig, env, model, kinds):
    if kinds is not None and var in kinds:
        return _candidates_component(conj, var, kinds[var], env, model)
    if sig.name == "presburger" or var in conj.int_vars():
        return _candidates_int(conj, var, env, model)
    return _candidates_real(conj, var, env, model)


def _chain(conj, order, sig, env, model, kinds):
    """Solve the unknowns in ``order`` (first entry eliminated first, hence
    assigned last); returns an extended environment or None."""
    if not order:
        return env if _eval_conj(conj, env, model) else None
    var, rest = order[0], order[1:]
    if not conj.mentions(var):
        env2 = _chain(conj, rest, sig, env, model, kinds)
        if env2 is None:
            return None
        env2 = dict(env2)
        env2[var] = model.const(Fraction(0))
        return env2
    for res in _sym_step(conj, var, sig, kinds):
        if not res.ok:
            continue
        env2 = _chain(res, rest, sig, env, model, kinds)
        if env2 is None:
            continue
        for cand in _concrete(conj, var, sig, env2, model, kinds):
            env3 = dict(env2)
            env3[var] = cand
            if _eval_conj(conj, env3, model):
                return env3
    return None


def _witness_conj(conj, var, sig, env, model):
    if sig.n_proj:
        setup = hamel.component_setup(conj, var, sig)
        if setup is None:
            return None
        c0, comp_names, kinds = setup
        order = list(comp_names.values())
        env2 = _chain(c0, order, sig, env, model, kinds)
        if env2 is None:
            return None
        out = model.const(Fraction(0))
        for name in comp_names.values():
            out = out.add(env2[name])
        return out
    if sig.has_floor:
        for c0, k, u, mult, shift in mixed.preprocess(conj, var, sig):
            env2 = _chain(c0, [u, k], sig, dict(env), model, None)
            if env2 is not None:
                return (env2[k].scale(Fraction(mult))
                        .add(env2[u]).add(model.const(shift)))
        return None
    env2 = _chain(conj, [var], sig, env, model, None)
    return None if env2 is None else env2[var]


def find_witness(var: str, f: Formula, params: dict, sig: Signature,
                 model: OracleModel | None = None):
    """A model element ``w`` with ``f[var := w]`` true under ``params``.

    ``f`` must be quantifier-free.  Raises :class:`WitnessError` when no
    witness is found (given a correct engine this means none exists)."""
    if model is None:
        model = model_for(sig)
    for conj in core.to_dnf(f, sig):
        if not conj.ok:
            continue
        w = _witness_conj(conj, var, sig, dict(params), model)
        if w is not None:
            env = dict(params)
            env[var] = w
            if model.eval_qf(f, env):
                return w
    raise WitnessError(f"no witness found for {var}")
