"""Shared machinery for the elimination engines.

Quantifier-free formulas are worked on in disjunctive normal form.  A
:class:`Conj` is a conjunction of literals kept in a canonical indexed form:

* order literals ``t < 0``, ``t <= 0``, ``t = 0`` are grouped by the
  variable profile of ``t`` (the term with its constant stripped) and stored
  as interval bounds on that profile, so contradictory combinations are
  detected the moment they are added;
* membership literals ``Z(t)``/``Q(t)`` (possibly negated) are stored under
  a canonical key that quotients out the invariances of the predicate
  (``Q`` is closed under rational scaling and shifting by any rational or
  any integer-part term; ``Z`` under negation and integer shifts).

Early pruning is what keeps the pattern checks cheap: sibling negations in
a deep pattern tree produce thousands of raw conjuncts, almost all of which
die on an empty interval.
"""

from __future__ import annotations

import math
from fractions import Fraction

from ..normal import (
    NormalTerm, expand, normalize_term, nt_add, nt_const, nt_scale, nt_sub,
    nt_subst_linear, nt_var,
)
from ..terms import (
    And, Atomic, Bot, Const, Eq, Exists, Forall, Formula, InQ, InZ, Lt, Not,
    Or, Signature, Term, Top, Var, and_all, or_all,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)

# signatures where a weak bound can stay a single literal; the dense-coset
# and projection engines need strict/equality case splits instead
_WEAK_OK = {"doag", "presburger", "t0"}


class EngineError(RuntimeError):
    """Internal invariant violation inside an elimination engine."""


def _leading_coeff(nt: NormalTerm) -> Fraction:
    if nt.linear:
        return nt.linear[0][1]
    if nt.proj_parts:
        return nt.proj_parts[0][1]
    if nt.floor_parts:
        return nt.floor_parts[0][0]
    return _ZERO


class _Bounds:
    __slots__ = ("lo", "hi", "eq")

    def __init__(self):
        self.lo = None  # (value, strict)
        self.hi = None
        self.eq = None


_frac_range_memo = {}


def _frac_range(nt: NormalTerm):
    """Open interval (A, B) containing the value of ``nt`` whenever its
    floors cancel against its linear part, else None.

    Substituting ``floor(s) = s - f`` with ``f in [0, 1)`` repeatedly, a
    term like ``2x - floor(2x) - 1`` reduces to a constant plus a signed sum
    of fractional parts, hence ranges over a known interval.  This is how
    negated floor tautologies die without unfolding anything.  Takes the
    constant-free profile; the caller shifts by its own constant.
    """
    profile = nt
    hit = _frac_range_memo.get(profile)
    if hit is None:
        s_plus = s_minus = _ZERO
        cur = profile
        for _ in range(8):
            if not cur.floor_parts:
                break
            parts = cur.floor_parts
            cur = NormalTerm((), cur.proj_parts, cur.linear, cur.const)
            for c, arg in parts:
                if c > 0:
                    s_plus += c
                else:
                    s_minus -= c
                cur = nt_add(cur, nt_scale(c, normalize_term(arg)))
        if cur.floor_parts or cur.proj_parts or cur.linear:
            hit = (False,)
        else:
            # the endpoint is attained (all fractional parts zero) exactly
            # when no coefficient pulls in that direction
            hit = (True, cur.const - s_plus, cur.const + s_minus,
                   s_plus > 0, s_minus > 0)
        _frac_range_memo[profile] = hit
    if not hit[0]:
        return None
    return hit[1], hit[2], hit[3], hit[4]


class Conj:
    """A conjunction of canonical literals with eager contradiction checks."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self.ord = {}  # profile NormalTerm -> _Bounds
        self.mem = {}  # (pred, canon NormalTerm) -> polarity
        self.qspan = []  # echelon basis of the positive Q literals
        self.ok = True

    # -- adding literals ---------------------------------------------------

    def add_ord(self, nt: NormalTerm, rel: str) -> bool:
        """Add ``nt rel 0`` with rel one of 'lt', 'le', 'eq'."""
        if not self.ok:
            return False
        if nt.is_constant:
            c = nt.const
            good = c < 0 if rel == "lt" else (c <= 0 if rel == "le" else c == 0)
            if not good:
                self.ok = False
            return self.ok
        profile = NormalTerm(nt.floor_parts, nt.proj_parts, nt.linear, _ZERO)
        if nt.floor_parts:
            rng = _frac_range(profile)
            if rng is not None:
                lo, hi, lo_open, hi_open = rng
                lo += nt.const
                hi += nt.const
                if rel == "eq":
                    if lo > 0 or hi < 0 or (lo == 0 and lo_open) \
                            or (hi == 0 and hi_open):
                        self.ok = False
                        return False
                elif rel == "lt":
                    if hi < 0 or (hi == 0 and hi_open):
                        return True  # implied by the floor ranges, drop it
                    if lo >= 0:
                        self.ok = False
                        return False
                else:
                    if hi <= 0:
                        return True
                    if lo > 0 or (lo == 0 and lo_open):
                        self.ok = False
                        return False
        c = -nt.const
        flip = _leading_coeff(profile) < 0
        if flip:
            profile = nt_scale(Fraction(-1), profile)
            c = -c
        b = self.ord.get(profile)
        if b is None:
            b = self.ord[profile] = _Bounds()
        if rel == "eq":
            if b.eq is not None and b.eq != c:
                self.ok = False
                return False
            b.eq = c
        else:
            strict = rel == "lt"
            upper = not flip  # profile < c, unless the literal was negated
            if upper:
                if b.hi is None or c < b.hi[0] or (c == b.hi[0] and strict):
                    b.hi = (c, strict)
            else:
                if b.lo is None or c > b.lo[0] or (c == b.lo[0] and strict):
                    b.lo = (c, strict)
        return self._check(b)

    def _check(self, b: _Bounds) -> bool:
        if b.lo is not None and b.hi is not None:
            if b.lo[0] > b.hi[0]:
                self.ok = False
            elif b.lo[0] == b.hi[0] and (b.lo[1] or b.hi[1]):
                self.ok = False
        if b.eq is not None:
            if b.lo is not None and (b.eq < b.lo[0] or (b.eq == b.lo[0] and b.lo[1])):
                self.ok = False
            if b.hi is not None and (b.eq > b.hi[0] or (b.eq == b.hi[0] and b.hi[1])):
                self.ok = False
        return self.ok

    def add_mem(self, pred: str, nt: NormalTerm, pos: bool) -> bool:
        if not self.ok:
            return False
        folded = _canon_mem(pred, nt, self.sig)
        if isinstance(folded, bool):
            if folded != pos:
                self.ok = False
            return self.ok
        key = (pred, folded)
        old = self.mem.get(key)
        if old is None:
            # Q is a subgroup closed under rational scaling, so positive Q
            # literals span a rational subspace; tracking an echelon basis
            # lets Q(a), Q(b), ~Q(a - b) die as the contradiction it is
            if pred == "Q":
                red = _q_reduce(folded, self.qspan)
                if red.is_zero:
                    if not pos:
                        self.ok = False
                    return self.ok
                if pos:
                    _, lead = _q_lead(red)
                    self.qspan.append(nt_scale(1 / lead, red))
                    for (p2, nt2), pos2 in self.mem.items():
                        if p2 == "Q" and not pos2 \
                                and _q_reduce(nt2, self.qspan).is_zero:
                            self.ok = False
                            return False
            self.mem[key] = pos
        elif old != pos:
            self.ok = False
        return self.ok

    def add(self, lit) -> bool:
        if lit[0] == "ord":
            return self.add_ord(lit[1], lit[2])
        return self.add_mem(lit[1], lit[2], lit[3])

    # -- reading literals back ---------------------------------------------

    def ord_lits(self):
        """Yield (nt, rel) pairs meaning ``nt rel 0``."""
        out = []
        for profile, b in self.ord.items():
            if b.eq is not None:
                out.append((nt_add(profile, nt_const(-b.eq)), "eq"))
                continue
            if (b.lo is not None and b.hi is not None
                    and b.lo[0] == b.hi[0] and not b.lo[1] and not b.hi[1]):
                out.append((nt_add(profile, nt_const(-b.lo[0])), "eq"))
                continue
            if b.hi is not None:
                out.append((nt_add(profile, nt_const(-b.hi[0])),
                            "lt" if b.hi[1] else "le"))
            if b.lo is not None:
                out.append((nt_sub(nt_const(b.lo[0]), profile),
                            "lt" if b.lo[1] else "le"))
        return out

    def mem_lits(self):
        return [(pred, nt, pos) for (pred, nt), pos in self.mem.items()]

    def all_lits(self):
        out = [("ord", nt, rel) for nt, rel in self.ord_lits()]
        out.extend(("mem", p, nt, pos) for p, nt, pos in self.mem_lits())
        return out

    # -- queries -----------------------------------------------------------

    def mentions(self, var: str) -> bool:
        return (any(p.mentions(var) for p in self.ord)
                or any(nt.mentions(var) for _, nt in self.mem))

    def vars(self) -> set:
        out = set()
        for p in self.ord:
            out |= p.vars()
        for _, nt in self.mem:
            out |= nt.vars()
        return out

    def int_vars(self) -> set:
        """Variables asserted integral by a bare positive Z literal."""
        out = set()
        for (pred, nt), pos in self.mem.items():
            if pred == "Z" and pos and not nt.floor_parts and not nt.proj_parts \
                    and len(nt.linear) == 1 and nt.const == 0 \
                    and abs(nt.linear[0][1]) == 1:
                out.add(nt.linear[0][0])
        return out

    def copy(self) -> "Conj":
        out = Conj(self.sig)
        for profile, b in self.ord.items():
            nb = _Bounds()
            nb.lo, nb.hi, nb.eq = b.lo, b.hi, b.eq
            out.ord[profile] = nb
        out.mem = dict(self.mem)
        out.qspan = list(self.qspan)
        out.ok = self.ok
        return out

    def merged(self, other: "Conj"):
        out = self.copy()
        for lit in other.all_lits():
            if not out.add(lit):
                return None
        return out

    def subst(self, var: str, repl: NormalTerm):
        """Substitute a linear occurrence; None on contradiction."""
        out = Conj(self.sig)
        for lit in self.all_lits():
            nt = lit[1] if lit[0] == "ord" else lit[2]
            if nt.mentions(var):
                if nt.floor_mentions(var):
                    nt = _subst_under_floors(nt, var, repl)
                else:
                    nt = nt_subst_linear(nt, var, repl)
            if lit[0] == "ord":
                ok = out.add_ord(nt, lit[2])
            else:
                ok = out.add_mem(lit[1], nt, lit[3])
            if not ok:
                return None
        return out


def _subst_under_floors(nt: NormalTerm, var: str, repl: NormalTerm) -> NormalTerm:
    from ..terms import subst_term
    t = subst_term(expand(nt), var, expand(repl))
    return normalize_term(t)


def _q_lead(nt: NormalTerm):
    """Pivot coordinate and coefficient of a (floor-free) Q vector."""
    if nt.linear:
        return ("l", nt.linear[0][0]), nt.linear[0][1]
    return ("p", nt.proj_parts[0][0]), nt.proj_parts[0][1]


def _q_coord(nt: NormalTerm, key) -> Fraction:
    kind, k = key
    if kind == "l":
        return nt.coeff_of(k)
    for kk, c in nt.proj_parts:
        if kk == k:
            return c
    return _ZERO


def _q_reduce(nt: NormalTerm, basis) -> NormalTerm:
    for b in basis:
        c = _q_coord(nt, _q_lead(b)[0])
        if c:
            nt = nt_sub(nt, nt_scale(c, b))
    return nt


def _canon_mem(pred: str, nt: NormalTerm, sig: Signature):
    """Canonical key for a membership literal; True when it folds away."""
    if pred == "Q":
        # Q absorbs rational shifts, integer-part terms and rational scalings
        nt = NormalTerm((), nt.proj_parts, nt.linear, _ZERO)
        if nt.is_zero:
            return True
        lead = _leading_coeff(nt)
        return nt_scale(1 / lead, nt)
    # Z absorbs integer shifts, whole floor summands and negation; under the
    # pure integer signature every variable is integral, so unit-denominator
    # linear parts fold away too
    floors = tuple((c, a) for c, a in nt.floor_parts if c.denominator != 1)
    linear = nt.linear
    if sig.name == "presburger":
        linear = tuple((v, c) for v, c in linear if c.denominator != 1)
    const = nt.const - nt.const.__floor__()
    nt = NormalTerm(floors, nt.proj_parts, linear, const)
    if nt.is_constant:
        return nt.const == 0
    if sig.name == "presburger" and not floors and const:
        # over integer assignments the linear part ranges over (1/L)Z, so a
        # constant outside that lattice makes the literal identically false
        L = 1
        for _, c in linear:
            L = L * c.denominator // math.gcd(L, c.denominator)
        if (const * L).denominator != 1:
            return False
    if _leading_coeff(nt) < 0:
        nt = nt_scale(Fraction(-1), nt)
        const = nt.const - nt.const.__floor__()
        nt = NormalTerm(nt.floor_parts, nt.proj_parts, nt.linear, const)
    return nt


# ---------------------------------------------------------------------------
# DNF conversion

def atom_lits(atom, pos: bool, weak_ok: bool):
    """Branches for one literal; each branch is a list of canonical lits."""
    if isinstance(atom, Lt):
        nt = nt_sub(normalize_term(atom.lhs), normalize_term(atom.rhs))
        if pos:
            return [[("ord", nt, "lt")]]
        swapped = nt_scale(Fraction(-1), nt)  # rhs - lhs <= 0
        if weak_ok:
            return [[("ord", swapped, "le")]]
        return [[("ord", swapped, "lt")], [("ord", swapped, "eq")]]
    if isinstance(atom, Eq):
        nt = nt_sub(normalize_term(atom.lhs), normalize_term(atom.rhs))
        if pos:
            return [[("ord", nt, "eq")]]
        return [[("ord", nt, "lt")],
                [("ord", nt_scale(Fraction(-1), nt), "lt")]]
    if isinstance(atom, InZ):
        return [[("mem", "Z", normalize_term(atom.arg), pos)]]
    if isinstance(atom, InQ):
        return [[("mem", "Q", normalize_term(atom.arg), pos)]]
    raise TypeError(atom)


def _interval_covers(a: _Bounds, b: _Bounds) -> bool:
    """True when b's interval sits inside a's."""
    def norm(x):
        if x.eq is not None:
            return x.eq, False, x.eq, False
        return ((x.lo[0] if x.lo else None), (x.lo[1] if x.lo else False),
                (x.hi[0] if x.hi else None), (x.hi[1] if x.hi else False))
    alo, alos, ahi, ahis = norm(a)
    blo, blos, bhi, bhis = norm(b)
    if alo is not None:
        if blo is None or blo < alo or (blo == alo and alos and not blos):
            return False
    if ahi is not None:
        if bhi is None or bhi > ahi or (bhi == ahi and ahis and not bhis):
            return False
    return True


def _subsumes(a: Conj, b: Conj) -> bool:
    """Every point of b satisfies a: a's constraints are a weaker subset."""
    for key, pos in a.mem.items():
        if b.mem.get(key) is not pos:
            return False
    for profile, ba in a.ord.items():
        bb = b.ord.get(profile)
        if bb is None or not _interval_covers(ba, bb):
            return False
    return True


def _ival(b: _Bounds):
    if b.eq is not None:
        return b.eq, False, b.eq, False
    return ((b.lo[0] if b.lo else None), (b.lo[1] if b.lo else False),
            (b.hi[0] if b.hi else None), (b.hi[1] if b.hi else False))


def _union_bounds(a: _Bounds, b: _Bounds):
    """The union of two intervals when it is again an interval, else None."""
    alo, alos, ahi, ahis = _ival(a)
    blo, blos, bhi, bhis = _ival(b)

    def starts_before(x, xs, y, ys):
        if x is None:
            return True
        if y is None:
            return False
        return x < y or (x == y and (not xs or ys))

    if not starts_before(alo, alos, blo, blos):
        alo, alos, ahi, ahis, blo, blos, bhi, bhis = \
            blo, blos, bhi, bhis, alo, alos, ahi, ahis
    if ahi is not None and blo is not None:
        if blo > ahi or (blo == ahi and blos and ahis):
            return None  # disjoint, or touching with the point excluded
    out = _Bounds()
    if alo is not None:
        out.lo = (alo, alos)
    if ahi is not None and bhi is not None:
        if ahi > bhi or (ahi == bhi and not ahis):
            out.hi = (ahi, ahis)
        else:
            out.hi = (bhi, bhis)
    if out.lo and out.hi and out.lo[0] == out.hi[0]:
        out.eq, out.lo, out.hi = out.lo[0], None, None
    return out


def _coalesce(group, profiles) -> list:
    """Merge conjuncts differing only in one profile's interval.

    Within a shape group this folds ``t < 0 or t = 0`` back into a weak
    bound and unions split-off subintervals, which is what keeps negation
    of a many-celled DNF from going combinatorial.
    """
    changed = True
    while changed and len(group) > 1:
        changed = False
        for p in profiles:
            buckets = {}
            out = []
            for c in group:
                if p not in c.ord:
                    out.append(c)
                    continue
                rest = frozenset((q, b.lo, b.hi, b.eq)
                                 for q, b in c.ord.items() if q != p)
                buckets.setdefault(rest, []).append(c)
            merged_any = False
            for bucket in buckets.values():
                while len(bucket) > 1:
                    done = True
                    for i in range(len(bucket)):
                        for j in range(i + 1, len(bucket)):
                            u = _union_bounds(bucket[i].ord[p], bucket[j].ord[p])
                            if u is None:
                                continue
                            m = bucket[i].copy()
                            bucket[j:j + 1] = []
                            if u.lo is None and u.hi is None and u.eq is None:
                                del m.ord[p]  # the union is the whole line
                                del bucket[i]
                                out.append(m)
                            else:
                                m.ord[p] = u
                                bucket[i] = m
                            done = False
                            merged_any = True
                            break
                        if not done:
                            break
                    if done:
                        break
                out.extend(bucket)
            group = out
            changed = changed or merged_any
    return group


def prune(conjs) -> list:
    """Drop duplicate and subsumed conjuncts, preserving the disjunction.

    A conjunct constraining a superset of another's profiles, each to a
    sub-interval, describes a subset of its points and contributes nothing
    to the union.  This is what keeps negated inner quantifiers and the
    candidate cascades of the integer step from exploding.
    """
    seen = {}
    for c in conjs:
        k = (frozenset((p, b.lo, b.hi, b.eq) for p, b in c.ord.items()),
             frozenset(c.mem.items()))
        seen.setdefault(k, c)
    # pass 1: conjuncts constraining the same profiles differ only in the
    # intervals, so dominance within a shape group is cheap to sweep
    groups = {}
    for (_, memk), c in seen.items():
        gk = (frozenset(c.ord), memk)
        groups.setdefault(gk, []).append(c)
    items = []
    for (profiles, _), group in groups.items():
        kept = []
        for c in group:
            if any(_subsumes(a, c) for a in kept):
                continue
            kept = [a for a in kept if not _subsumes(c, a)]
            kept.append(c)
        if len(kept) > 1:
            kept = _coalesce(kept, list(profiles))
        items.extend(kept)
    # pass 2: cross-shape subsumption, worth its quadratic cost only while
    # the list is short
    if len(items) > 600:
        return items
    items.sort(key=lambda c: len(c.ord) + len(c.mem))
    kept = []
    for c in items:
        if any(_subsumes(a, c) for a in kept):
            continue
        kept.append(c)
    return kept


def _contains(b: _Bounds, v) -> bool:
    lo, los, hi, his = _ival(b)
    if lo is not None and (v < lo or (v == lo and los)):
        return False
    if hi is not None and (v > hi or (v == hi and his)):
        return False
    return True


def covers_all(cells) -> bool:
    """Sound test that the union of the conjuncts is the whole space.

    Profiles are treated as independent axes and membership keys as free
    booleans, so a True answer is always correct while dependencies between
    profiles can only cause a pessimistic False.  Negating a large DNF that
    happens to be a tautology is the case this rescues.
    """
    start = [(dict(c.ord), dict(c.mem)) for c in cells if c.ok]

    def freeze(cs):
        return frozenset(
            (frozenset((p, b.lo, b.hi, b.eq) for p, b in o.items()),
             frozenset(m.items())) for o, m in cs)

    memo = {}

    def go(cs):
        for o, m in cs:
            if not o and not m:
                return True
        if not cs:
            return False
        key = freeze(cs)
        if key in memo:
            return memo[key]
        o0, m0 = cs[0]
        if m0:
            mk = next(iter(m0))
            ans = True
            for val in (True, False):
                sub = []
                for o, m in cs:
                    if mk in m:
                        if m[mk] != val:
                            continue
                        m = {k: v for k, v in m.items() if k != mk}
                    sub.append((o, m))
                if not go(sub):
                    ans = False
                    break
            memo[key] = ans
            return ans
        p = next(iter(o0))
        pts = set()
        for o, _ in cs:
            b = o.get(p)
            if b is not None:
                lo, _, hi, _ = _ival(b)
                if lo is not None:
                    pts.add(lo)
                if hi is not None:
                    pts.add(hi)
        pts = sorted(pts)
        samples = [pts[0] - 1]
        for i, t in enumerate(pts):
            samples.append(t)
            samples.append((t + pts[i + 1]) / 2 if i + 1 < len(pts) else t + 1)
        ans = True
        for v in samples:
            sub = []
            for o, m in cs:
                b = o.get(p)
                if b is not None:
                    if not _contains(b, v):
                        continue
                    o = {q: bb for q, bb in o.items() if q != p}
                sub.append((o, m))
            if not go(sub):
                ans = False
                break
        memo[key] = ans
        return ans

    return go(start)


def _neg_lit(lit, weak_ok):
    """Branches (literal lists) covering the negation of one literal."""
    if lit[0] == "mem":
        return [[("mem", lit[1], lit[2], not lit[3])]]
    _, nt, rel = lit
    neg = nt_scale(Fraction(-1), nt)
    if rel == "lt":
        if weak_ok:
            return [[("ord", neg, "le")]]
        return [[("ord", neg, "lt")], [("ord", nt, "eq")]]
    if rel == "le":
        return [[("ord", neg, "lt")]]
    return [[("ord", nt, "lt")], [("ord", neg, "lt")]]


def neg_cells(cells, sig: Signature) -> list:
    """DNF of the negation of a disjunction of conjuncts.

    Case-splits on the literal shared by the most cells: under the literal
    the cells containing it lose it, under its negation they vanish.  Shared
    guards (a divisibility split, a window bound) thus factor out instead of
    multiplying through the naive product of per-cell negations.
    """
    weak_ok = sig.name in _WEAK_OK

    def rec(cell_lits):
        live = []
        for lits in cell_lits:
            if not lits:
                return []  # one cell is the whole space
            live.append(lits)
        if not live:
            return [Conj(sig)]
        counts = {}
        for lits in live:
            for lit in lits:
                counts[lit] = counts.get(lit, 0) + 1
        lit, n = max(counts.items(), key=lambda kv: kv[1])
        if n > 1:
            with_l = [[l for l in lits if l != lit]
                      for lits in live if lit in lits]
            without = [lits for lits in live if lit not in lits]
            out = []
            for c in rec(with_l + without):
                cc = c.copy()
                if cc.add(lit) and cc.ok:
                    out.append(cc)
            sub = rec(without)
            for branch in _neg_lit(lit, weak_ok):
                for c in sub:
                    cc = c.copy()
                    if all(cc.add(l) for l in branch) and cc.ok:
                        out.append(cc)
            return prune(out) if len(out) > 8 else out
        out = [Conj(sig)]
        for lits in live:
            nxt = []
            for c in out:
                for l in lits:
                    for branch in _neg_lit(l, weak_ok):
                        cc = c.copy()
                        if all(cc.add(b) for b in branch) and cc.ok:
                            nxt.append(cc)
            out = prune(nxt) if len(nxt) > 8 else nxt
            if not out:
                return []
        return out

    return rec([c.all_lits() for c in cells if c.ok])


def to_dnf(f: Formula, sig: Signature) -> list:
    """Quantifier-free formula to a list of non-contradictory Conj."""
    weak_ok = sig.name in _WEAK_OK

    def go(g: Formula, pos: bool) -> list:
        if isinstance(g, Top):
            return [Conj(sig)] if pos else []
        if isinstance(g, Bot):
            return [] if pos else [Conj(sig)]
        if isinstance(g, Not):
            return go(g.arg, not pos)
        if isinstance(g, And) if pos else isinstance(g, Or):
            if not pos and isinstance(g, Or):
                cells = go(g, True)
                if len(cells) > 8 and covers_all(cells):
                    return []
                return neg_cells(cells, sig)
            left = go(g.left, pos)
            if not left:
                return []
            right = go(g.right, pos)
            out = []
            for a in left:
                for b in right:
                    m = a.merged(b)
                    if m is not None and m.ok:
                        out.append(m)
            return prune(out) if len(out) > 8 else out
        if isinstance(g, (And, Or)):
            return go(g.left, pos) + go(g.right, pos)
        if isinstance(g, Atomic):
            out = []
            for branch in atom_lits(g.atom, pos, weak_ok):
                c = Conj(sig)
                if all(c.add(lit) for lit in branch):
                    out.append(c)
            return out
        if isinstance(g, (Exists, Forall)):
            raise EngineError("quantifier reached the DNF stage")
        raise TypeError(g)

    return go(f, True)


# ---------------------------------------------------------------------------
# back to formulas

def _split_sides(nt: NormalTerm):
    pos_f = tuple(p for p in nt.floor_parts if p[0] > 0)
    neg_f = tuple((-c, a) for c, a in nt.floor_parts if c < 0)
    pos_p = tuple(p for p in nt.proj_parts if p[1] > 0)
    neg_p = tuple((k, -c) for k, c in nt.proj_parts if c < 0)
    pos_l = tuple(p for p in nt.linear if p[1] > 0)
    neg_l = tuple((v, -c) for v, c in nt.linear if c < 0)
    lhs = NormalTerm(pos_f, pos_p, pos_l, _ZERO)
    rhs = NormalTerm(neg_f, neg_p, neg_l, -nt.const)
    return expand(lhs), expand(rhs)


def lit_formula(lit) -> Formula:
    if lit[0] == "ord":
        nt, rel = lit[1], lit[2]
        lhs, rhs = _split_sides(nt)
        if rel == "lt":
            return Atomic(Lt(lhs, rhs))
        if rel == "le":
            return Not(Atomic(Lt(rhs, lhs)))
        return Atomic(Eq(lhs, rhs))
    _, pred, nt, pos = lit
    a = Atomic(InZ(expand(nt)) if pred == "Z" else InQ(expand(nt)))
    return a if pos else Not(a)


def conj_formula(c: Conj) -> Formula:
    return and_all(lit_formula(l) for l in c.all_lits())


def dnf_formula(conjs) -> Formula:
    return or_all(conj_formula(c) for c in conjs)


# ---------------------------------------------------------------------------
# driver

def _eliminate_var(conj: Conj, var: str, sig: Signature) -> list:
    if not conj.mentions(var):
        return [conj]
    from . import cooper, coset, fm, hamel, mixed
    if sig.name == "doag":
        return fm.eliminate(conj, var)
    if sig.name == "presburger":
        return cooper.eliminate(conj, var, integer_mode=True)
    if sig.name in ("t0", "t"):
        return mixed.eliminate(conj, var, sig)
    if sig.name == "t1":
        return coset.eliminate(conj, var)
    if sig.name == "tn":
        return hamel.eliminate(conj, var, sig)
    raise EngineError(f"no engine for signature {sig}")


def eliminate_exists(var: str, body: Formula, sig: Signature) -> Formula:
    conjs = to_dnf(body, sig)
    if sig.name in ("t0", "t"):
        # batched: related conjuncts share most of their floor unfolding
        from . import mixed
        keep = [c for c in conjs if not c.mentions(var)]
        work = [c for c in conjs if c.mentions(var)]
        out = keep + mixed.eliminate_many(work, var, sig)
    else:
        out = []
        for conj in conjs:
            out.extend(c for c in _eliminate_var(conj, var, sig) if c.ok)
    if any(not c.ord and not c.mem for c in out):
        return Top()
    return dnf_formula(prune(out))


def qe(f: Formula, sig: Signature) -> Formula:
    """Full quantifier elimination; the result is equivalent and QF."""
    if isinstance(f, (Top, Bot, Atomic)):
        return f
    if isinstance(f, Not):
        return Not(qe(f.arg, sig))
    if isinstance(f, And):
        return And(qe(f.left, sig), qe(f.right, sig))
    if isinstance(f, Or):
        return Or(qe(f.left, sig), qe(f.right, sig))
    if isinstance(f, Exists):
        return eliminate_exists(f.var, qe(f.body, sig), sig)
    if isinstance(f, Forall):
        return Not(eliminate_exists(f.var, Not(qe(f.body, sig)), sig))
    raise TypeError(f)


def _neg_branches(lit):
    if lit[0] == "mem":
        return [[("mem", lit[1], lit[2], not lit[3])]]
    nt, rel = lit[1], lit[2]
    flipped = nt_scale(Fraction(-1), nt)
    if rel == "lt":
        return [[("ord", flipped, "le")]]
    if rel == "le":
        return [[("ord", flipped, "lt")]]
    return [[("ord", nt, "lt")], [("ord", flipped, "lt")]]


def _decide_lit(lit, assumed: Conj):
    """True/False when the assumption set settles the literal, else None."""
    probe = assumed.copy()
    if not probe.add(lit):
        return False
    for branch in _neg_branches(lit):
        probe = assumed.copy()
        if all(probe.add(l) for l in branch):
            return None
    return True


class UndecidedAtomError(EngineError):
    """The assumption set does not settle an atom of the residue."""

    def __init__(self, lit):
        self.atom = lit_formula(lit)
        from ..parser import print_formula
        super().__init__(
            f"assumption set does not decide the atom {print_formula(self.atom)}")


def decide(f: Formula, sig: Signature, assumptions=(), constants=()) -> bool:
    """Truth value of a sentence, optionally modulo side assumptions.

    Assumptions are quantifier-free formulas over symbolic constants (free
    names that the sentence may mention; further constant names can be
    declared via ``constants``).  An atom surviving elimination is resolved
    against them; if neither it nor its negation follows, the call raises
    :class:`UndecidedAtomError` naming the blocking atom.
    """
    from ..terms import free_vars
    fv = free_vars(f) - set(constants)
    assumed = Conj(sig)
    for a in assumptions:
        branches = to_dnf(a, sig)
        if len(branches) != 1:
            raise EngineError("assumptions must be conjunctions of literals")
        for lit in branches[0].all_lits():
            if not assumed.add(lit):
                raise EngineError("inconsistent assumption set")
        fv -= free_vars(a)
    if fv:
        raise ValueError(f"not a sentence; free variables {sorted(fv)}")
    g = qe(f, sig)
    blocking = None
    for conj in to_dnf(g, sig):
        if not conj.ok:
            continue
        if assumed.merged(conj) is None:
            continue  # the conjunct jointly contradicts the assumptions
        verdicts = [_decide_lit(lit, assumed) for lit in conj.all_lits()]
        if all(v is True for v in verdicts):
            return True
        if any(v is False for v in verdicts):
            continue
        if blocking is None:
            blocking = next(lit for lit, v in
                            zip(conj.all_lits(), verdicts) if v is None)
    if blocking is not None:
        raise UndecidedAtomError(blocking)
    return False


# ---------------------------------------------------------------------------
# light structural simplification

def simplify(f: Formula) -> Formula:
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, Atomic):
        return _simp_atom(f)
    if isinstance(f, Not):
        g = simplify(f.arg)
        if isinstance(g, Top):
            return Bot()
        if isinstance(g, Bot):
            return Top()
        if isinstance(g, Not):
            return g.arg
        return Not(g)
    if isinstance(f, (And, Or)):
        is_and = isinstance(f, And)
        parts = []
        seen = set()
        for side in _flat(f, type(f)):
            s = simplify(side)
            if isinstance(s, Top):
                if not is_and:
                    return Top()
                continue
            if isinstance(s, Bot):
                if is_and:
                    return Bot()
                continue
            if s not in seen:
                seen.add(s)
                parts.append(s)
        if not parts:
            return Top() if is_and else Bot()
        return and_all(parts) if is_and else or_all(parts)
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, simplify(f.body))
    raise TypeError(f)


def _flat(f, cls):
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, cls):
            stack.append(g.right)
            stack.append(g.left)
        else:
            yield g


def _simp_atom(f: Atomic) -> Formula:
    a = f.atom
    if isinstance(a, (Lt, Eq)):
        nt = nt_sub(normalize_term(a.lhs), normalize_term(a.rhs))
        if nt.is_constant:
            if isinstance(a, Lt):
                return Top() if nt.const < 0 else Bot()
            return Top() if nt.const == 0 else Bot()
        return f
    nt = normalize_term(a.arg)
    if nt.is_constant:
        if isinstance(a, InQ):
            return Top()
        return Top() if nt.const.denominator == 1 else Bot()
    return f
