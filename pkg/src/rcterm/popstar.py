"""The polynomial path order for constructor systems.

A witness is a strict precedence together with a safe mapping that
splits the argument positions of every defined symbol into normal and
safe ones.  Constructor arguments are always safe.  The auxiliary order
may look below the left-hand side only through normal positions, while
the main order may recurse through a single safe position on the right
per precedence descent.  That discipline is what keeps the innermost
runtime of a compatible system polynomial: normal arguments drive the
recursion, safe arguments may only collect values.

Checking a fixed witness is a direct structural recursion over the two
definitions.  Searching is a propositional encoding: precedence and
safe-position bits become variables, the mutual recursion of the two
orders is unrolled over the finitely many subterm pairs of the rules,
and multiset comparisons turn into cover bits.  Decoded models are
re-checked with the direct functions before being handed out.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Mapping

from . import satsolver
from .terms import App, CONSTRUCTOR, DEFINED, FunSym, Term, Trs, Var, subterms

#: fixed anchor variable in every encoding; asserted true by a unit
#: clause so that 1 and -1 double as the constants true and false
TRUE = 1
FALSE = -1


@dataclass(frozen=True)
class PrecSafe:
    """Precedence plus safe mapping, the witness format of the order.

    The precedence is strict: f is above g exactly when its rank is
    larger.  `safe` maps defined symbol names to their safe argument
    positions, 1-based; constructors do not appear because all their
    positions count as safe.
    """

    rank: Mapping[str, int]
    safe: Mapping[str, frozenset[int]]

    def above(self, f: FunSym, g: FunSym) -> bool:
        return self.rank.get(f.name, 0) > self.rank.get(g.name, 0)

    def safe_args(self, f: FunSym) -> frozenset[int]:
        if f.kind == CONSTRUCTOR:
            return frozenset(range(1, f.arity + 1))
        return frozenset(self.safe.get(f.name, ()))

    def normal_args(self, f: FunSym) -> tuple[int, ...]:
        safe = self.safe_args(f)
        return tuple(i for i in range(1, f.arity + 1) if i not in safe)


def admissible(ps: PrecSafe, trs: Trs) -> bool:
    """Whether the witness obeys the conventions the order assumes.

    Defined symbols must sit strictly above all constructors, distinct
    defined symbols must not share a rank, and safe positions must stay
    within each symbol's arity.
    """
    defined = sorted(trs.defined_symbols, key=lambda f: f.name)
    ranks = [ps.rank.get(f.name, 0) for f in defined]
    if len(set(ranks)) != len(ranks):
        return False
    if defined:
        floor = min(ranks)
        for c in trs.constructor_symbols:
            if ps.rank.get(c.name, 0) >= floor:
                return False
    for f in defined:
        if not ps.safe_args(f) <= frozenset(range(1, f.arity + 1)):
            return False
    return True


def _proper_subterm(s: Term, t: Term) -> bool:
    return t != s and any(u == t for u in subterms(s))


def gsq_check(ps: PrecSafe, s: Term, t: Term) -> bool:
    """The auxiliary order: s dominates t through normal positions.

    Holds when a constructor-rooted s has t weakly below some argument,
    when any s has t weakly below a normal argument, or when a defined
    root descends in precedence with every argument of t dominated.
    """
    if not isinstance(s, App):
        return False
    f, args = s.sym, s.args
    if f.kind == CONSTRUCTOR:
        picks = args
    else:
        picks = [args[i - 1] for i in ps.normal_args(f)]
    if any(si == t or gsq_check(ps, si, t) for si in picks):
        return True
    if isinstance(t, App) and f.kind == DEFINED and ps.above(f, t.sym):
        return all(gsq_check(ps, s, ti) for ti in t.args)
    return False


def pop_check(ps: PrecSafe, s: Term, t: Term) -> bool:
    """Decide whether s is above t in the polynomial path order."""
    if not isinstance(s, App):
        return False
    if gsq_check(ps, s, t):
        return True
    f, args = s.sym, s.args
    if any(si == t or pop_check(ps, si, t) for si in args):
        return True
    if not isinstance(t, App):
        return False
    g, targs = t.sym, t.args
    if f.kind == DEFINED and ps.above(f, g):
        safe_g = ps.safe_args(g)
        for i0 in sorted(safe_g):
            if not pop_check(ps, s, targs[i0 - 1]):
                continue
            if all(
                gsq_check(ps, s, tj)
                or (j in safe_g and _proper_subterm(s, tj))
                for j, tj in enumerate(targs, start=1)
                if j != i0
            ):
                return True
    if f == g:
        safe_f = sorted(ps.safe_args(f))
        normal_f = ps.normal_args(f)
        if _mul_cover(
            ps,
            [args[i - 1] for i in normal_f],
            [targs[i - 1] for i in normal_f],
            strict=True,
        ) and _mul_cover(
            ps,
            [args[i - 1] for i in safe_f],
            [targs[i - 1] for i in safe_f],
            strict=False,
        ):
            return True
    return False


def _mul_cover(ps: PrecSafe, ss: list, ts: list, strict: bool) -> bool:
    """Multiset comparison by searching for a cover.

    Every element of ts must be matched to one of ss, either by
    syntactic equality (each such source used once) or by a strict
    decrease (such a source may absorb several targets).  The strict
    variant additionally demands that not every source is consumed by
    an equality match.
    """
    modes: list = [None] * len(ss)

    def cover(j: int) -> bool:
        if j == len(ts):
            return not strict or any(m != "eq" for m in modes)
        t = ts[j]
        for i, s in enumerate(ss):
            if modes[i] == "eq":
                continue
            if modes[i] is None and s == t:
                modes[i] = "eq"
                if cover(j + 1):
                    return True
                modes[i] = None
            if pop_check(ps, s, t):
                before, modes[i] = modes[i], "gt"
                if cover(j + 1):
                    return True
                modes[i] = before
        return False

    return cover(0)


class _Encoder:
    """Propositional unrolling of both orders over one rule set."""

    def __init__(self, trs: Trs):
        self.trs = trs
        self.defined = sorted(trs.defined_symbols, key=lambda f: f.name)
        self.count = TRUE
        self.clauses: list[list[int]] = [[TRUE]]
        self.varmap: dict[tuple, int] = {}
        self.memo: dict[tuple, int] = {}
        for f, g in permutations(self.defined, 2):
            self.varmap[("prec", f.name, g.name)] = self.fresh()
        for f in self.defined:
            for i in range(1, f.arity + 1):
                self.varmap[("safe", f.name, i)] = self.fresh()

    def fresh(self) -> int:
        self.count += 1
        return self.count

    def clause(self, lits) -> None:
        out = []
        for lit in lits:
            if lit == TRUE:
                return
            if lit != FALSE:
                out.append(lit)
        self.clauses.append(out)

    def disj(self, lits) -> int:
        out = []
        for lit in lits:
            if lit == TRUE:
                return TRUE
            if lit != FALSE and lit not in out:
                out.append(lit)
        if not out:
            return FALSE
        if len(out) == 1:
            return out[0]
        v = self.fresh()
        self.clauses.append([-v, *out])
        return v

    def conj(self, lits) -> int:
        out = []
        for lit in lits:
            if lit == FALSE:
                return FALSE
            if lit != TRUE and lit not in out:
                out.append(lit)
        if not out:
            return TRUE
        if len(out) == 1:
            return out[0]
        v = self.fresh()
        for lit in out:
            self.clauses.append([-v, lit])
        return v

    def prec(self, f: FunSym, g: FunSym) -> int:
        # defined symbols sit above constructors unconditionally, and
        # the orders never compare from a constructor downwards
        if g.kind == CONSTRUCTOR:
            return TRUE
        if f.name == g.name or f.kind != DEFINED:
            return FALSE
        return self.varmap[("prec", f.name, g.name)]

    def beta(self, f: FunSym, i: int) -> int:
        if f.kind == CONSTRUCTOR:
            return TRUE
        return self.varmap[("safe", f.name, i)]

    def gsq_weak(self, s: Term, t: Term) -> int:
        if s == t:
            return TRUE
        return self.gsq(s, t)

    def gsq(self, s: Term, t: Term) -> int:
        key = ("gsq", s, t)
        if key in self.memo:
            return self.memo[key]
        lit = FALSE
        if isinstance(s, App):
            f, args = s.sym, s.args
            if f.kind == CONSTRUCTOR:
                parts = [self.gsq_weak(si, t) for si in args]
            else:
                parts = [
                    self.conj([-self.beta(f, i), self.gsq_weak(args[i - 1], t)])
                    for i in range(1, f.arity + 1)
                ]
            if isinstance(t, App) and f.kind == DEFINED:
                parts.append(
                    self.conj(
                        [self.prec(f, t.sym)]
                        + [self.gsq(s, ti) for ti in t.args]
                    )
                )
            lit = self.disj(parts)
        self.memo[key] = lit
        return lit

    def pop_weak(self, s: Term, t: Term) -> int:
        if s == t:
            return TRUE
        return self.pop(s, t)

    def pop(self, s: Term, t: Term) -> int:
        key = ("pop", s, t)
        if key in self.memo:
            return self.memo[key]
        lit = FALSE
        if isinstance(s, App):
            f, args = s.sym, s.args
            parts = [self.gsq(s, t)]
            parts += [self.pop_weak(si, t) for si in args]
            if isinstance(t, App):
                g, targs = t.sym, t.args
                if f.kind == DEFINED and f != g:
                    for i0 in range(1, g.arity + 1):
                        sides = [
                            self.prec(f, g),
                            self.beta(g, i0),
                            self.pop(s, targs[i0 - 1]),
                        ]
                        for i in range(1, g.arity + 1):
                            if i == i0:
                                continue
                            ti = targs[i - 1]
                            hatch = self.conj(
                                [
                                    self.beta(g, i),
                                    TRUE if _proper_subterm(s, ti) else FALSE,
                                ]
                            )
                            sides.append(self.disj([self.gsq(s, ti), hatch]))
                        parts.append(self.conj(sides))
                if f == g:
                    parts.append(self.cover(s, t))
            lit = self.disj(parts)
        self.memo[key] = lit
        return lit

    def cover(self, s: App, t: App) -> int:
        """Same-root multiset descent through cover bits.

        gamma[i, j] matches target j to source i; positions matched to
        each other must agree on their safe bit.  A source marked eps
        passes one target by syntactic equality, an unmarked source
        strictly dominates everything it covers.  At least one normal
        source must stay unmarked, which is where the decrease happens.
        """
        f = s.sym
        n = f.arity
        if n == 0 or f.kind == CONSTRUCTOR:
            return FALSE
        v = self.fresh()
        gamma = {
            (i, j): self.fresh()
            for i in range(1, n + 1)
            for j in range(1, n + 1)
        }
        eps = {i: self.fresh() for i in range(1, n + 1)}
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                gij = gamma[i, j]
                si, tj = s.args[i - 1], t.args[j - 1]
                if si != tj:
                    self.clause([-v, -gij, -eps[i]])
                self.clause([-v, -gij, eps[i], self.pop(si, tj)])
                if i != j:
                    bi, bj = self.beta(f, i), self.beta(f, j)
                    self.clause([-v, -gij, -bi, bj])
                    self.clause([-v, -gij, bi, -bj])
        for j in range(1, n + 1):
            self.clause([-v] + [gamma[i, j] for i in range(1, n + 1)])
            for i, k in combinations(range(1, n + 1), 2):
                self.clause([-v, -gamma[i, j], -gamma[k, j]])
        for i in range(1, n + 1):
            self.clause([-v, -eps[i]] + [gamma[i, j] for j in range(1, n + 1)])
            for j, k in combinations(range(1, n + 1), 2):
                self.clause([-v, -eps[i], -gamma[i, j], -gamma[i, k]])
        strict = []
        for i in range(1, n + 1):
            w = self.fresh()
            self.clause([-w, -self.beta(f, i)])
            self.clause([-w, -eps[i]])
            strict.append(w)
        self.clause([-v] + strict)
        return v

    def precedence_axioms(self) -> None:
        for f, g in combinations(self.defined, 2):
            self.clause([-self.prec(f, g), -self.prec(g, f)])
        for f, g, h in permutations(self.defined, 3):
            self.clause([-self.prec(f, g), -self.prec(g, h), self.prec(f, h)])


def encode_pop(trs: Trs) -> tuple[list[list[int]], int, dict]:
    """CNF whose models are exactly the orienting witnesses.

    Returns clauses, the variable count, and the map from precedence
    and safe-position names to variable indices.
    """
    enc = _Encoder(trs)
    for rule in trs.rules:
        enc.clause([enc.pop(rule.lhs, rule.rhs)])
    enc.precedence_axioms()
    return enc.clauses, enc.count, dict(enc.varmap)


def decode_witness(trs: Trs, varmap: dict, model: dict) -> PrecSafe:
    """Read a witness back out of a model.

    Ranks are a linear extension of the decoded precedence: sorting by
    how many defined symbols sit below keeps every decoded pair and
    makes defined ranks distinct.  Constructors all get rank zero.
    """
    defined = sorted(trs.defined_symbols, key=lambda f: f.name)
    below = {
        f.name: sum(
            1
            for g in defined
            if g != f and model[varmap[("prec", f.name, g.name)]]
        )
        for f in defined
    }
    rank = {c.name: 0 for c in trs.constructor_symbols}
    order = sorted(defined, key=lambda f: (below[f.name], f.name))
    for height, f in enumerate(order, start=1):
        rank[f.name] = height
    safe = {
        f.name: frozenset(
            i
            for i in range(1, f.arity + 1)
            if model[varmap[("safe", f.name, i)]]
        )
        for f in defined
    }
    return PrecSafe(rank, safe)


def search_pop(
    trs: Trs,
    backend: str = "auto",
    binary: str | None = None,
    deadline: float | None = None,
) -> PrecSafe | None:
    """Find a witness orienting every rule, or None when there is none.

    The order is only defined on constructor systems; anything else is
    rejected outright instead of silently reporting failure.
    """
    if not trs.is_constructor_system():
        raise ValueError(
            "the polynomial path order applies to constructor systems only"
        )
    clauses, nvars, varmap = encode_pop(trs)
    model = satsolver.solve_cnf(
        clauses, nvars, backend=backend, binary=binary, deadline=deadline
    )
    if model is None:
        return None
    ps = decode_witness(trs, varmap, model)
    for rule in trs.rules:
        if not pop_check(ps, rule.lhs, rule.rhs):
            raise RuntimeError(
                f"decoded witness fails re-verification on {rule!r}"
            )
    return ps
