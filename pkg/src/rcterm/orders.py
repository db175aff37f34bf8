"""Simplification orders: multiset and lexicographic path orders and the
integer-valued Knuth-Bendix order.

Compatibility with one of these orders pins the derivational complexity of
a rewrite system to a coarse class: a multiset path order gives a primitive
recursive bound, a lexicographic path order a multiple recursive one, and a
Knuth-Bendix order an Ackermannian ceiling.  `rpo_check` and `kbo_check`
decide s > t for explicit parameters.  `search_order` hunts for parameters
orienting every rule of a system, through a SAT encoding of the precedence
for the path orders and through bounded enumeration of weight functions for
KBO, and re-verifies anything the backends hand back.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import Callable, Mapping

from . import satsolver
from .satsolver import SolverTimeout
from .terms import App, FunSym, Term, Trs, Var, funs, var_occurrences, variables

TRUE = 1
FALSE = -1

#: Derivational-complexity class certified by compatibility with each family.
COMPLEXITY_CLASS = {"mpo": "PRIMREC", "lpo": "MULTREC", "kbo": "ACK"}

#: Search domains for KBO parameters; small on purpose, the published
#: witnesses all live near the origin and the enumeration stays exhaustive.
WEIGHT_DOMAIN = range(8)
W0_DOMAIN = (1, 2)


def _above(rank: Mapping[str, int], f: FunSym, g: FunSym) -> bool:
    return rank.get(f.name, 0) > rank.get(g.name, 0)


# ---------------------------------------------------------------- path orders


def rpo_check(order: str, rank: Mapping[str, int], s: Term, t: Term) -> bool:
    """Decide s > t under the recursive path order named by `order`.

    Both orders share the subterm and precedence-descent clauses and
    differ in how same-root applications compare their arguments: `mpo`
    takes the strict multiset extension, `lpo` the left-to-right
    lexicographic one.
    """
    if order == "mpo":
        return _mpo(rank, s, t)
    if order == "lpo":
        return _lpo(rank, s, t)
    raise ValueError(f"unknown path order family {order!r}")


def _mpo(rank: Mapping[str, int], s: Term, t: Term) -> bool:
    if not isinstance(s, App):
        return False
    if any(si == t or _mpo(rank, si, t) for si in s.args):
        return True
    if not isinstance(t, App):
        return False
    if _above(rank, s.sym, t.sym):
        return all(_mpo(rank, s, tj) for tj in t.args)
    if s.sym == t.sym:
        return _mul_ext(lambda a, b: _mpo(rank, a, b), s.args, t.args)
    return False


def _lpo(rank: Mapping[str, int], s: Term, t: Term) -> bool:
    if not isinstance(s, App):
        return False
    if isinstance(t, Var):
        return t.name in variables(s)
    if any(si == t or _lpo(rank, si, t) for si in s.args):
        return True
    if _above(rank, s.sym, t.sym):
        return all(_lpo(rank, s, tj) for tj in t.args)
    if s.sym == t.sym and all(_lpo(rank, s, tj) for tj in t.args):
        for si, ti in zip(s.args, t.args):
            if si == ti:
                continue
            return _lpo(rank, si, ti)
    return False


def _mul_ext(gt: Callable[[Term, Term], bool], ss, ts) -> bool:
    """Strict multiset extension of `gt`.

    Every target is covered exactly once: either matched to a distinct
    equal source, which survives, or strictly dominated by a removed
    source, which may cover several targets.  Strictness means at least
    one source does not survive.
    """
    modes: list[str | None] = [None] * len(ss)

    def cover(j: int) -> bool:
        if j == len(ts):
            return any(m != "eq" for m in modes)
        t = ts[j]
        for i, si in enumerate(ss):
            if modes[i] is None and si == t:
                modes[i] = "eq"
                if cover(j + 1):
                    return True
                modes[i] = None
        for i, si in enumerate(ss):
            if modes[i] != "eq" and gt(si, t):
                before = modes[i]
                modes[i] = "gt"
                if cover(j + 1):
                    return True
                modes[i] = before
        return False

    return cover(0)


# ----------------------------------------------------------------------- KBO


@dataclass(frozen=True)
class KboParams:
    """Symbol weights, the variable weight w0, and a precedence as ranks.

    Symbols missing from the weight map weigh w0, which keeps unlisted
    constants admissible; missing ranks default to 0.
    """

    weight: Mapping[str, int]
    w0: int
    rank: Mapping[str, int]

    def symbol_weight(self, f: FunSym) -> int:
        return self.weight.get(f.name, self.w0)


def term_weight(p: KboParams, t: Term) -> int:
    if isinstance(t, Var):
        return p.w0
    return p.symbol_weight(t.sym) + sum(term_weight(p, a) for a in t.args)


def check_admissible(p: KboParams, symbols) -> None:
    """Raise ValueError unless `p` is admissible for the given symbols.

    Admissibility asks for a positive w0, constants weighing at least w0,
    and any weight-0 unary symbol sitting strictly above every other
    symbol in the precedence.  At most one symbol can satisfy the last
    condition; it is the special symbol of the induced order.
    """
    if p.w0 <= 0:
        raise ValueError("w0 must be positive")
    for f in symbols:
        if f.arity == 0 and p.symbol_weight(f) < p.w0:
            raise ValueError(f"constant {f.name} weighs less than w0")
        if f.arity == 1 and p.symbol_weight(f) == 0:
            for g in symbols:
                if g.name != f.name and not _above(p.rank, f, g):
                    raise ValueError(
                        f"weight-0 unary symbol {f.name} must sit above"
                        f" {g.name} in the precedence"
                    )


def _strip_special(p: KboParams, t: Term) -> tuple[int, Term]:
    """Split t into its leading chain of special symbols and the core."""
    count = 0
    while (
        isinstance(t, App)
        and t.sym.arity == 1
        and p.symbol_weight(t.sym) == 0
    ):
        count += 1
        t = t.args[0]
    return count, t


def kbo_check(p: KboParams, s: Term, t: Term) -> bool:
    """Decide s > t under the Knuth-Bendix order induced by `p`.

    Raises ValueError when `p` is inadmissible for the symbols occurring
    in the two terms.
    """
    return kbo_decide(p, s, t) is not None


def kbo_decide(p: KboParams, s: Term, t: Term) -> str | None:
    """Like `kbo_check`, but name the clause that decided.

    Returns "weight" when the weights differ, one of "special-count",
    "precedence", or "lex" when a weight tie was broken, and None when
    s > t does not hold.  The label feeds the property tests that pin
    tie-breaking to exact weight equality.
    """
    check_admissible(p, funs(s) | funs(t))
    return _kbo(p, s, t)


def _kbo(p: KboParams, s: Term, t: Term) -> str | None:
    sc, tc = var_occurrences(s), var_occurrences(t)
    if any(sc.get(x, 0) < k for x, k in tc.items()):
        return None
    ws, wt = term_weight(p, s), term_weight(p, t)
    if ws > wt:
        return "weight"
    if ws < wt or s == t:
        return None
    a, s1 = _strip_special(p, s)
    b, t1 = _strip_special(p, t)
    if a != b:
        return "special-count" if a > b else None
    if isinstance(s1, Var) or isinstance(t1, Var):
        # equal weights and equal special chains around a bare variable
        # leave nothing to compare; distinct cores are incomparable
        return None
    if _above(p.rank, s1.sym, t1.sym):
        return "precedence"
    if s1.sym == t1.sym:
        for si, ti in zip(s1.args, t1.args):
            if si == ti:
                continue
            return "lex" if _kbo(p, si, ti) is not None else None
    return None


# -------------------------------------------------------- precedence search


class _PathEncoder:
    """CNF encoding of "some precedence orients every rule" for MPO or LPO.

    Precedence bits cover every ordered pair of signature symbols and are
    kept a strict order by explicit axioms.  The recursive clauses of the
    orders unroll over the concrete rule terms; same-root multiset descent
    spends cover bits exactly like the direct check spends its backtracking
    modes.  Definitional variables only ever occur positively, so the
    one-sided clauses are sound, and decoded models are re-verified against
    `rpo_check` before anyone gets to see them.
    """

    def __init__(self, order: str, symbols):
        self.order = order
        self.symbols = sorted(symbols, key=lambda f: f.name)
        self.count = 1
        self.clauses: list[list[int]] = [[TRUE]]
        self.varmap: dict[tuple, int] = {}
        self.memo: dict[tuple, int] = {}
        for f, g in itertools.permutations(self.symbols, 2):
            self.varmap[("prec", f.name, g.name)] = self.fresh()

    def fresh(self) -> int:
        self.count += 1
        return self.count

    def clause(self, lits) -> None:
        out = [lit for lit in lits if lit != FALSE]
        if TRUE in out:
            return
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
        if f.name == g.name:
            return FALSE
        return self.varmap[("prec", f.name, g.name)]

    def enc(self, s: Term, t: Term) -> int:
        key = (s, t)
        if key in self.memo:
            return self.memo[key]
        lit = FALSE
        if isinstance(s, App) and s != t:
            if isinstance(t, Var) and self.order == "lpo":
                lit = TRUE if t.name in variables(s) else FALSE
            else:
                parts = [
                    TRUE if si == t else self.enc(si, t) for si in s.args
                ]
                if isinstance(t, App):
                    parts.append(
                        self.conj(
                            [self.prec(s.sym, t.sym)]
                            + [self.enc(s, tj) for tj in t.args]
                        )
                    )
                    if s.sym == t.sym:
                        if self.order == "mpo":
                            parts.append(self.cover(s, t))
                        else:
                            parts.append(self.lex(s, t))
                lit = self.disj(parts)
        self.memo[key] = lit
        return lit

    def lex(self, s: App, t: App) -> int:
        sides = [self.enc(s, tj) for tj in t.args]
        for si, ti in zip(s.args, t.args):
            if si == ti:
                continue
            sides.append(self.enc(si, ti))
            return self.conj(sides)
        return FALSE

    def cover(self, s: App, t: App) -> int:
        """Same-root strict multiset descent through cover bits.

        gamma[i, j] matches target j to source i; a source marked eps
        survives by passing exactly one target by syntactic equality, an
        unmarked source strictly dominates everything it covers.  At
        least one source must go unmarked, which is the decrease.
        """
        n = s.sym.arity
        if n == 0:
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
                self.clause([-v, -gij, eps[i], self.enc(si, tj)])
        for j in range(1, n + 1):
            self.clause([-v] + [gamma[i, j] for i in range(1, n + 1)])
            for i, k in itertools.combinations(range(1, n + 1), 2):
                self.clause([-v, -gamma[i, j], -gamma[k, j]])
        for i in range(1, n + 1):
            self.clause([-v, -eps[i]] + [gamma[i, j] for j in range(1, n + 1)])
            for j, k in itertools.combinations(range(1, n + 1), 2):
                self.clause([-v, -eps[i], -gamma[i, j], -gamma[i, k]])
        self.clause([-v] + [-eps[i] for i in range(1, n + 1)])
        return v

    def precedence_axioms(self) -> None:
        for f, g in itertools.combinations(self.symbols, 2):
            self.clause([-self.prec(f, g), -self.prec(g, f)])
        for f, g, h in itertools.permutations(self.symbols, 3):
            self.clause([-self.prec(f, g), -self.prec(g, h), self.prec(f, h)])


def _search_path(trs, order, deadline, backend, binary):
    symbols = trs.defined_symbols | trs.constructor_symbols
    enc = _PathEncoder(order, symbols)
    for rule in trs.rules:
        enc.clause([enc.enc(rule.lhs, rule.rhs)])
    enc.precedence_axioms()
    try:
        model = satsolver.solve_cnf(
            enc.clauses,
            enc.count,
            backend=backend,
            binary=binary,
            deadline=deadline,
        )
    except SolverTimeout:
        raise ResourceWarning(
            f"{order} precedence search ran out of budget"
        ) from None
    if model is None:
        return None
    below = {f.name: 0 for f in enc.symbols}
    for (_, f, _g), var in enc.varmap.items():
        if model.get(var, False):
            below[f] += 1
    rank = below
    for rule in trs.rules:
        if not rpo_check(order, rank, rule.lhs, rule.rhs):
            raise RuntimeError(
                f"decoded {order} precedence fails re-verification on {rule!r}"
            )
    return rank


# ------------------------------------------------------------ weight search


def _kbo_need(p: KboParams, s: Term, t: Term):
    """True, False, or the one precedence pair the orientation hinges on.

    With the weights fixed the comparison walks a single deterministic
    path; the only free choice left is one precedence query between two
    distinct root symbols, reported as a (greater, smaller) name pair.
    """
    sc, tc = var_occurrences(s), var_occurrences(t)
    if any(sc.get(x, 0) < k for x, k in tc.items()):
        return False
    ws, wt = term_weight(p, s), term_weight(p, t)
    if ws != wt:
        return ws > wt
    if s == t:
        return False
    a, s1 = _strip_special(p, s)
    b, t1 = _strip_special(p, t)
    if a != b:
        return a > b
    if isinstance(s1, Var) or isinstance(t1, Var):
        return False
    if s1.sym == t1.sym:
        for si, ti in zip(s1.args, t1.args):
            if si == ti:
                continue
            return _kbo_need(p, si, ti)
        return False
    return (s1.sym.name, t1.sym.name)


def _rank_from_edges(names, edges):
    """Ranks realising every (above, below) edge, or None on a cycle."""
    deps = {name: set() for name in names}
    for above, below in edges:
        deps[above].add(below)
    try:
        order = list(TopologicalSorter(deps).static_order())
    except CycleError:
        return None
    return {name: i for i, name in enumerate(order)}


def _search_kbo(trs, deadline):
    """Exhaust the small weight domain, then derive the precedence.

    The variable-count guard is parameter-free, so systems violating it
    are dismissed up front.  For each candidate weight function every rule
    reduces to true, false, or a single required precedence pair; the
    required pairs plus the maximality of a special symbol either form a
    cycle or extend to ranks, and the result is re-verified whole.
    """
    rules = list(trs.rules)
    for rule in rules:
        lc, rc = var_occurrences(rule.lhs), var_occurrences(rule.rhs)
        if any(lc.get(x, 0) < k for x, k in rc.items()):
            return None
    symbols = sorted(
        trs.defined_symbols | trs.constructor_symbols, key=lambda f: f.name
    )
    names = [f.name for f in symbols]
    constants = [f.name for f in symbols if f.arity == 0]
    unaries = [f.name for f in symbols if f.arity == 1]
    seen = 0
    for w0 in W0_DOMAIN:
        for combo in itertools.product(WEIGHT_DOMAIN, repeat=len(names)):
            seen += 1
            if seen % 1024 == 0 and time.monotonic() > deadline:
                raise ResourceWarning("kbo weight search ran out of budget")
            weight = dict(zip(names, combo))
            if any(weight[c] < w0 for c in constants):
                continue
            zeros = [u for u in unaries if weight[u] == 0]
            if len(zeros) > 1:
                continue
            probe = KboParams(weight, w0, {})
            edges = set()
            verdict = True
            for rule in rules:
                need = _kbo_need(probe, rule.lhs, rule.rhs)
                if need is False:
                    verdict = False
                    break
                if need is not True:
                    edges.add(need)
            if not verdict:
                continue
            for special in zeros:
                edges.update(
                    (special, other) for other in names if other != special
                )
            rank = _rank_from_edges(names, edges)
            if rank is None:
                continue
            found = KboParams(weight, w0, rank)
            for rule in rules:
                if not kbo_check(found, rule.lhs, rule.rhs):
                    raise RuntimeError(
                        f"derived kbo parameters fail re-verification"
                        f" on {rule!r}"
                    )
            return found
    return None


def search_order(
    trs: Trs,
    family: str,
    budget: float = 10.0,
    backend: str = "auto",
    binary: str | None = None,
):
    """Find parameters orienting every rule of `trs`, or None.

    `family` is one of "mpo", "lpo", or "kbo"; the path orders return a
    rank map, KBO a `KboParams`.  `budget` is wall-clock seconds; running
    out raises ResourceWarning, whereas exhausting the search space
    cleanly returns None.  Every hit is re-verified rule by rule with the
    corresponding check before being returned.
    """
    deadline = time.monotonic() + budget
    if family in ("mpo", "lpo"):
        return _search_path(trs, family, deadline, backend, binary)
    if family == "kbo":
        return _search_kbo(trs, deadline)
    raise ValueError(f"unknown order family {family!r}")
