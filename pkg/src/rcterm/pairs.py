"""Dependency pair transformations for complexity analysis.

Three flavours, differing in how the right-hand side of a rule is split.
Weak pairs extract every maximal subterm rooted in a defined symbol or a
variable; weak innermost pairs extract at defined roots only; standard
pairs take each defined-rooted subterm on its own.  Extracted parts get
their root re-marked as a call symbol, and for the weak flavours the
parts are stitched back together under a fresh compound symbol, one per
rule, so the pair right-hand side keeps the whole fan-out of the rule.

Usable rules cut the base system down to what pair right-hand sides can
actually reach, following the call dependency between defined symbols.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .terms import (
    COMPOUND,
    DEFINED,
    SHARP,
    App,
    FunSym,
    Rule,
    Term,
    Trs,
    Var,
    funs,
)

WEAK = "weak"
WEAK_INNERMOST = "weak-innermost"
STANDARD = "standard"
KINDS = (WEAK, WEAK_INNERMOST, STANDARD)


def sharp(t: Term) -> Term:
    """Re-root under the marked call symbol; variables stay themselves."""
    if isinstance(t, Var):
        return t
    mark = FunSym(t.sym.name + "#", t.sym.arity, SHARP)
    return App(mark, t.args)


@dataclass(frozen=True)
class DpProblem:
    pairs: tuple[Rule, ...]
    base: Trs
    kind: str
    usable: tuple[Rule, ...]

    def compound_symbols(self) -> set[FunSym]:
        return {
            sym
            for pair in self.pairs
            for sym in funs(pair.rhs)
            if sym.kind == COMPOUND
        }


def _maximal_split(t: Term, keep_vars: bool) -> list[Term]:
    """Maximal defined-rooted (and variable, if asked) subterms, left to
    right; the surrounding context is pure constructor material."""
    if isinstance(t, Var):
        return [t] if keep_vars else []
    if t.sym.kind == DEFINED:
        return [t]
    return [u for arg in t.args for u in _maximal_split(arg, keep_vars)]


def _defined_subterms(t: Term) -> list[Term]:
    """All defined-rooted subterms, outermost first."""
    if isinstance(t, Var):
        return []
    here = [t] if t.sym.kind == DEFINED else []
    return here + [u for arg in t.args for u in _defined_subterms(arg)]


def _com(parts: list[Term], rule_index: int) -> Term:
    if len(parts) == 1:
        return parts[0]
    compound = FunSym(f"c_{rule_index}", len(parts), COMPOUND)
    return App(compound, tuple(parts))


def dependency_pairs(trs: Trs, kind: str = WEAK) -> DpProblem:
    """Transform a system into one of the three pair flavours.

    Compound names are derived from 1-based rule positions, so repeated
    runs produce identical problems.  Pairs keep source-rule order;
    identical pairs arising from distinct rules are kept apart.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown dependency pair kind {kind!r}")
    pairs: list[Rule] = []
    for index, rule in enumerate(trs.rules, start=1):
        marked_lhs = sharp(rule.lhs)
        if kind == STANDARD:
            per_rule: list[Rule] = []
            for u in _defined_subterms(rule.rhs):
                pair = Rule(marked_lhs, sharp(u))
                if pair not in per_rule:
                    per_rule.append(pair)
            pairs.extend(per_rule)
        else:
            parts = _maximal_split(rule.rhs, keep_vars=kind == WEAK)
            pairs.append(Rule(marked_lhs, _com([sharp(u) for u in parts], index)))
    problem = DpProblem(tuple(pairs), trs, kind, ())
    return replace(problem, usable=tuple(usable_rules(trs, problem)))


def usable_rules(trs: Trs, problem: DpProblem) -> list[Rule]:
    """Base rules reachable from the pair right-hand sides.

    A defined symbol f reaches g when some f-rule mentions g on its
    right-hand side; the usable set is the rules of every symbol
    reachable from a defined symbol occurring in some pair rhs.
    """
    calls: dict[str, set[str]] = {}
    for rule in trs.rules:
        targets = {s.name for s in funs(rule.rhs) if s.kind == DEFINED}
        calls.setdefault(rule.lhs.sym.name, set()).update(targets)
    frontier = [
        s.name
        for pair in problem.pairs
        for s in funs(pair.rhs)
        if s.kind == DEFINED
    ]
    reached: set[str] = set()
    while frontier:
        name = frontier.pop()
        if name not in reached:
            reached.add(name)
            frontier.extend(calls.get(name, ()))
    return [rule for rule in trs.rules if rule.lhs.sym.name in reached]


def all_compounds_nullary(problem: DpProblem) -> bool:
    """True when no compound symbol takes arguments.

    For weak innermost problems this gates the stronger route through
    standard pairs, at the price of one extra rewrite step.
    """
    return all(sym.arity == 0 for sym in problem.compound_symbols())
