"""First-order terms, rewrite rules, and the rewrite relations.

Everything here is an immutable value: symbols, terms, rules, and systems
compare structurally and are safe to share across threads.  Positions are
tuples of child indices with () for the root; position enumeration is
post-order (arguments left to right, then the node itself), which makes the
leftmost-innermost redex come first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping

DEFINED = "defined"
CONSTRUCTOR = "constructor"
COMPOUND = "compound"
SHARP = "sharp-defined"

#: Ground enumeration pads variable slots with this constructor constant
#: when the input signature has no constant of its own.
PADDING_NAME = "⊥"


@dataclass(frozen=True)
class FunSym:
    name: str
    arity: int
    kind: str = DEFINED

    def __repr__(self) -> str:
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    sym: FunSym
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != self.sym.arity:
            raise ValueError(
                f"{self.sym.name} expects {self.sym.arity} arguments,"
                f" got {len(self.args)}"
            )

    def __repr__(self) -> str:
        if not self.args:
            return self.sym.name
        return f"{self.sym.name}({', '.join(map(repr, self.args))})"


Term = Var | App

Position = tuple


def size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)


def variables(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= variables(a)
    return out


def var_occurrences(t: Term) -> dict[str, int]:
    counts: dict[str, int] = {}
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            counts[s.name] = counts.get(s.name, 0) + 1
        else:
            stack.extend(s.args)
    return counts


def subterms(t: Term) -> Iterator[Term]:
    """All subterms in post-order, the term itself last."""
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)
    yield t


def positions(t: Term) -> list[Position]:
    out: list[Position] = []

    def walk(s: Term, here: Position):
        if isinstance(s, App):
            for i, a in enumerate(s.args):
                walk(a, here + (i,))
        out.append(here)

    walk(t, ())
    return out


def subterm_at(t: Term, pos: Position) -> Term:
    for i in pos:
        t = t.args[i]
    return t


def replace_at(t: Term, pos: Position, s: Term) -> Term:
    if not pos:
        return s
    i = pos[0]
    args = list(t.args)
    args[i] = replace_at(args[i], pos[1:], s)
    return App(t.sym, tuple(args))


def funs(t: Term) -> set[FunSym]:
    return {s.sym for s in subterms(t) if isinstance(s, App)}


Subst = Mapping[str, Term]


def substitute(t: Term, sigma: Subst) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    return App(t.sym, tuple(substitute(a, sigma) for a in t.args))


def match(pattern: Term, subject: Term) -> dict[str, Term] | None:
    """Most general matcher with pattern sigma = subject, or None."""
    sigma: dict[str, Term] = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = sigma.get(p.name)
            if bound is None:
                sigma[p.name] = s
            elif bound != s:
                return None
        else:
            if not isinstance(s, App) or s.sym != p.sym:
                return None
            stack.extend(zip(p.args, s.args))
    return sigma


def unify(s: Term, t: Term) -> dict[str, Term] | None:
    """Most general unifier via Robinson's algorithm with occurs check."""

    def resolve(u: Term, sigma: dict[str, Term]) -> Term:
        while isinstance(u, Var) and u.name in sigma:
            u = sigma[u.name]
        return u

    def occurs(name: str, u: Term, sigma: dict[str, Term]) -> bool:
        u = resolve(u, sigma)
        if isinstance(u, Var):
            return u.name == name
        return any(occurs(name, a, sigma) for a in u.args)

    sigma: dict[str, Term] = {}
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a, b = resolve(a, sigma), resolve(b, sigma)
        if a == b:
            continue
        if isinstance(a, Var):
            if occurs(a.name, b, sigma):
                return None
            sigma[a.name] = b
        elif isinstance(b, Var):
            if occurs(b.name, a, sigma):
                return None
            sigma[b.name] = a
        elif a.sym == b.sym:
            stack.extend(zip(a.args, b.args))
        else:
            return None

    def expand(u: Term) -> Term:
        u = resolve(u, sigma)
        if isinstance(u, Var):
            return u
        return App(u.sym, tuple(expand(a) for a in u.args))

    # flatten the triangular bindings into an idempotent substitution
    return {name: expand(t) for name, t in sigma.items()}


_rename_counter = itertools.count()


def rename_variables(t: Term, suffix: str | None = None) -> Term:
    """Fresh copy of t with every variable renamed apart."""
    if suffix is None:
        suffix = f"%{next(_rename_counter)}"
    mapping = {name: Var(name + suffix) for name in variables(t)}
    return substitute(t, mapping)


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise ValueError("left-hand side must not be a variable")
        free = variables(self.rhs) - variables(self.lhs)
        if free:
            raise ValueError(f"free right-hand side variables: {sorted(free)}")

    def is_duplicating(self) -> bool:
        left = var_occurrences(self.lhs)
        right = var_occurrences(self.rhs)
        return any(n > left.get(x, 0) for x, n in right.items())

    def rename(self, suffix: str | None = None) -> Rule:
        if suffix is None:
            suffix = f"%{next(_rename_counter)}"
        mapping = {name: Var(name + suffix) for name in variables(self.lhs)}
        return Rule(substitute(self.lhs, mapping), substitute(self.rhs, mapping))

    def __repr__(self) -> str:
        return f"{self.lhs!r} -> {self.rhs!r}"


@dataclass(frozen=True)
class Trs:
    rules: tuple = ()
    signature: frozenset = frozenset()
    _by_name: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "signature", frozenset(self.signature))
        object.__setattr__(
            self, "_by_name", {f.name: f for f in self.signature}
        )

    @classmethod
    def from_rules(cls, rules) -> Trs:
        """Build a system from rules, classifying symbols by where they
        occur: left-hand side roots are defined, the rest constructors.
        Sharp and compound symbols made by the pair transformations keep
        their kind; left-hand side roots among them stay sharp.
        """
        rules = tuple(rules)
        roots = set()
        seen: dict[str, FunSym] = {}
        for rule in rules:
            roots.add(rule.lhs.sym.name)
            for t in (rule.lhs, rule.rhs):
                for f in funs(t):
                    old = seen.get(f.name)
                    if old is not None and old.arity != f.arity:
                        raise ValueError(
                            f"symbol {f.name} used with arities"
                            f" {old.arity} and {f.arity}"
                        )
                    seen[f.name] = f
        final: dict[str, FunSym] = {}
        for name, f in seen.items():
            if f.kind in (SHARP, COMPOUND):
                final[name] = f
            elif name in roots:
                final[name] = FunSym(name, f.arity, DEFINED)
            else:
                final[name] = FunSym(name, f.arity, CONSTRUCTOR)

        def retag(t: Term) -> Term:
            if isinstance(t, Var):
                return t
            return App(final[t.sym.name], tuple(retag(a) for a in t.args))

        rules = tuple(Rule(retag(r.lhs), retag(r.rhs)) for r in rules)
        return cls(rules, frozenset(final.values()))

    def symbol(self, name: str) -> FunSym:
        return self._by_name[name]

    @property
    def defined_symbols(self) -> set[FunSym]:
        return {f for f in self.signature if f.kind in (DEFINED, SHARP)}

    @property
    def constructor_symbols(self) -> set[FunSym]:
        return {f for f in self.signature if f.kind == CONSTRUCTOR}

    def is_duplicating(self) -> bool:
        return any(rule.is_duplicating() for rule in self.rules)

    def is_constructor_system(self) -> bool:
        """True when no defined symbol occurs below the root of a lhs."""
        for rule in self.rules:
            for a in rule.lhs.args:
                for s in subterms(a):
                    if isinstance(s, App) and s.sym.kind in (DEFINED, SHARP):
                        return False
        return True

    def redex_positions(self, t: Term) -> list[Position]:
        out = []
        for pos in positions(t):
            sub = subterm_at(t, pos)
            if isinstance(sub, App) and any(
                match(rule.lhs, sub) is not None for rule in self.rules
            ):
                out.append(pos)
        return out

    def is_normal_form(self, t: Term) -> bool:
        return not self.redex_positions(t)


def labeled_successors(
    trs: Trs, t: Term, strategy: str = "full"
) -> list[tuple[Rule, Term]]:
    """All one-step reducts of t, each with the rule that produced it.
    Innermost keeps only redexes whose proper subterms are normal forms.
    """
    if strategy not in ("full", "innermost"):
        raise ValueError(f"unknown strategy: {strategy}")
    redexes = trs.redex_positions(t)
    if strategy == "innermost":
        redexes = [
            p
            for p in redexes
            if not any(q != p and q[: len(p)] == p for q in redexes)
        ]
    out = []
    for pos in redexes:
        sub = subterm_at(t, pos)
        for rule in trs.rules:
            sigma = match(rule.lhs, sub)
            if sigma is not None:
                out.append((rule, replace_at(t, pos, substitute(rule.rhs, sigma))))
    return out


def rewrite_successors(trs: Trs, t: Term, strategy: str = "full") -> set:
    """All one-step reducts of t, rules forgotten."""
    return {u for _, u in labeled_successors(trs, t, strategy)}


def is_basic(trs: Trs, t: Term) -> bool:
    if not isinstance(t, App) or t.sym.kind not in (DEFINED, SHARP):
        return False
    for a in t.args:
        for s in subterms(a):
            if isinstance(s, App) and s.sym.kind in (DEFINED, SHARP):
                return False
    return True


def _enumeration_constructors(trs: Trs) -> list[FunSym]:
    ctors = sorted(trs.constructor_symbols, key=lambda f: f.name)
    if not any(f.arity == 0 for f in ctors):
        ctors.append(FunSym(PADDING_NAME, 0, CONSTRUCTOR))
    return ctors


def basic_terms_up_to(trs: Trs, n: int) -> Iterator[Term]:
    """Yield every ground basic term of size at most n exactly once,
    smaller sizes first.  Variable slots are filled by ground constructor
    terms, padding the signature with a fresh constant when necessary.
    """
    if n < 1:
        raise ValueError("size bound must be at least 1")
    ctors = _enumeration_constructors(trs)
    by_size: dict[int, list[Term]] = {0: []}

    def ground_terms(s: int) -> list[Term]:
        if s not in by_size:
            terms = []
            for f in ctors:
                if f.arity == 0:
                    if s == 1:
                        terms.append(App(f))
                    continue
                for combo in _arg_combinations(f.arity, s - 1, ground_terms):
                    terms.append(App(f, combo))
            by_size[s] = terms
        return by_size[s]

    defined = sorted(
        (f for f in trs.signature if f.kind in (DEFINED, SHARP)),
        key=lambda f: f.name,
    )
    for total in range(1, n + 1):
        for f in defined:
            if f.arity == 0:
                if total == 1:
                    yield App(f)
                continue
            for combo in _arg_combinations(f.arity, total - 1, ground_terms):
                yield App(f, combo)


def _arg_combinations(arity: int, budget: int, terms_of_size) -> Iterator[tuple]:
    """Tuples of ground terms whose sizes sum exactly to budget."""
    if arity == 0:
        if budget == 0:
            yield ()
        return
    for first_size in range(1, budget - arity + 2):
        for first in terms_of_size(first_size):
            for rest in _arg_combinations(arity - 1, budget - first_size, terms_of_size):
                yield (first,) + rest
