"""Brute-force ground truth at desk scale.

Exact derivation heights by exhaustive, memoized search over the rewrite
relation; runtime-complexity tables over enumerated basic terms; and
validation of polynomial bounds against those tables.  Nothing here ever
claims termination: a cycle or an exhausted node budget raises
DerivationOverflow, so every number the module does return is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import (
    Rule,
    Term,
    Trs,
    basic_terms_up_to,
    labeled_successors,
    rewrite_successors,
    size,
)
from .tpdb import render_term

NODE_BUDGET = 10**6


class DerivationOverflow(Exception):
    """The search hit its node budget or found a rewrite cycle."""


def _longest_path(start: Term, expand, budget: int, memo: dict) -> int:
    """Longest weighted path from start through a finitely branching
    graph.  `expand(t)` lists (weight, successor) edges.  A back edge
    means a cycle, hence an unbounded path; exploring more than `budget`
    new nodes means we give up.  Both raise DerivationOverflow.
    """
    if start in memo:
        return memo[start]
    expanded = 0
    on_stack = {start}
    # frame: [node, edge list, next edge index, best path, entry weight]
    stack = [[start, None, 0, 0, 0]]
    while stack:
        frame = stack[-1]
        if frame[1] is None:
            expanded += 1
            if expanded > budget:
                raise DerivationOverflow(f"node budget {budget} exhausted")
            frame[1] = expand(frame[0])
        node, edges, i, best, entry = frame
        if i == len(edges):
            memo[node] = best
            on_stack.discard(node)
            stack.pop()
            if stack and entry + best > stack[-1][3]:
                stack[-1][3] = entry + best
            continue
        frame[2] += 1
        weight, child = edges[i]
        if child in memo:
            if weight + memo[child] > best:
                frame[3] = weight + memo[child]
            continue
        if child in on_stack:
            raise DerivationOverflow("the term rewrites back to itself")
        on_stack.add(child)
        stack.append([child, None, 0, 0, weight])
    return memo[start]


def derivation_height(
    trs: Trs,
    t: Term,
    strategy: str = "full",
    budget: int = NODE_BUDGET,
    memo: dict | None = None,
) -> int:
    """Length of the longest rewrite sequence starting at t.

    Exhaustive depth-first walk of the reachability graph, each step
    counting one.  Pass a shared `memo` dict to reuse results across
    calls on the same system and strategy.
    """

    def expand(s: Term) -> list[tuple[int, Term]]:
        return [(1, u) for u in rewrite_successors(trs, s, strategy)]

    return _longest_path(t, expand, budget, {} if memo is None else memo)


def relative_height(
    strict,
    weak,
    t: Term,
    strategy: str = "full",
    budget: int = NODE_BUDGET,
) -> int:
    """Max number of strict-rule steps over the combined rewrite relation.

    `strict` and `weak` are rule sequences; steps by weak rules are free.
    This is the quantity relative-rewriting bounds speak about.
    """
    strict, weak = tuple(strict), tuple(weak)
    combined = Trs.from_rules(strict + weak)
    strict_rules = set(combined.rules[: len(strict)])

    def expand(s: Term) -> list[tuple[int, Term]]:
        return [
            (1 if rule in strict_rules else 0, u)
            for rule, u in labeled_successors(combined, s, strategy)
        ]

    return _longest_path(t, expand, budget, {})


def used_rules(
    trs: Trs,
    t: Term,
    strategy: str = "full",
    budget: int = NODE_BUDGET,
) -> set[Rule]:
    """Every rule applied somewhere in the reachable rewrite graph of t."""
    seen = {t}
    queue = [t]
    used: set[Rule] = set()
    while queue:
        s = queue.pop()
        for rule, u in labeled_successors(trs, s, strategy):
            used.add(rule)
            if u not in seen:
                if len(seen) >= budget:
                    raise DerivationOverflow(f"node budget {budget} exhausted")
                seen.add(u)
                queue.append(u)
    return used


@dataclass(frozen=True)
class RcRow:
    """One table row: basic terms of one exact size, cumulative max height."""

    size: int
    count: int
    height: int
    witness: Term | None
    overflowed: bool = False


@dataclass(frozen=True)
class RcTable:
    strategy: str
    rows: tuple[RcRow, ...]

    def bound(self, n: int) -> int:
        """Max derivation height over basic terms of size at most n."""
        best = 0
        for row in self.rows:
            if row.size <= n:
                best = row.height
        return best

    def to_tsv(self) -> str:
        lines = ["size\tcount\theight\twitness\tcomplete"]
        for row in self.rows:
            witness = "-" if row.witness is None else render_term(row.witness)
            complete = "no" if row.overflowed else "yes"
            lines.append(
                f"{row.size}\t{row.count}\t{row.height}\t{witness}\t{complete}"
            )
        return "\n".join(lines) + "\n"


def empirical_rc(
    trs: Trs,
    nmax: int,
    strategy: str = "full",
    budget: int = NODE_BUDGET,
) -> RcTable:
    """Measure runtime complexity by enumerating basic terms up to nmax.

    Heights are cumulative (max over all sizes up to the row's), matching
    the definition of the runtime complexity function.  A row where some
    term blew the budget is marked overflowed; its height is then only a
    lower bound.
    """
    by_size: dict[int, list[Term]] = {n: [] for n in range(1, nmax + 1)}
    for t in basic_terms_up_to(trs, nmax):
        by_size[size(t)].append(t)
    memo: dict = {}
    rows = []
    best, witness = 0, None
    for n in range(1, nmax + 1):
        overflowed = False
        for t in by_size[n]:
            try:
                height = derivation_height(trs, t, strategy, budget, memo)
            except DerivationOverflow:
                overflowed = True
                continue
            if height > best:
                best, witness = height, t
        rows.append(RcRow(n, len(by_size[n]), best, witness, overflowed))
    return RcTable(strategy, tuple(rows))


@dataclass(frozen=True)
class ValidationRow:
    size: int
    observed: int
    allowed: int | None
    ok: bool
    witness: Term | None


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple[ValidationRow, ...]

    @property
    def ok(self) -> bool:
        return all(row.ok for row in self.rows)

    def to_text(self) -> str:
        lines = []
        for row in self.rows:
            if row.allowed is None:
                lines.append(f"n={row.size}: observed {row.observed}, no bound")
                continue
            verdict = "ok" if row.ok else "EXCEEDED"
            detail = f"n={row.size}: {row.observed} <= {row.allowed} {verdict}"
            if not row.ok and row.witness is not None:
                detail += f" by {render_term(row.witness)}"
            lines.append(detail)
        status = "pass" if self.ok else "FAIL"
        return "\n".join([f"oracle validation: {status}"] + lines) + "\n"


def validate_bound(
    trs: Trs,
    cert,
    nmax: int,
    strategy: str = "full",
    budget: int = NODE_BUDGET,
) -> ValidationReport:
    """Check a certificate's explicit size bound against measured heights.

    `cert` needs a `size_bound(n)` method returning the numeric bound for
    basic terms of size n, or None when it asserts nothing checkable (an
    unknown or a class without constants); those rows pass vacuously.
    An overflowed table row fails: the oracle could not confirm it.
    """
    table = empirical_rc(trs, nmax, strategy, budget)
    rows = []
    for row in table.rows:
        allowed = cert.size_bound(row.size)
        if allowed is None:
            rows.append(ValidationRow(row.size, row.height, None, True, None))
            continue
        ok = row.height <= allowed and not row.overflowed
        rows.append(
            ValidationRow(
                row.size, row.height, allowed, ok, None if ok else row.witness
            )
        )
    return ValidationReport(tuple(rows))
