"""Call graph estimation over dependency pair problems.

Whether one pair can follow another in a derivation is undecidable, so
the graph is over-approximated: the right-hand side of the source pair
is abstracted by replacing every subterm the base system might rewrite
with a fresh variable, and an edge is drawn when the abstraction unifies
with the target pair's left-hand side.  For innermost problems the
abstraction keeps subterms of the source left-hand side concrete, since
those are instantiated to normal forms.

On top of the graph sit the strongly connected components, their acyclic
quotient, and the source-rooted path prefixes driving the per-path
analysis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .pairs import WEAK, DpProblem
from .terms import (
    App,
    COMPOUND,
    SHARP,
    Term,
    Trs,
    Var,
    rename_variables,
    subterms,
    unify,
)
from .tpdb import render_term

PATH_BUDGET = 10_000

_fresh = itertools.count()


def _hole() -> Var:
    return Var(f"_{next(_fresh)}")


def _cap(trs: Trs, t: Term, protected: frozenset[Term]) -> Term:
    """Abstract every subterm the base rules could rewrite.

    `protected` subterms survive untouched; variables outside it turn
    into fresh holes (their instantiation is arbitrary), and an
    application becomes a hole when, after abstracting its arguments, it
    unifies with a renamed rule left-hand side.
    """
    if t in protected:
        return t
    if isinstance(t, Var):
        return _hole()
    capped = App(t.sym, tuple(_cap(trs, a, protected) for a in t.args))
    for rule in trs.rules:
        if unify(capped, rename_variables(rule.lhs)) is not None:
            return _hole()
    return capped


def _call_components(t: Term) -> list[Term]:
    """The marked-call subterms under the compound spine of a pair rhs."""
    if isinstance(t, Var):
        return []
    if t.sym.kind == SHARP:
        return [t]
    if t.sym.kind == COMPOUND:
        return [w for arg in t.args for w in _call_components(arg)]
    return []


@dataclass(frozen=True)
class DepGraph:
    nodes: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    problem: DpProblem

    def successors(self, node: int) -> list[int]:
        return sorted(b for a, b in self.edges if a == node)


def estimate_graph(trs: Trs, problem: DpProblem) -> DepGraph:
    """Over-approximate which pair can follow which.

    Weak problems abstract pair right-hand sides with every variable
    held arbitrary; the innermost and standard flavours keep subterms of
    the source pair's own left-hand side concrete.
    """
    keep_lhs_parts = problem.kind != WEAK
    nodes = tuple(range(len(problem.pairs)))
    edges = set()
    for i, source in enumerate(problem.pairs):
        protected = frozenset(
            u for arg in source.lhs.args for u in subterms(arg)
        ) if keep_lhs_parts else frozenset()
        abstracted = [
            _cap(trs, component, protected)
            for component in _call_components(source.rhs)
        ]
        for j, target in enumerate(problem.pairs):
            fresh_lhs = rename_variables(target.lhs)
            if any(unify(w, fresh_lhs) is not None for w in abstracted):
                edges.add((i, j))
    return DepGraph(nodes, frozenset(edges), problem)


@dataclass(frozen=True)
class QuotientDag:
    """SCC partition with its acyclic edge relation.

    `sccs` is topologically sorted; `dag_edges` and `sources` use
    indices into it.
    """

    sccs: tuple[frozenset[int], ...]
    dag_edges: frozenset[tuple[int, int]]
    sources: tuple[int, ...]

    def scc_of(self, node: int) -> int:
        for index, scc in enumerate(self.sccs):
            if node in scc:
                return index
        raise KeyError(node)


def quotient(graph: DepGraph) -> QuotientDag:
    """Collapse strongly connected components; standard Tarjan walk."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    sccs: list[frozenset[int]] = []
    counter = itertools.count()

    for root in graph.nodes:
        if root in index:
            continue
        work = [(root, iter(graph.successors(root)))]
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while work:
            node, successors = work[-1]
            advanced = False
            for succ in successors:
                if succ not in index:
                    index[succ] = low[succ] = next(counter)
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(graph.successors(succ))))
                    advanced = True
                    break
                if succ in on_stack and index[succ] < low[node]:
                    low[node] = index[succ]
            if advanced:
                continue
            work.pop()
            if work and low[node] < low[work[-1][0]]:
                low[work[-1][0]] = low[node]
            if low[node] == index[node]:
                component = set()
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.add(member)
                    if member == node:
                        break
                sccs.append(frozenset(component))

    # Tarjan emits components in reverse topological order
    sccs.reverse()
    where = {node: i for i, scc in enumerate(sccs) for node in scc}
    dag_edges = frozenset(
        (where[a], where[b]) for a, b in graph.edges if where[a] != where[b]
    )
    with_incoming = {b for _, b in dag_edges}
    sources = tuple(
        i for i in range(len(sccs)) if i not in with_incoming
    )
    return QuotientDag(tuple(sccs), dag_edges, sources)


def analysis_paths(
    q: QuotientDag, budget: int = PATH_BUDGET
) -> set[tuple[frozenset[int], ...]]:
    """All source-rooted paths through the quotient.

    Prefix-closed by construction: every prefix of a maximal path is a
    source-rooted path and vice versa.  Shared suffixes in the DAG are
    walked once per route, which is exactly the unfolding into a forest.
    """
    successors: dict[int, list[int]] = {}
    for a, b in q.dag_edges:
        successors.setdefault(a, []).append(b)
    paths: set[tuple[frozenset[int], ...]] = set()
    for source in q.sources:
        stack: list[tuple[int, ...]] = [(source,)]
        while stack:
            path = stack.pop()
            paths.add(tuple(q.sccs[i] for i in path))
            if len(paths) > budget:
                raise ResourceWarning(
                    f"more than {budget} analysis paths; giving up"
                )
            for succ in successors.get(path[-1], ()):
                stack.append(path + (succ,))
    return paths


def to_dot(graph: DepGraph, with_pairs: bool = False) -> str:
    """DOT text for eyeballing the estimated graph."""
    lines = ["digraph dependency_pairs {"]
    for i in graph.nodes:
        if with_pairs:
            pair = graph.problem.pairs[i]
            label = f"{i}: {render_term(pair.lhs)} -> {render_term(pair.rhs)}"
        else:
            label = str(i)
        lines.append(f'  n{i} [label="{label}"];')
    for a, b in sorted(graph.edges):
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
