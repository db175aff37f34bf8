"""Graph estimation, SCC quotient, and analysis path tests.

Edge-set goldens were derived by hand from the pair listings: an edge
i -> j is present exactly when the abstracted call component of pair i
unifies with a renamed copy of pair j's left-hand side.
"""

import itertools

import pytest

from rcterm.depgraph import (
    DepGraph,
    analysis_paths,
    estimate_graph,
    quotient,
    to_dot,
)
from rcterm.pairs import STANDARD, WEAK, WEAK_INNERMOST, dependency_pairs
from rcterm.terms import Var, match, rewrite_successors, substitute, variables
from rcterm.tpdb import load_corpus, parse_trs


def graph_for(name, kind):
    trs = load_corpus(name)
    problem = dependency_pairs(trs, kind)
    return trs, problem, estimate_graph(trs, problem)


class TestGoldenGraphs:
    def test_shuffle_weak_graph_edges(self):
        _, _, graph = graph_for("shuffle", WEAK)
        assert graph.edges == {
            (1, 0), (1, 1),
            (3, 0), (3, 1),
            (5, 4), (5, 5),
        }

    def test_shuffle_sources(self):
        _, _, graph = graph_for("shuffle", WEAK)
        q = quotient(graph)
        assert all(len(scc) == 1 for scc in q.sccs)
        sources = {q.sccs[i] for i in q.sources}
        assert sources == {frozenset({2}), frozenset({3}), frozenset({5})}

    def test_shuffle_analysis_paths(self):
        _, _, graph = graph_for("shuffle", WEAK)
        paths = analysis_paths(quotient(graph))
        f = frozenset
        assert paths == {
            (f({2}),),
            (f({3}),),
            (f({3}), f({0})),
            (f({3}), f({1})),
            (f({3}), f({1}), f({0})),
            (f({5}),),
            (f({5}), f({4})),
        }

    def test_exp_standard_graph_edges(self):
        _, _, graph = graph_for("exp", STANDARD)
        assert graph.edges == {(0, 2), (1, 0), (1, 1), (2, 2)}

    def test_toggle_graph_is_edgeless(self):
        _, problem, graph = graph_for("toggle", WEAK)
        assert len(problem.pairs) == 4
        assert graph.edges == frozenset()

    def test_toggle_four_trivial_paths(self):
        _, _, graph = graph_for("toggle", WEAK)
        q = quotient(graph)
        assert len(q.sources) == 4
        paths = analysis_paths(q)
        assert len(paths) == 4
        assert all(len(path) == 1 for path in paths)


class TestAbstraction:
    """A lhs subterm is normal under innermost evaluation, so keeping it
    concrete can refute edges the weak estimation must keep."""

    RULES = """
    (VAR x)
    (RULES
      f(g(x)) -> h(g(x))
      g(a) -> b
      h(b) -> f(b)
    )
    """

    def test_weak_estimation_keeps_the_edge(self):
        trs = parse_trs(self.RULES)
        problem = dependency_pairs(trs, WEAK)
        graph = estimate_graph(trs, problem)
        assert (0, 2) in graph.edges

    def test_innermost_estimation_drops_the_edge(self):
        trs = parse_trs(self.RULES)
        problem = dependency_pairs(trs, STANDARD)
        target = [
            i for i, p in enumerate(problem.pairs)
            if p.lhs.sym.name == "h#"
        ]
        graph = estimate_graph(trs, problem)
        assert not any((0, j) in graph.edges for j in target)

    def test_variable_rhs_has_no_outgoing_edges(self):
        trs = load_corpus("list_utils")
        problem = dependency_pairs(trs, WEAK)
        graph = estimate_graph(trs, problem)
        variable_rhs = [
            i for i, p in enumerate(problem.pairs) if isinstance(p.rhs, Var)
        ]
        assert variable_rhs
        for i in variable_rhs:
            assert graph.successors(i) == []


def _ground_pool(trs, depth):
    """Small ground constructor terms for instantiating pair variables."""
    from rcterm.terms import App
    constructors = sorted(
        trs.constructor_symbols, key=lambda f: (f.arity, f.name)
    )
    pool = [App(f, ()) for f in constructors if f.arity == 0]
    for _ in range(depth):
        layer = []
        for f in constructors:
            if f.arity == 0 or f.arity > 2:
                continue
            for args in itertools.product(pool[:3], repeat=f.arity):
                layer.append(App(f, args))
        pool = pool + layer[:6]
    return pool[:8]


@pytest.mark.parametrize("name,kind", [
    ("mult", STANDARD),
    ("exp", STANDARD),
    ("shuffle", WEAK),
])
def test_estimation_is_sound_on_bounded_instances(name, kind):
    """If some ground instance of a call component actually reaches a
    pair's left-hand side, the estimated graph must have that edge."""
    trs = load_corpus(name)
    problem = dependency_pairs(trs, kind)
    graph = estimate_graph(trs, problem)
    pool = _ground_pool(trs, 2)
    strategy = "full" if kind == WEAK else "innermost"

    from rcterm.depgraph import _call_components

    for i, source in enumerate(problem.pairs):
        for component in _call_components(source.rhs):
            names = sorted(variables(component))
            for values in itertools.islice(
                itertools.product(pool, repeat=len(names)), 16
            ):
                start = substitute(component, dict(zip(names, values)))
                seen = {start}
                frontier = [start]
                while frontier and len(seen) < 300:
                    term = frontier.pop()
                    for succ in rewrite_successors(trs, term, strategy):
                        if succ not in seen:
                            seen.add(succ)
                            frontier.append(succ)
                for reduct in seen:
                    for j, target in enumerate(problem.pairs):
                        if match(target.lhs, reduct) is not None:
                            assert (i, j) in graph.edges, (
                                f"pair {i} reaches pair {j} via "
                                f"{reduct} but the edge is missing"
                            )


class TestQuotient:
    def test_self_loop_is_its_own_component(self):
        trs = load_corpus("exp")
        problem = dependency_pairs(trs, STANDARD)
        graph = DepGraph((0, 1, 2), frozenset({(0, 0)}), problem)
        q = quotient(graph)
        assert frozenset({0}) in q.sccs
        assert q.dag_edges == frozenset()
        assert len(q.sources) == 3

    def test_two_node_cycle_with_tail(self):
        trs = load_corpus("exp")
        problem = dependency_pairs(trs, STANDARD)
        graph = DepGraph(
            (0, 1, 2), frozenset({(0, 1), (1, 0), (1, 2)}), problem
        )
        q = quotient(graph)
        assert set(q.sccs) == {frozenset({0, 1}), frozenset({2})}
        assert q.dag_edges == {(0, 1)}
        assert q.sccs[0] == frozenset({0, 1})
        assert q.sources == (0,)

    def test_partition_and_topological_order(self):
        for name, kind in [("shuffle", WEAK), ("exp", STANDARD),
                           ("list_utils", WEAK_INNERMOST)]:
            _, problem, graph = graph_for(name, kind)
            q = quotient(graph)
            nodes = [n for scc in q.sccs for n in scc]
            assert sorted(nodes) == list(graph.nodes)
            assert len(nodes) == len(set(nodes))
            for a, b in q.dag_edges:
                assert a < b

    def test_every_component_lies_on_some_path(self):
        for name, kind in [("shuffle", WEAK), ("exp", STANDARD)]:
            _, _, graph = graph_for(name, kind)
            q = quotient(graph)
            paths = analysis_paths(q)
            on_paths = {scc for path in paths for scc in path}
            assert on_paths == set(q.sccs)

    def test_paths_are_prefix_closed(self):
        _, _, graph = graph_for("shuffle", WEAK)
        paths = analysis_paths(quotient(graph))
        for path in paths:
            for k in range(1, len(path)):
                assert path[:k] in paths


def test_path_budget_is_enforced():
    trs = load_corpus("exp")
    problem = dependency_pairs(trs, STANDARD)
    # chain of 14 diamonds: 2^14 maximal paths, far over the budget
    edges = set()
    for d in range(14):
        base = 3 * d
        edges |= {(base, base + 1), (base, base + 2),
                  (base + 1, base + 3), (base + 2, base + 3)}
    nodes = tuple(range(3 * 14 + 1))
    graph = DepGraph(nodes, frozenset(edges), problem)
    with pytest.raises(ResourceWarning, match="analysis paths"):
        analysis_paths(quotient(graph))


def test_dot_dump_mentions_nodes_and_edges():
    _, _, graph = graph_for("shuffle", WEAK)
    dot = to_dot(graph)
    assert dot.startswith("digraph")
    assert "n5 -> n4;" in dot
    assert "n1 -> n1;" in dot
    labeled = to_dot(graph, with_pairs=True)
    assert "shuffle#" in labeled
