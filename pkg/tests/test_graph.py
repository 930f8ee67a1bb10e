import json

import networkx as nx
import pytest
from hypothesis import given, settings

from critnode.errors import InvalidInputError
from critnode.graph import (
    InterdependentSystem,
    UndirectedGraph,
    articulation_nodes,
    canonical,
    connected_components,
    connectivity_closure,
    validate_attack,
    warshall_closure,
)
from support import three_node_system, graphs


def test_edges_are_canonical():
    g = UndirectedGraph.from_edges(4, [(3, 1), (1, 3), (4, 2)])
    assert g.edges == {(1, 3), (2, 4)}
    assert g.has_edge(3, 1) and g.has_edge(1, 3)
    assert canonical(5, 2) == (2, 5)


@pytest.mark.parametrize("edges", [[(1, 1)], [(0, 2)], [(1, 5)]])
def test_invalid_edges_rejected(edges):
    with pytest.raises(InvalidInputError):
        UndirectedGraph.from_edges(4, edges)


def test_non_canonical_direct_construction_rejected():
    with pytest.raises(InvalidInputError):
        UndirectedGraph(3, frozenset({(2, 1)}))


def test_layers_must_share_nodes():
    with pytest.raises(InvalidInputError):
        InterdependentSystem(UndirectedGraph.empty(3), UndirectedGraph.empty(4))


def test_json_round_trip_and_format():
    s = three_node_system()
    text = s.to_json()
    assert json.loads(text) == {"n": 3, "edges_a": [[1, 3], [2, 3]], "edges_b": [[1, 2], [1, 3], [2, 3]]}
    assert InterdependentSystem.from_json(text) == s
    assert InterdependentSystem.from_json(text).to_json() == text


@pytest.mark.parametrize("text", ["not json", '{"n": 3}', '{"n": 3, "edges_a": [[1, 4]], "edges_b": []}'])
def test_malformed_json_rejected(text):
    with pytest.raises(InvalidInputError):
        InterdependentSystem.from_json(text)


@pytest.mark.parametrize("attack", [[], [0], [4], [1, 9]])
def test_attack_validation(attack):
    with pytest.raises(InvalidInputError):
        validate_attack(attack, 3)


def test_closure_examples():
    path = three_node_system().graph_a
    assert connectivity_closure(path) == {(1, 2), (1, 3), (2, 3)}
    assert connectivity_closure(UndirectedGraph.empty(3)) == frozenset()
    two = connectivity_closure(UndirectedGraph.from_edges(5, [(1, 2), (4, 5)]))
    assert (1, 2) in two and (4, 5) in two and (1, 4) not in two


def test_component_examples():
    assert connected_components(three_node_system().graph_a) == [frozenset({1, 2, 3})]
    assert connected_components(UndirectedGraph.empty(4)) == [frozenset({v}) for v in range(1, 5)]
    g = UndirectedGraph.from_edges(6, [(1, 2), (2, 3), (5, 6)])
    assert connected_components(g) == [frozenset({1, 2, 3}), frozenset({4}), frozenset({5, 6})]


def test_articulation_examples():
    assert articulation_nodes(UndirectedGraph.from_edges(3, [(1, 2), (2, 3)])) == {2}
    assert articulation_nodes(UndirectedGraph.complete(4)) == frozenset()
    assert articulation_nodes(three_node_system().graph_a) == {3}


def test_degree():
    g = three_node_system().graph_a
    assert [g.degree(v) for v in g.nodes] == [1, 1, 2]
    with pytest.raises(InvalidInputError):
        g.degree(4)


@settings(max_examples=150, deadline=None)
@given(graphs(max_n=12))
def test_closure_matches_literal_warshall(g):
    assert connectivity_closure(g) == warshall_closure(g)


@settings(max_examples=150, deadline=None)
@given(graphs(max_n=10))
def test_components_partition_nodes(g):
    comps = connected_components(g)
    assert sum(len(c) for c in comps) == g.n
    assert frozenset().union(*comps) == frozenset(g.nodes)
    closure = connectivity_closure(g)
    for c in comps:
        members = sorted(c)
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                assert (members[a], members[b]) in closure


def _count_components_without(g, v):
    rest = [u for u in g.nodes if u != v]
    h = nx.Graph()
    h.add_nodes_from(rest)
    h.add_edges_from(e for e in g.edges if v not in e)
    return nx.number_connected_components(h)


@settings(max_examples=150, deadline=None)
@given(graphs(max_n=10))
def test_articulation_definition(g):
    base = len(connected_components(g))
    expected = {v for v in g.nodes if _count_components_without(g, v) > base}
    assert articulation_nodes(g) == expected


@settings(max_examples=100, deadline=None)
@given(graphs(max_n=10))
def test_articulation_matches_networkx(g):
    h = nx.Graph()
    h.add_nodes_from(g.nodes)
    h.add_edges_from(g.edges)
    assert articulation_nodes(g) == set(nx.articulation_points(h))


def test_without_nodes_keeps_ids():
    g = UndirectedGraph.complete(4).without_nodes([2])
    assert g.n == 4 and g.edges == {(1, 3), (1, 4), (3, 4)}
