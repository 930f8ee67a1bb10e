from itertools import combinations

import pytest
from hypothesis import given, settings

from critnode import kernels
from critnode.cascade import last_failure_stage, severity, simulate
from critnode.errors import InvalidInputError
from critnode.graph import InterdependentSystem, UndirectedGraph, component_labels
from critnode.kernels import PackedSystem
from support import complete_system, three_node_system, reference_cascade, systems_with_attack


def test_three_node_attack_centre():
    t = simulate(three_node_system(), [3])
    s1, s2 = t.stages[0], t.stages[1]
    assert s1.removed_a == {(1, 3), (2, 3)}
    assert s1.removed_b == {(1, 3), (2, 3)}
    assert s2.removed_b == {(1, 2)}
    assert t.last_failure_stage == 2
    assert t.largest_component_size == 1


def test_three_node_attack_leaf():
    assert severity(three_node_system(), [1]) == 2
    assert last_failure_stage(three_node_system(), [1]) == 1


def test_complete_layers_never_cascade():
    t = simulate(complete_system(3), [1])
    assert t.stages[-1].edges_a == {(2, 3)} and t.stages[-1].edges_b == {(2, 3)}
    assert t.last_failure_stage == 1
    assert t.largest_component_size == 2


def test_path_against_cycle_by_hand():
    # A: 1-2-3-4, B: 1-2-3-4-1, attack {2}
    s = InterdependentSystem.from_edges(4, [(1, 2), (2, 3), (3, 4)], [(1, 2), (2, 3), (3, 4), (1, 4)])
    t = simulate(s, [2])
    # stage 1 leaves A = {3,4}, B = {3,4},{1,4}
    assert t.stages[0].edges_a == {(3, 4)}
    assert t.stages[0].edges_b == {(1, 4), (3, 4)}
    # stage 2: 1 and 4 are apart in A, so B loses {1,4}
    assert t.stages[1].removed_b == {(1, 4)}
    # stage 3: A's {3,4} still joined in B; quiet
    assert not t.stages[2].removed_any
    assert t.last_failure_stage == 2
    assert t.largest_component_size == 2
    stages, last, f = reference_cascade(s, [2])
    assert (last, f) == (2, 2)


def test_quiet_stage_two_can_still_fail_at_three():
    # B loses nothing at stage 2, but A's link {1,2} has no B path
    s = InterdependentSystem.from_edges(3, [(1, 2)], [])
    t = simulate(s, [3])
    assert not t.stages[1].removed_any
    assert t.stages[2].removed_a == {(1, 2)}
    assert t.last_failure_stage == 3
    assert t.largest_component_size == 1
    # one link in total, yet the last failure is at stage 3
    assert t.last_failure_stage == len(s.graph_a.edges) + len(s.graph_b.edges) + 2


@pytest.mark.parametrize("n", range(3, 9))
def test_complete_layers_closed_form(n):
    s = complete_system(n)
    for k in range(1, n):
        assert severity(s, range(1, k + 1)) == n - k


@pytest.mark.parametrize("attack", [[], [0], [5]])
def test_bad_attack_rejected(attack):
    with pytest.raises(InvalidInputError):
        simulate(three_node_system(), attack)


def test_trace_dict():
    d = simulate(three_node_system(), [3]).to_dict()
    assert d["attack"] == [3] and d["last_failure_stage"] == 2 and d["f"] == 1
    assert d["components"] == [[1], [2], [3]]
    assert [st["stage"] for st in d["stages"]] == [1, 2, 3]


@settings(max_examples=300, deadline=None)
@given(systems_with_attack(max_n=9))
def test_matches_independent_reference(case):
    system, attack = case
    t = simulate(system, attack)
    stages, last, f = reference_cascade(system, attack)
    assert t.last_failure_stage == last
    assert t.largest_component_size == f
    for snap, (ea, eb) in zip(t.stages, stages):
        assert snap.edges_a == ea and snap.edges_b == eb


@settings(max_examples=300, deadline=None)
@given(systems_with_attack(max_n=9))
def test_trace_invariants(case):
    system, attack = case
    t = simulate(system, attack)
    prev_a, prev_b = system.graph_a.edges, system.graph_b.edges
    for snap in t.stages:
        assert snap.edges_a <= prev_a and snap.edges_b <= prev_b
        prev_a, prev_b = snap.edges_a, snap.edges_b
    # a quiet stage from 3 on ends the cascade
    quiet = [s.stage for s in t.stages if s.stage >= 3 and not s.removed_any]
    assert quiet == [t.stages[-1].stage]
    assert all(not s.removed_any for s in t.stages if s.stage > t.last_failure_stage)
    # stage 2 can be quiet, so the bound is one more than the edge count plus one
    assert t.last_failure_stage <= len(system.graph_a.edges) + len(system.graph_b.edges) + 2
    # both layers induce the same partition at the fixpoint
    n = system.n
    assert component_labels(n, t.stages[-1].edges_a) == component_labels(n, t.stages[-1].edges_b)
    assert t.largest_component_size == max(len(c) for c in t.final_components)
    for v in attack:
        assert frozenset({v}) in t.final_components


@settings(max_examples=200, deadline=None)
@given(systems_with_attack(max_n=9))
def test_kernels_agree_with_trace(case):
    system, attack = case
    t = simulate(system, attack)
    packed = PackedSystem(system)
    for impl in kernels.available().values():
        assert packed.outcome(attack, impl) == (t.last_failure_stage, t.largest_component_size)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_all_but_one_attacked(n):
    s = InterdependentSystem(UndirectedGraph.complete(n), UndirectedGraph.empty(n))
    for keep in range(1, n + 1):
        assert severity(s, [v for v in range(1, n + 1) if v != keep]) == 1


def test_severity_ignores_attack_order():
    s = three_node_system()
    for a in combinations(range(1, 4), 2):
        assert severity(s, a) == severity(s, reversed(a))
