import pytest
from hypothesis import given, settings

from critnode.errors import BudgetExceededError, InvalidInputError
from critnode.oracle import oracle_solve
from support import complete_system, three_node_system, random_system, reference_optimum, systems


def test_three_node():
    r = oracle_solve(three_node_system(), 1)
    assert (r.optimal_f, r.optimal_attack_sets, r.l_max, r.evaluated) == (1, ((3,),), 2, 3)


def test_complete_k4():
    r = oracle_solve(complete_system(4), 1)
    assert r.optimal_f == 3 and r.l_max == 1
    assert r.optimal_attack_sets == ((1,), (2,), (3,), (4,))


def test_budget_guard_names_the_count():
    with pytest.raises(BudgetExceededError, match=r"C\(10,5\) = 252"):
        oracle_solve(complete_system(10), 5, budget=100)


@pytest.mark.parametrize("k", [0, 3, 4])
def test_k_range(k):
    with pytest.raises(InvalidInputError):
        oracle_solve(three_node_system(), k)


@pytest.mark.parametrize("seed", range(6))
def test_parallel_equals_serial(seed):
    s = random_system(9, seed)
    assert oracle_solve(s, 3, workers=3) == oracle_solve(s, 3)


@settings(max_examples=60, deadline=None)
@given(systems(min_n=3, max_n=7))
def test_matches_networkx_reference(system):
    for k in range(1, min(system.n, 4)):
        r = oracle_solve(system, k)
        assert (r.optimal_f, r.l_max) == reference_optimum(system, k)
        assert list(r.optimal_attack_sets) == sorted(r.optimal_attack_sets)


def test_to_dict():
    assert oracle_solve(three_node_system(), 1).to_dict() == {
        "optimal_f": 1, "optimal_attack_sets": [[3]], "l_max": 2, "evaluated": 3}
