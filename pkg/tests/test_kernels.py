"""The compiled and pure-Python kernels must be interchangeable."""
import random
import subprocess
import sys

import pycosat
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critnode import kernels
from critnode.kernels import PackedSystem
from support import random_system, systems_with_attack


def test_fallback_is_always_available():
    assert "python" in kernels.available()
    assert kernels.get("python").IMPLEMENTATION == "python"
    with pytest.raises(ValueError):
        kernels.get("fortran")


def test_env_var_forces_pure_python():
    code = "from critnode import kernels; print(kernels.IMPLEMENTATION)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={"CRITNODE_PURE_PYTHON": "1", "PATH": ""}, check=True)
    assert out.stdout.strip() == "python"


def test_default_prefers_compiled():
    if "cython" in kernels.available():
        assert kernels.IMPLEMENTATION == "cython"
    else:
        assert kernels.IMPLEMENTATION == "python"


clauses_st = st.integers(1, 14).flatmap(lambda nv: st.tuples(
    st.just(nv),
    st.lists(st.lists(st.integers(1, nv).flatmap(lambda v: st.sampled_from([v, -v])), min_size=1, max_size=4),
             max_size=45),
))


def _satisfies(val, clauses):
    return all(any((q > 0) == (val[abs(q)] > 0) for q in c) for c in clauses)


@settings(max_examples=400, deadline=None)
@given(clauses_st)
def test_dpll_sound_complete_and_identical(case):
    nv, clauses = case
    results = {name: kernels.dpll_solve(nv, clauses, impl=mod) for name, mod in kernels.available().items()}
    ref = pycosat.solve(clauses) if clauses else []
    for val in results.values():
        assert (val is None) == (ref == "UNSAT")
        if val is not None:
            assert _satisfies(val, clauses)
    assert len({repr(v) for v in results.values()}) == 1


@settings(max_examples=300, deadline=None)
@given(clauses_st, st.data())
def test_unit_propagation_identical(case, data):
    nv, clauses = case
    assumptions = data.draw(st.lists(st.integers(1, nv).flatmap(lambda v: st.sampled_from([v, -v])), max_size=3))
    results = [kernels.unit_propagate(nv, clauses, assumptions, impl=mod)
               for mod in kernels.available().values()]
    assert all(r == results[0] for r in results)


def test_unit_propagation_chain(impl):
    # 1 -> 2 -> 3, and 3 -> not 4
    clauses = [(-1, 2), (-2, 3), (-3, -4)]
    assert kernels.unit_propagate(4, clauses, [1], impl=impl) == [0, 1, 1, 1, -1]
    assert kernels.unit_propagate(4, clauses, [1, 4], impl=impl) is None
    assert kernels.unit_propagate(4, clauses, [], impl=impl) == [0, 0, 0, 0, 0]


def test_dpll_small_cases(impl):
    assert kernels.dpll_solve(1, [(1,), (-1,)], impl=impl) is None
    val = kernels.dpll_solve(2, [(1, 2), (-1, 2)], impl=impl)
    assert val[2] == 1
    assert kernels.dpll_solve(0, [], impl=impl) == [0]
    assert kernels.dpll_solve(2, [()], impl=impl) is None
    # lowest variable first, true first
    assert kernels.dpll_solve(3, [(1, 2, 3)], impl=impl) == [0, 1, 1, 1]


def test_dpll_duplicate_literals(impl):
    val = kernels.dpll_solve(2, [(1, 1, 2), (-1, -1), (-2, 1, -2)], impl=impl)
    assert val is None or _satisfies(val, [(1, 2), (-1,), (-2, 1)])
    assert val is None


def test_dpll_random_3cnf_agrees_with_pycosat(impl):
    rng = random.Random(7)
    for _ in range(500):
        clauses = [tuple(rng.choice([-1, 1]) * rng.randint(1, 30) for _ in range(3)) for _ in range(128)]
        val = kernels.dpll_solve(30, clauses, impl=impl)
        assert (val is None) == (pycosat.solve(clauses) == "UNSAT")


@settings(max_examples=200, deadline=None)
@given(systems_with_attack(max_n=10))
def test_cascade_kernels_identical(case):
    system, attack = case
    packed = PackedSystem(system)
    outs = {packed.outcome(attack, mod) for mod in kernels.available().values()}
    assert len(outs) == 1


def test_cascade_kernel_on_edgeless_system(impl):
    packed = PackedSystem(random_system(5, 0, 0.0, 0.0))
    assert packed.outcome([1], impl) == (1, 1)
