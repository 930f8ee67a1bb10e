"""Shared fixtures and independent reference implementations for the tests."""
import os
import random
import re
from itertools import combinations

import networkx as nx

from critnode.generate import GenConfig, generate_instance
from critnode.graph import InterdependentSystem, UndirectedGraph

TOOLS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "tools")
PYCOSAT_SOLVER = os.path.join(TOOLS, "pycosat_solver.py")
LP_SOLVER = os.path.join(TOOLS, "lp_milp_solver.py")
BROKEN_SOLVER = os.path.join(TOOLS, "broken_solver.py")


def three_node_system() -> InterdependentSystem:
    """Three nodes; A is the path 1-3-2, B is the triangle."""
    return InterdependentSystem.from_edges(3, [(1, 3), (2, 3)], [(1, 2), (1, 3), (2, 3)])


def complete_system(n: int) -> InterdependentSystem:
    return InterdependentSystem(UndirectedGraph.complete(n), UndirectedGraph.complete(n))


def star_system(m: int) -> InterdependentSystem:
    """A is the star with centre 1 and m leaves, B is complete."""
    n = m + 1
    return InterdependentSystem(UndirectedGraph.from_edges(n, [(1, v) for v in range(2, n + 1)]),
                                UndirectedGraph.complete(n))


def random_graph(n: int, p: float, rng: random.Random) -> UndirectedGraph:
    return UndirectedGraph.from_edges(n, [e for e in combinations(range(1, n + 1), 2) if rng.random() < p])


def random_system(n: int, seed: int, p_a: float | None = None, p_b: float | None = None) -> InterdependentSystem:
    rng = random.Random(seed)
    p_a = rng.uniform(0.25, 0.7) if p_a is None else p_a
    p_b = rng.uniform(0.25, 0.7) if p_b is None else p_b
    return InterdependentSystem(random_graph(n, p_a, rng), random_graph(n, p_b, rng))


def seeded_suite(count: int = 100, n_range=(6, 10), ks=(1, 2, 3), seed: int = 2024):
    """``(name, system, k)`` triples: alternating G(n, p) and generated scale-free pairs."""
    rng = random.Random(seed)
    out = []
    for idx in range(count):
        n = rng.randint(*n_range)
        k = rng.choice(ks)
        inst_seed = rng.randrange(2**31)
        if idx % 2:
            system = generate_instance(GenConfig(n=n, seed=inst_seed))
            name = f"ba-{idx}-n{n}"
        else:
            system = random_system(n, inst_seed)
            name = f"gnp-{idx}-n{n}"
        out.append((name, system, min(k, n - 1)))
    return out


# -- independent cascade reference -------------------------------------------------

def reference_cascade(system: InterdependentSystem, attack):
    """Stage-by-stage cascade with networkx path queries.

    Returns ``(stages, last_failure_stage, f)``, ``stages`` a list of
    ``(edges_a, edges_b)`` after each stage.
    """
    n = system.n
    attack = set(attack)
    ea = {e for e in system.graph_a.edges if not attack & set(e)}
    eb = {e for e in system.graph_b.edges if not attack & set(e)}
    stages = [(frozenset(ea), frozenset(eb))]
    last = 1
    s = 2
    while True:
        src, dst = (ea, eb) if s % 2 == 0 else (eb, ea)
        g = nx.Graph()
        g.add_nodes_from(range(1, n + 1))
        g.add_edges_from(src)
        gone = {e for e in dst if not nx.has_path(g, *e)}
        dst -= gone
        stages.append((frozenset(ea), frozenset(eb)))
        if gone:
            last = s
        elif s >= 3:
            break
        s += 1
    g = nx.Graph()
    g.add_nodes_from(range(1, n + 1))
    g.add_edges_from(ea)
    f = max(len(c) for c in nx.connected_components(g))
    return stages, last, f


def reference_optimum(system: InterdependentSystem, k: int):
    """``(min f, max last stage)`` by enumeration over the networkx reference."""
    best_f, worst_stage = system.n + 1, 0
    for attack in combinations(range(1, system.n + 1), k):
        _, last, f = reference_cascade(system, attack)
        best_f = min(best_f, f)
        worst_stage = max(worst_stage, last)
    return best_f, worst_stage


# -- independent text parsers ------------------------------------------------------

def read_dimacs(text: str):
    """``(num_vars, num_clauses, [clauses])`` via a flat token stream."""
    header = re.search(r"^p\s+cnf\s+(\d+)\s+(\d+)\s*$", text, re.M)
    body = "\n".join(l for l in text.splitlines() if not l.startswith(("c", "p")))
    clauses, cur = [], []
    for tok in body.split():
        if tok == "0":
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(int(tok))
    return int(header.group(1)), int(header.group(2)), clauses


# -- hypothesis strategies -----------------------------------------------------------

from hypothesis import strategies as st  # noqa: E402


@st.composite
def graphs(draw, min_n=1, max_n=8, n=None):
    n = draw(st.integers(min_n, max_n)) if n is None else n
    pairs = list(combinations(range(1, n + 1), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return UndirectedGraph.from_edges(n, [p for p, keep in zip(pairs, mask) if keep])


@st.composite
def systems(draw, min_n=2, max_n=8):
    n = draw(st.integers(min_n, max_n))
    return InterdependentSystem(draw(graphs(n=n)), draw(graphs(n=n)))


@st.composite
def systems_with_attack(draw, min_n=2, max_n=8):
    system = draw(systems(min_n, max_n))
    k = draw(st.integers(1, system.n - 1))
    attack = draw(st.lists(st.integers(1, system.n), min_size=k, max_size=k, unique=True))
    return system, sorted(attack)
