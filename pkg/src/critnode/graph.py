"""Two-layer graph representation and connectivity queries.

Nodes are the integers ``1..n`` in both layers. Edges are stored as
canonical ``(i, j)`` tuples with ``i < j``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

from .errors import InvalidInputError

Edge = tuple[int, int]


def canonical(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class UndirectedGraph:
    n: int
    edges: frozenset[Edge]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError(f"node count must be positive, got {self.n}")
        for i, j in self.edges:
            if not (1 <= i < j <= self.n):
                raise InvalidInputError(f"edge {(i, j)} is not canonical over 1..{self.n}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]]) -> "UndirectedGraph":
        canon = set()
        for e in edges:
            i, j = (int(v) for v in e)
            if i == j:
                raise InvalidInputError(f"self-loop at node {i}")
            if not (1 <= i <= n and 1 <= j <= n):
                raise InvalidInputError(f"edge {(i, j)} has an endpoint outside 1..{n}")
            canon.add(canonical(i, j))
        return cls(n, frozenset(canon))

    @classmethod
    def complete(cls, n: int) -> "UndirectedGraph":
        return cls(n, frozenset(combinations(range(1, n + 1), 2)))

    @classmethod
    def empty(cls, n: int) -> "UndirectedGraph":
        return cls(n, frozenset())

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    def has_edge(self, i: int, j: int) -> bool:
        return i != j and canonical(i, j) in self.edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def non_edges(self) -> Iterator[Edge]:
        for e in combinations(self.nodes, 2):
            if e not in self.edges:
                yield e

    def adjacency(self) -> list[list[int]]:
        """Neighbour lists indexed by node id (index 0 unused)."""
        adj: list[list[int]] = [[] for _ in range(self.n + 1)]
        for i, j in sorted(self.edges):
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def degree(self, v: int) -> int:
        if not 1 <= v <= self.n:
            raise InvalidInputError(f"node {v} outside 1..{self.n}")
        return sum(1 for e in self.edges if v in e)

    def without_nodes(self, removed: Iterable[int]) -> "UndirectedGraph":
        """Drop every edge incident to ``removed``; the nodes stay as isolated ids."""
        gone = set(removed)
        return UndirectedGraph(self.n, frozenset(e for e in self.edges if e[0] not in gone and e[1] not in gone))


@dataclass(frozen=True)
class InterdependentSystem:
    graph_a: UndirectedGraph
    graph_b: UndirectedGraph

    def __post_init__(self):
        if self.graph_a.n != self.graph_b.n:
            raise InvalidInputError(
                f"layers disagree on node count: {self.graph_a.n} vs {self.graph_b.n}"
            )

    @property
    def n(self) -> int:
        return self.graph_a.n

    @classmethod
    def from_edges(cls, n, edges_a, edges_b) -> "InterdependentSystem":
        return cls(UndirectedGraph.from_edges(n, edges_a), UndirectedGraph.from_edges(n, edges_b))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "edges_a": [list(e) for e in self.graph_a.sorted_edges()],
            "edges_b": [list(e) for e in self.graph_b.sorted_edges()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InterdependentSystem":
        try:
            n = int(data["n"])
            edges_a, edges_b = data["edges_a"], data["edges_b"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed instance: {exc}") from exc
        return cls.from_edges(n, edges_a, edges_b)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "InterdependentSystem":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"instance is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def validate_attack(attack: Iterable[int], n: int) -> frozenset[int]:
    """Check an attack set against ``1..n`` and return it frozen."""
    nodes = frozenset(int(v) for v in attack)
    if not nodes:
        raise InvalidInputError("attack set is empty")
    bad = sorted(v for v in nodes if not 1 <= v <= n)
    if bad:
        raise InvalidInputError(f"attack nodes {bad} outside 1..{n}")
    return nodes


# -- connectivity ------------------------------------------------------------

def component_labels(n: int, edges: Iterable[Edge]) -> list[int]:
    """Union-find labels: ``label[v]`` is the smallest node id in v's component."""
    parent = list(range(n + 1))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            if ri < rj:
                parent[rj] = ri
            else:
                parent[ri] = rj
    return [find(v) for v in range(n + 1)]


def connected_components(g: UndirectedGraph) -> list[frozenset[int]]:
    """Partition of ``1..n``, ordered by smallest member."""
    labels = component_labels(g.n, g.edges)
    groups: dict[int, set[int]] = {}
    for v in g.nodes:
        groups.setdefault(labels[v], set()).add(v)
    return [frozenset(groups[r]) for r in sorted(groups)]


def connectivity_closure(g: UndirectedGraph) -> frozenset[Edge]:
    """All pairs ``(i, j)``, ``i < j``, joined by a path. Reflexivity is implicit."""
    pairs = set()
    for comp in connected_components(g):
        pairs.update(combinations(sorted(comp), 2))
    return frozenset(pairs)


def warshall_closure(g: UndirectedGraph) -> frozenset[Edge]:
    """Undirected Warshall recurrence, run literally over ``k = 1..n``.

    ``r[i][j]`` after round k is true iff a path joins i and j using only
    intermediate nodes from ``1..k``.
    """
    n = g.n
    r = [[i == j for j in range(n + 1)] for i in range(n + 1)]
    for i, j in g.edges:
        r[i][j] = r[j][i] = True
    for k in range(1, n + 1):
        prev = [row[:] for row in r]
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                val = prev[i][j] or (prev[i][k] and prev[k][j])
                r[i][j] = r[j][i] = val
    return frozenset((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if r[i][j])


def is_connected_pair(closure: frozenset[Edge], i: int, j: int) -> bool:
    return i == j or canonical(i, j) in closure


def articulation_nodes(g: UndirectedGraph) -> frozenset[int]:
    """Cut vertices via iterative lowpoint DFS."""
    adj = g.adjacency()
    disc = [0] * (g.n + 1)
    low = [0] * (g.n + 1)
    timer = 1
    cut = set()
    for root in g.nodes:
        if disc[root]:
            continue
        disc[root] = low[root] = timer
        timer += 1
        root_children = 0
        stack = [(root, 0, iter(adj[root]))]
        while stack:
            v, parent, it = stack[-1]
            for w in it:
                if not disc[w]:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, v, iter(adj[w])))
                    break
                if w != parent:
                    low[v] = min(low[v], disc[w])
            else:
                stack.pop()
                if parent:
                    low[parent] = min(low[parent], low[v])
                    if parent == root:
                        root_children += 1
                    elif low[v] >= disc[parent]:
                        cut.add(parent)
        if root_children >= 2:
            cut.add(root)
    return frozenset(cut)
