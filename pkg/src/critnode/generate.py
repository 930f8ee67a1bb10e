"""Synthetic two-layer instances: scale-free layers plus degree-assortative matching.

Each layer is grown with networkx's extended Barabási–Albert process. With
``m`` edges per new node, edge-addition probability ``p`` and rewiring
probability ``q``, the mean-field degree exponent is taken as

    beta = 1 + (2 m (1 - q) - p - q) / m

so ``p = q = 0`` is plain preferential attachment (beta = 3). For a target
beta the generator uses ``p = q`` solved from that relation; see
:func:`edge_mix_for_exponent`.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .errors import BudgetExceededError, InvalidInputError
from .graph import InterdependentSystem, UndirectedGraph

_LAYER_IDS = {"A": 0, "B": 1}


@dataclass(frozen=True)
class GenConfig:
    n: int
    beta_a: float = 3.0
    beta_b: float = 2.2
    seed: int = 0
    max_retries: int = 100
    m_a: int = 1
    m_b: int = 1
    swap_prob: float = 0.1
    # explicit (p, q) per layer; None means calibrated from the exponent
    mix_a: tuple[float, float] | None = None
    mix_b: tuple[float, float] | None = None

    def __post_init__(self):
        if self.n < 3:
            raise InvalidInputError(f"n must be >= 3, got {self.n}")
        if self.beta_a <= 1 or self.beta_b <= 1:
            raise InvalidInputError("exponents must exceed 1")
        if not 0 <= self.swap_prob <= 1:
            raise InvalidInputError("swap_prob must lie in [0, 1]")
        for mix in (self.mix_a, self.mix_b):
            if mix is not None and not (mix[0] >= 0 and mix[1] >= 0 and mix[0] + mix[1] < 1):
                raise InvalidInputError(f"mix {mix} needs p, q >= 0 and p + q < 1")

    def mix(self, which: str) -> tuple[float, float]:
        if which == "A":
            return self.mix_a or edge_mix_for_exponent(self.beta_a, self.m_a)
        return self.mix_b or edge_mix_for_exponent(self.beta_b, self.m_b)


def edge_mix_for_exponent(beta: float, m: int = 1) -> tuple[float, float]:
    """``(p, q)`` with ``p == q`` giving mean-field exponent ``beta``.

    Solving ``m (beta - 1) = 2 m (1 - t) - 2 t`` gives
    ``t = m (3 - beta) / (2 m + 2)``.
    """
    t = m * (3.0 - beta) / (2 * m + 2)
    if t < 0 or 2 * t >= 1:
        raise InvalidInputError(f"exponent {beta} is not reachable with m={m}")
    return (t, t)


def mean_field_exponent(m: int, p: float, q: float) -> float:
    return 1 + (2 * m * (1 - q) - p - q) / m


def _attempt_seed(seed: int, layer: str, attempt: int) -> int:
    ss = np.random.SeedSequence([seed & (2**64 - 1), _LAYER_IDS[layer], attempt])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def generate_layer(config: GenConfig, which: str) -> UndirectedGraph:
    """Connected extended-BA layer; disconnected draws are discarded and redrawn."""
    if which not in _LAYER_IDS:
        raise InvalidInputError(f"layer must be 'A' or 'B', got {which!r}")
    m = config.m_a if which == "A" else config.m_b
    if not 1 <= m < config.n:
        raise InvalidInputError(f"m={m} must satisfy 1 <= m < n")
    p, q = config.mix(which)
    for attempt in range(config.max_retries):
        g = nx.extended_barabasi_albert_graph(config.n, m, p, q, seed=_attempt_seed(config.seed, which, attempt))
        if nx.is_connected(g):
            return UndirectedGraph.from_edges(config.n, ((u + 1, v + 1) for u, v in g.edges()))
    raise BudgetExceededError(f"no connected layer {which} after {config.max_retries} draws")


def _rank(g: UndirectedGraph, rng: random.Random) -> list[int]:
    keys = {v: rng.random() for v in g.nodes}
    deg = {v: 0 for v in g.nodes}
    for i, j in g.edges:
        deg[i] += 1
        deg[j] += 1
    return sorted(g.nodes, key=lambda v: (-deg[v], keys[v]))


def match_layers(g_a: UndirectedGraph, g_b: UndirectedGraph, seed: int, swap_prob: float = 0.1) -> InterdependentSystem:
    """Relabel ``g_b`` so that its degree ranking lines up with ``g_a``'s.

    Both layers are ranked by degree (random tie order), paired rank to
    rank, and then each adjacent pair of B ranks is swapped with
    probability ``swap_prob`` in one sweep.
    """
    if g_a.n != g_b.n:
        raise InvalidInputError(f"layer sizes differ: {g_a.n} vs {g_b.n}")
    rng = random.Random(seed)
    rank_a = _rank(g_a, rng)
    rank_b = _rank(g_b, rng)
    for r in range(len(rank_b) - 1):
        if rng.random() < swap_prob:
            rank_b[r], rank_b[r + 1] = rank_b[r + 1], rank_b[r]
    relabel = {b: a for a, b in zip(rank_a, rank_b)}
    moved = UndirectedGraph.from_edges(g_b.n, ((relabel[i], relabel[j]) for i, j in g_b.edges))
    return InterdependentSystem(g_a, moved)


def generate_instance(config: GenConfig) -> InterdependentSystem:
    g_a = generate_layer(config, "A")
    g_b = generate_layer(config, "B")
    return match_layers(g_a, g_b, _attempt_seed(config.seed, "B", config.max_retries), config.swap_prob)


def default_k(n: int) -> int:
    """One fifth of the nodes, rounded half up, at least 1."""
    return max(1, int(n / 5 + 0.5))
