"""Greedy and articulation-first (modified Max-Cas) attack selection.

Both pick one node per round. Ties on the simulated score go to the
largest degree sum over the working graphs, then to the lowest node id.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidInputError
from .graph import InterdependentSystem, UndirectedGraph, articulation_nodes
from .kernels import PackedSystem


@dataclass(frozen=True)
class StepChoice:
    candidates: tuple[int, ...]
    chosen: int
    scores: dict  # node -> largest component size with it added; empty when unscored
    articulation: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        d = {
            "candidates": list(self.candidates),
            "chosen": self.chosen,
            "scores": {str(v): s for v, s in sorted(self.scores.items())},
        }
        if self.articulation is not None:
            d["articulation"] = list(self.articulation)
        return d


@dataclass(frozen=True)
class HeuristicResult:
    algo: str
    attack_set: tuple[int, ...]
    f: int
    per_step_choices: tuple[StepChoice, ...]
    scoring_calls: int = 0
    seconds: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        return {
            "algo": self.algo,
            "attack_set": list(self.attack_set),
            "f": self.f,
            "scoring_calls": self.scoring_calls,
            "steps": [c.to_dict() for c in self.per_step_choices],
        }


def degree_sum(node: int, g1: UndirectedGraph, g2: UndirectedGraph) -> int:
    return g1.degree(node) + g2.degree(node)


class _Rounds:
    """Shared bookkeeping: chosen set, working graphs, remaining nodes."""

    def __init__(self, system: InterdependentSystem, k: int, score_on: str):
        if not 1 <= k < system.n:
            raise InvalidInputError(f"k must satisfy 1 <= k < n={system.n}, got {k}")
        if score_on not in ("original", "working"):
            raise InvalidInputError(f"score_on must be 'original' or 'working', got {score_on!r}")
        self.system = system
        self.chosen: list[int] = []
        self.g1, self.g2 = system.graph_a, system.graph_b
        self.remaining = list(system.graph_a.nodes)
        self.steps: list[StepChoice] = []
        self.calls = 0
        self.score_on = score_on
        self._packed = PackedSystem(system)

    def score(self, node: int) -> int:
        self.calls += 1
        attack = self.chosen + [node]
        if self.score_on == "working":
            # the working graphs already lack every edge touching a chosen node,
            # so this matches the original system under the same attack
            packed = PackedSystem(InterdependentSystem(self.g1, self.g2))
            return packed.outcome(attack)[1]
        return self._packed.outcome(attack)[1]

    def pick(self, candidates, scores, articulation=None) -> None:
        best = min(candidates, key=lambda v: (-degree_sum(v, self.g1, self.g2), v))
        self.steps.append(StepChoice(tuple(candidates), best, scores, articulation))
        self.chosen.append(best)
        self.g1 = self.g1.without_nodes([best])
        self.g2 = self.g2.without_nodes([best])
        self.remaining.remove(best)

    def result(self, algo: str) -> HeuristicResult:
        f = self._packed.outcome(self.chosen)[1]
        return HeuristicResult(algo, tuple(self.chosen), f, tuple(self.steps), self.calls)


def _argmin(scores: dict) -> list[int]:
    low = min(scores.values())
    return sorted(v for v, s in scores.items() if s == low)


def greedy_select(system: InterdependentSystem, k: int, score_on: str = "original") -> HeuristicResult:
    r = _Rounds(system, k, score_on)
    for _ in range(k):
        scores = {v: r.score(v) for v in r.remaining}
        r.pick(_argmin(scores), scores)
    return r.result("greedy")


def maxcas_select(system: InterdependentSystem, k: int, score_on: str = "original") -> HeuristicResult:
    """Articulation nodes of either working graph are scored first.

    When neither working graph has an articulation node, every remaining
    node becomes a candidate without scoring and the degree tie-break
    decides.
    """
    r = _Rounds(system, k, score_on)
    for _ in range(k):
        cut = sorted((articulation_nodes(r.g1) | articulation_nodes(r.g2)) & set(r.remaining))
        if not cut:
            r.pick(list(r.remaining), {}, ())
            continue
        scores = {v: r.score(v) for v in cut}
        r.pick(_argmin(scores), scores, tuple(cut))
    return r.result("maxcas")


HEURISTICS = {"greedy": greedy_select, "maxcas": maxcas_select}
