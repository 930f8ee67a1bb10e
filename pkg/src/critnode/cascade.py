"""Stage-by-stage cascading failure under link-removal interdependence.

Stage 1 removes every link touching an attacked node in both layers. Even
stages remove layer-B links whose endpoints are disconnected in layer A;
odd stages from 3 on do the reverse. Stage 2 removing nothing does not end
the cascade, since layer B has not yet been filtered against layer A's
connectivity. A quiet stage from 3 onward is a fixpoint.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .graph import (
    Edge,
    InterdependentSystem,
    component_labels,
    connected_components,
    UndirectedGraph,
    validate_attack,
)
from .kernels import PackedSystem


@dataclass(frozen=True)
class StageSnapshot:
    stage: int
    edges_a: frozenset[Edge]
    edges_b: frozenset[Edge]
    removed_a: frozenset[Edge]
    removed_b: frozenset[Edge]

    @property
    def removed_any(self) -> bool:
        return bool(self.removed_a or self.removed_b)


@dataclass(frozen=True)
class CascadeTrace:
    attack: frozenset[int]
    stages: tuple[StageSnapshot, ...]
    last_failure_stage: int
    final_components: tuple[frozenset[int], ...]
    largest_component_size: int

    def surviving(self, stage: int) -> StageSnapshot:
        """Snapshot at the end of ``stage``; stages past the fixpoint repeat the final one."""
        if stage < 1:
            raise ValueError("stages start at 1")
        idx = min(stage, len(self.stages)) - 1
        return self.stages[idx]

    def to_dict(self) -> dict:
        return {
            "attack": sorted(self.attack),
            "stages": [
                {
                    "stage": s.stage,
                    "edges_a": [list(e) for e in sorted(s.edges_a)],
                    "edges_b": [list(e) for e in sorted(s.edges_b)],
                    "removed_a": [list(e) for e in sorted(s.removed_a)],
                    "removed_b": [list(e) for e in sorted(s.removed_b)],
                }
                for s in self.stages
            ],
            "last_failure_stage": self.last_failure_stage,
            "components": [sorted(c) for c in self.final_components],
            "f": self.largest_component_size,
        }


def _keep_connected(edges: frozenset[Edge], n: int, other: frozenset[Edge]) -> frozenset[Edge]:
    labels = component_labels(n, other)
    return frozenset(e for e in edges if labels[e[0]] == labels[e[1]])


def simulate(system: InterdependentSystem, attack: Iterable[int]) -> CascadeTrace:
    """Full per-stage trace of the cascade triggered by ``attack``."""
    n = system.n
    hit = validate_attack(attack, n)
    ea0, eb0 = system.graph_a.edges, system.graph_b.edges
    ea = frozenset(e for e in ea0 if e[0] not in hit and e[1] not in hit)
    eb = frozenset(e for e in eb0 if e[0] not in hit and e[1] not in hit)
    stages = [StageSnapshot(1, ea, eb, ea0 - ea, eb0 - eb)]
    last = 1
    stage = 2
    while True:
        if stage % 2 == 0:
            new_b = _keep_connected(eb, n, ea)
            snap = StageSnapshot(stage, ea, new_b, frozenset(), eb - new_b)
            eb = new_b
        else:
            new_a = _keep_connected(ea, n, eb)
            snap = StageSnapshot(stage, new_a, eb, ea - new_a, frozenset())
            ea = new_a
        stages.append(snap)
        if snap.removed_any:
            last = stage
        elif stage >= 3:
            break
        stage += 1
    comps = tuple(connected_components(UndirectedGraph(n, ea)))
    return CascadeTrace(
        attack=hit,
        stages=tuple(stages),
        last_failure_stage=last,
        final_components=comps,
        largest_component_size=max(len(c) for c in comps),
    )


def severity(system: InterdependentSystem, attack: Iterable[int]) -> int:
    """Size of the largest failure-induced connected component."""
    hit = validate_attack(attack, system.n)
    return PackedSystem(system).outcome(hit)[1]


def last_failure_stage(system: InterdependentSystem, attack: Iterable[int]) -> int:
    hit = validate_attack(attack, system.n)
    return PackedSystem(system).outcome(hit)[0]
