"""Exhaustive ground truth over every k-subset of nodes."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations, islice
from math import comb

from .errors import BudgetExceededError, InvalidInputError
from .graph import InterdependentSystem
from .kernels import PackedSystem

DEFAULT_BUDGET = 5_000_000


@dataclass(frozen=True)
class OracleResult:
    optimal_f: int
    optimal_attack_sets: tuple[tuple[int, ...], ...]
    l_max: int
    evaluated: int

    def to_dict(self) -> dict:
        return {
            "optimal_f": self.optimal_f,
            "optimal_attack_sets": [list(s) for s in self.optimal_attack_sets],
            "l_max": self.l_max,
            "evaluated": self.evaluated,
        }


def _scan(system, k, start, stop):
    """Best f, its attack sets (lexicographic), and max stage over a slice of subsets."""
    packed = PackedSystem(system)
    best_f = system.n + 1
    best_sets = []
    l_max = 0
    count = 0
    for attack in islice(combinations(range(1, system.n + 1), k), start, stop):
        stage, f = packed.outcome(attack)
        count += 1
        if stage > l_max:
            l_max = stage
        if f < best_f:
            best_f, best_sets = f, [attack]
        elif f == best_f:
            best_sets.append(attack)
    return best_f, best_sets, l_max, count


def _merge(parts):
    best_f = min(p[0] for p in parts)
    sets = [s for p in parts if p[0] == best_f for s in p[1]]
    return best_f, sorted(sets), max(p[2] for p in parts), sum(p[3] for p in parts)


def oracle_solve(system: InterdependentSystem, k: int, budget: int = DEFAULT_BUDGET, workers: int = 1) -> OracleResult:
    n = system.n
    if not 1 <= k < n:
        raise InvalidInputError(f"k must satisfy 1 <= k < n={n}, got {k}")
    total = comb(n, k)
    if total > budget:
        raise BudgetExceededError(f"C({n},{k}) = {total} attack sets exceeds budget {budget}")
    if workers <= 1 or total < 2 * workers:
        parts = [_scan(system, k, 0, total)]
    else:
        step = -(-total // workers)
        bounds = [(lo, min(lo + step, total)) for lo in range(0, total, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_scan, system, k, lo, hi) for lo, hi in bounds]
            parts = [f.result() for f in futures]
    best_f, sets, l_max, count = _merge(parts)
    return OracleResult(best_f, tuple(sets), l_max, count)
