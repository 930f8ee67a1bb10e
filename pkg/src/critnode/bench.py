"""Exact pipeline orchestration and exact-vs-heuristic batch runs."""
from __future__ import annotations

import csv
import io
import json
import logging
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from .cascade import severity
from .errors import CritnodeError, InvalidInputError
from .generate import GenConfig, default_k, generate_instance
from .graph import InterdependentSystem
from .heuristics import greedy_select, maxcas_select
from .ilp import build_ilp, ilp_backend, solve_ilp
from .sat import compute_lmax, sat_backend

log = logging.getLogger(__name__)

BIN_WIDTH = Fraction(1, 4)


@dataclass
class PipelineReport:
    l_max: int
    critical_set: tuple[int, ...]
    f: int
    phase1_seconds: float
    phase2_seconds: float
    sat_calls: int = 0
    solver_stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "l_max": self.l_max,
            "critical_set": list(self.critical_set),
            "f": self.f,
            "phase1_seconds": self.phase1_seconds,
            "phase2_seconds": self.phase2_seconds,
            "sat_calls": self.sat_calls,
            "solver_stats": self.solver_stats,
        }


def _resolve(backend, factory):
    return factory(backend) if isinstance(backend, str) or backend is None else backend


def run_pipeline(system: InterdependentSystem, k: int, sat="builtin", ilp="builtin",
                 l_max: int | None = None) -> PipelineReport:
    """Phase 1 then Phase 2; the final set is re-scored by simulation.

    ``l_max`` skips Phase 1 when given.
    """
    if not 1 <= k < system.n:
        raise InvalidInputError(f"k must satisfy 1 <= k < n={system.n}, got {k}")
    t0 = time.perf_counter()
    calls = 0
    if l_max is None:
        p1 = compute_lmax(system, k, _resolve(sat, sat_backend))
        l_max, calls = p1.l_max, p1.sat_calls
    t1 = time.perf_counter()
    p2 = solve_ilp(build_ilp(system, k, l_max), system, _resolve(ilp, ilp_backend))
    t2 = time.perf_counter()
    attack = tuple(sorted(p2.critical_set))
    f = severity(system, attack)
    if f != p2.optimal_f:
        raise CritnodeError(f"decoded set {attack} simulates to f={f}, solver claimed {p2.optimal_f}")
    return PipelineReport(l_max, attack, f, t1 - t0, t2 - t1, calls, p2.solver_stats)


# -- batch ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchItem:
    name: str
    system: InterdependentSystem
    k: int
    matching: str = "given"  # "cas-approx" for generated instances


ROW_FIELDS = [
    "instance", "n", "k", "matching", "l_max",
    "f_exact", "f_greedy", "f_maxcas",
    "set_exact", "set_greedy", "set_maxcas",
    "t_phase1", "t_phase2", "t_greedy", "t_maxcas", "error",
]
TIMING_FIELDS = ("t_phase1", "t_phase2", "t_greedy", "t_maxcas")


def generated_items(sizes, count: int, seed: int = 0, k: int | None = None, **gen_kw) -> list[BenchItem]:
    """``count`` generated instances per size; seeds ``seed, seed+1, ...`` within each size."""
    items = []
    for n in sizes:
        for r in range(count):
            cfg = GenConfig(n=n, seed=seed + r, **gen_kw)
            items.append(BenchItem(f"gen-n{n}-s{seed + r}", generate_instance(cfg),
                                   k if k is not None else default_k(n), "cas-approx"))
    return items


def _fmt_set(s) -> str:
    return " ".join(str(v) for v in s)


def run_item(item: BenchItem, sat="builtin", ilp="builtin") -> dict:
    row = {f: "" for f in ROW_FIELDS}
    row.update(instance=item.name, n=item.system.n, k=item.k, matching=item.matching)
    try:
        rep = run_pipeline(item.system, item.k, sat, ilp)
        row.update(l_max=rep.l_max, f_exact=rep.f, set_exact=_fmt_set(rep.critical_set),
                   t_phase1=f"{rep.phase1_seconds:.6f}", t_phase2=f"{rep.phase2_seconds:.6f}")
        for algo, fn in (("greedy", greedy_select), ("maxcas", maxcas_select)):
            t0 = time.perf_counter()
            h = fn(item.system, item.k)
            row[f"t_{algo}"] = f"{time.perf_counter() - t0:.6f}"
            # re-scored here rather than trusting the heuristic's own number
            row[f"f_{algo}"] = severity(item.system, h.attack_set)
            row[f"set_{algo}"] = _fmt_set(sorted(h.attack_set))
    except CritnodeError as exc:
        log.warning("instance %s failed: %s", item.name, exc)
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _run_item_args(args):
    return run_item(*args)


def ratio_histogram(rows, algos=("greedy", "maxcas")) -> dict:
    """Counts of ``f_heuristic / f_exact`` in bins ``[1 + w i, 1 + w (i+1))``, ``w = 0.25``."""
    counts = {a: {} for a in algos}
    top = 0
    for row in rows:
        if row.get("error") or row.get("f_exact") in ("", None):
            continue
        for a in algos:
            ratio = Fraction(int(row[f"f_{a}"]), int(row["f_exact"]))
            idx = floor((ratio - 1) / BIN_WIDTH)
            if idx < 0:
                raise CritnodeError(f"{a} beat the exact optimum on {row['instance']}")
            counts[a][idx] = counts[a].get(idx, 0) + 1
            top = max(top, idx)
    bins = []
    for i in range(top + 1 if any(counts.values()) else 0):
        lo = 1 + BIN_WIDTH * i
        bins.append({"lo": float(lo), "hi": float(lo + BIN_WIDTH),
                     **{a: counts[a].get(i, 0) for a in algos}})
    return {"bin_width": float(BIN_WIDTH), "start": 1.0, "closed": "left", "bins": bins}


SUMMARY_FIELDS = ["n", "count", "mean_f_exact", "var_f_exact", "mean_f_greedy", "var_f_greedy",
                  "mean_f_maxcas", "var_f_maxcas", "mean_t_phase1", "mean_t_phase2",
                  "mean_t_greedy", "mean_t_maxcas"]


def _var(xs) -> float:
    return statistics.variance(xs) if len(xs) > 1 else 0.0


def summarize(rows) -> list[dict]:
    """Mean and sample variance per ``n`` over the rows that succeeded."""
    by_n: dict[int, list] = {}
    for row in rows:
        if not row.get("error"):
            by_n.setdefault(int(row["n"]), []).append(row)
    out = []
    for n in sorted(by_n):
        group = by_n[n]
        rec = {"n": n, "count": len(group)}
        for col in ("f_exact", "f_greedy", "f_maxcas"):
            xs = [int(r[col]) for r in group]
            rec[f"mean_{col}"] = f"{statistics.fmean(xs):.4f}"
            rec[f"var_{col}"] = f"{_var(xs):.4f}"
        for col in ("t_phase1", "t_phase2", "t_greedy", "t_maxcas"):
            rec[f"mean_{col}"] = f"{statistics.fmean(float(r[col]) for r in group):.6f}"
        out.append(rec)
    return out


@dataclass
class BenchResult:
    rows: list
    histogram: dict
    summary: list

    def rows_csv(self, timings: bool = True) -> str:
        """``timings=False`` blanks the wall-clock columns, leaving a seed-determined table."""
        rows = self.rows
        if not timings:
            rows = [{**r, **{c: "" for c in TIMING_FIELDS}} for r in rows]
        return _csv(ROW_FIELDS, rows)

    def summary_csv(self) -> str:
        return _csv(SUMMARY_FIELDS, self.summary)

    def histogram_json(self) -> str:
        return json.dumps(self.histogram, indent=2, sort_keys=True) + "\n"


def _csv(fields, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def run_bench(items, sat="builtin", ilp="builtin", workers: int = 1) -> BenchResult:
    """Run every item; failures become rows with ``error`` set. Output keeps input order."""
    if not isinstance(sat, str) or not isinstance(ilp, str):
        if workers > 1:
            raise InvalidInputError("parallel benches need backend spec strings")
    jobs = [(it, sat, ilp) for it in items]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_item_args, jobs))
    else:
        rows = [run_item(*j) for j in jobs]
    return BenchResult(rows, ratio_histogram(rows), summarize(rows))
