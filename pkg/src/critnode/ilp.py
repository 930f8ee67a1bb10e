"""Integer linear model of the cascade and its solvers.

Every Boolean clause ``l1 or ... or lm`` becomes ``sum(pos) + sum(1 - neg) >= 1``;
the model stores it with constants moved to the right-hand side. The
objective minimises ``bound``, which must exceed ``sum_j conn(i, j)`` for
every node ``i`` at the final stage.
"""
from __future__ import annotations

import logging
import math
import os
import re
import subprocess
import tempfile
import time
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Optional

from .cascade import severity
from .cnf import ClauseSink, Lit, SemanticVar, layer_var, pos, neg, z
from .errors import BackendError, ConstraintViolation, InvalidInputError
from .graph import InterdependentSystem, validate_attack
from .kernels import PackedSystem

log = logging.getLogger(__name__)

BOUND = "bound"
_FAMILY = re.compile(r"[a-z][a-z0-9]*(?:_[a-z]+)*")


@dataclass(frozen=True)
class LinearConstraint:
    name: str
    terms: tuple[tuple[str, int], ...]
    sense: str  # ">=", "<=" or "="
    rhs: int

    def activity(self, values) -> int:
        return sum(c * values[v] for v, c in self.terms)

    def satisfied(self, values) -> bool:
        act = self.activity(values)
        if self.sense == ">=":
            return act >= self.rhs
        if self.sense == "<=":
            return act <= self.rhs
        return act == self.rhs


def clause_constraint(name: str, lits: Iterable[Lit]) -> LinearConstraint:
    terms = {}
    rhs = 1
    for lit in lits:
        nm = lit.var.name
        if lit.positive:
            terms[nm] = terms.get(nm, 0) + 1
        else:
            terms[nm] = terms.get(nm, 0) - 1
            rhs -= 1
    return LinearConstraint(name, tuple((v, c) for v, c in terms.items() if c), ">=", rhs)


@dataclass
class IlpModel:
    n: int
    k: int
    l_max: int
    binaries: list[str]
    constraints: list[LinearConstraint]
    bound_range: tuple[int, int]
    semantic: dict = field(default_factory=dict)  # name -> SemanticVar
    final_layer: str = "A"

    @property
    def variables(self) -> list[str]:
        return self.binaries + [BOUND]

    def constraint(self, name: str) -> LinearConstraint:
        for c in self.constraints:
            if c.name == name:
                return c
        raise KeyError(name)

    def families(self) -> dict:
        """Constraint counts per family, e.g. ``closure_a``, ``closure_a.eq``, ``size``."""
        out: dict[str, int] = {}
        for c in self.constraints:
            fam = _FAMILY.match(c.name).group(0)
            for suffix in (".eq", ".zero"):
                if c.name.endswith(suffix):
                    fam += suffix
            out[fam] = out.get(fam, 0) + 1
        return out


class _ModelBuilder:
    def __init__(self, n):
        self.n = n
        self.constraints: list[LinearConstraint] = []
        self.vars: dict[str, SemanticVar] = {}

    def _note(self, lits):
        for lit in lits:
            self.vars.setdefault(lit.var.name, lit.var)

    def clauses(self, prefix: str, clauses):
        for idx, cl in enumerate(clauses, start=1):
            self._note(cl)
            self.constraints.append(clause_constraint(f"{prefix}.c{idx}", cl))

    def equal(self, name: str, a: SemanticVar, b: SemanticVar):
        self._note([pos(a), pos(b)])
        self.constraints.append(LinearConstraint(name, ((a.name, 1), (b.name, -1)), "=", 0))

    def fix_zero(self, name: str, a: SemanticVar):
        self._note([pos(a)])
        self.constraints.append(LinearConstraint(name, ((a.name, 1),), "=", 0))

    def iff_and(self, prefix, a, b, c):
        sink = ClauseSink()
        sink.iff_and(pos(a), [b, c])
        self.clauses(prefix, sink.clauses)


def stage_horizons(l_max: int) -> dict:
    return {
        "closure_a": list(range(2, 2 * math.ceil(l_max / 2) + 1, 2)),
        "links_b": list(range(2, 2 * (l_max // 2) + 1, 2)),
        "closure_b": list(range(3, 2 * math.ceil((l_max - 1) / 2) + 2, 2)),
        "links_a": list(range(3, 2 * ((l_max - 1) // 2) + 2, 2)),
    }


def build_ilp(system: InterdependentSystem, k: int, l_max: int) -> IlpModel:
    """Linear model over the stage horizon implied by ``l_max``.

    Closure constraints extend one stage past ``l_max`` on the layer whose
    connectivity is read at the end (A when ``l_max`` is odd, B when even).
    """
    n = system.n
    if not 1 <= k < n:
        raise InvalidInputError(f"k must satisfy 1 <= k < n={n}, got {k}")
    if l_max < 1:
        raise InvalidInputError(f"l_max must be >= 1, got {l_max}")
    mb = _ModelBuilder(n)
    zs = [z(i) for i in range(1, n + 1)]
    mb._note([pos(v) for v in zs])
    mb.constraints.append(LinearConstraint("card", tuple((v.name, 1) for v in zs), "=", k))

    for layer, g, s in (("A", system.graph_a, 1), ("B", system.graph_b, 0)):
        for i, j in combinations(range(1, n + 1), 2):
            v = layer_var(layer, i, j, s, 0)
            tag = f"stage1_{layer.lower()}_{i}_{j}"
            if (i, j) in g.edges:
                mb.iff_and(tag, v, neg(z(i)), neg(z(j)))
            else:
                mb.fix_zero(f"{tag}.zero", v)

    def closure(layer, t, fam):
        for i, j in combinations(range(1, n + 1), 2):
            for kk in range(1, n + 1):
                cur = layer_var(layer, i, j, t, kk)
                prev = layer_var(layer, i, j, t, kk - 1)
                tag = f"{fam}_{i}_{j}_s{t}_k{kk}"
                if kk in (i, j):
                    mb.equal(f"{tag}.eq", cur, prev)
                else:
                    sink = ClauseSink()
                    sink.iff_or_and(pos(cur), pos(prev),
                                    pos(layer_var(layer, i, kk, t, kk - 1)),
                                    pos(layer_var(layer, kk, j, t, kk - 1)))
                    mb.clauses(tag, sink.clauses)

    def links(target, g, source, s):
        fam = f"link_{target.lower()}"
        for i, j in combinations(range(1, n + 1), 2):
            v = layer_var(target, i, j, s, 0)
            tag = f"{fam}_{i}_{j}_s{s}"
            if (i, j) in g.edges:
                mb.iff_and(tag, v, pos(layer_var(source, i, j, s - 1, n)),
                           pos(layer_var(target, i, j, s - 2, 0)))
            else:
                mb.fix_zero(f"{tag}.zero", v)

    h = stage_horizons(l_max)
    for s in sorted(set(h["closure_a"]) | set(h["closure_b"]) | set(h["links_a"]) | set(h["links_b"])):
        if s in h["closure_a"]:
            closure("A", s - 1, "closure_a")
        if s in h["links_b"]:
            links("B", system.graph_b, "A", s)
        if s in h["closure_b"]:
            closure("B", s - 1, "closure_b")
        if s in h["links_a"]:
            links("A", system.graph_a, "B", s)

    final = "A" if l_max % 2 else "B"
    for i in range(1, n + 1):
        terms = [(layer_var(final, i, j, l_max, n).name, 1) for j in range(1, n + 1) if j != i]
        mb.constraints.append(LinearConstraint(f"size_{i}", tuple(terms) + ((BOUND, -1),), "<=", -1))

    binaries = sorted(mb.vars, key=lambda nm: mb.vars[nm].sort_key())
    return IlpModel(n, k, l_max, binaries, mb.constraints, (1, n), dict(mb.vars), final)


# -- LP text -----------------------------------------------------------------------

def _format_terms(terms, per_line=8) -> list[str]:
    chunks = []
    for idx, (v, c) in enumerate(terms):
        mag = abs(c)
        body = v if mag == 1 else f"{mag} {v}"
        if idx == 0:
            chunks.append(body if c > 0 else f"- {body}")
        else:
            chunks.append(("+ " if c > 0 else "- ") + body)
    return [" ".join(chunks[i:i + per_line]) for i in range(0, len(chunks), per_line)]


def emit_lp(model: IlpModel) -> str:
    """CPLEX LP text. Byte-identical for identical models."""
    out = [f"\\ critnode n={model.n} k={model.k} l_max={model.l_max}", "Minimize", f" obj: {BOUND}",
           "Subject To"]
    for c in model.constraints:
        rows = _format_terms(c.terms)
        sense = {">=": ">=", "<=": "<=", "=": "="}[c.sense]
        if len(rows) == 1:
            out.append(f" {c.name}: {rows[0]} {sense} {c.rhs}")
        else:
            out.append(f" {c.name}: {rows[0]}")
            out.extend(f"   {r}" for r in rows[1:-1])
            out.append(f"   {rows[-1]} {sense} {c.rhs}")
    lo, hi = model.bound_range
    out += ["Bounds", f" {lo} <= {BOUND} <= {hi}", "Binary"]
    for i in range(0, len(model.binaries), 8):
        out.append(" " + " ".join(model.binaries[i:i + 8]))
    out += ["General", f" {BOUND}", "End"]
    return "\n".join(out) + "\n"


# -- bound propagation -------------------------------------------------------------

class Infeasible(Exception):
    pass


def propagate_bounds(model: IlpModel, fixed: dict[str, int] | None = None) -> dict[str, list[int]]:
    """Activity-based bound tightening to a fixpoint.

    Starts from the declared domains (binaries in [0, 1], ``bound`` in its
    range) intersected with ``fixed``. Returns ``{name: [lo, hi]}`` or
    raises :class:`Infeasible`.
    """
    names = model.variables
    idx = {nm: i for i, nm in enumerate(names)}
    lo = [0] * len(names)
    hi = [1] * len(names)
    b = idx[BOUND]
    lo[b], hi[b] = model.bound_range
    for nm, val in (fixed or {}).items():
        i = idx[nm]
        if not lo[i] <= val <= hi[i]:
            raise Infeasible(f"{nm}={val} outside its domain")
        lo[i] = hi[i] = val
    rows = []
    occurs: list[list[int]] = [[] for _ in names]
    for r, c in enumerate(model.constraints):
        vs = [idx[v] for v, _ in c.terms]
        cs = [a for _, a in c.terms]
        low = c.rhs if c.sense in (">=", "=") else None
        up = c.rhs if c.sense in ("<=", "=") else None
        rows.append((vs, cs, low, up, c.name))
        for v in vs:
            occurs[v].append(r)
    queue = deque(range(len(rows)))
    queued = [True] * len(rows)
    while queue:
        r = queue.popleft()
        queued[r] = False
        vs, cs, low, up, name = rows[r]
        minact = sum(a * (lo[v] if a > 0 else hi[v]) for v, a in zip(vs, cs))
        maxact = sum(a * (hi[v] if a > 0 else lo[v]) for v, a in zip(vs, cs))
        if (up is not None and minact > up) or (low is not None and maxact < low):
            raise Infeasible(name)
        for v, a in zip(vs, cs):
            vmin = a * (lo[v] if a > 0 else hi[v])
            vmax = a * (hi[v] if a > 0 else lo[v])
            # feasible range for a * x_v given the other terms
            t_lo = low - (maxact - vmax) if low is not None else None
            t_hi = up - (minact - vmin) if up is not None else None
            if a > 0:
                new_lo = -((-t_lo) // a) if t_lo is not None else lo[v]
                new_hi = t_hi // a if t_hi is not None else hi[v]
            else:
                new_lo = -((-t_hi) // a) if t_hi is not None else lo[v]
                new_hi = t_lo // a if t_lo is not None else hi[v]
            new_lo, new_hi = max(lo[v], new_lo), min(hi[v], new_hi)
            if new_lo > new_hi:
                raise Infeasible(name)
            if new_lo != lo[v] or new_hi != hi[v]:
                lo[v], hi[v] = new_lo, new_hi
                for r2 in occurs[v]:
                    if not queued[r2]:
                        queued[r2] = True
                        queue.append(r2)
                minact = sum(a2 * (lo[v2] if a2 > 0 else hi[v2]) for v2, a2 in zip(vs, cs))
                maxact = sum(a2 * (hi[v2] if a2 > 0 else lo[v2]) for v2, a2 in zip(vs, cs))
    return {nm: [lo[i], hi[i]] for nm, i in idx.items()}


def z_fixing(model: IlpModel, attack: Iterable[int]) -> dict[str, int]:
    hit = set(attack)
    return {z(i).name: int(i in hit) for i in range(1, model.n + 1)}


def minimal_bound_by_propagation(model: IlpModel, attack: Iterable[int]) -> tuple[int, dict]:
    """Smallest feasible ``bound`` once ``z`` is fixed to ``attack``.

    Requires propagation to determine every binary; raises
    :class:`Infeasible` or ``ValueError`` otherwise.
    """
    dom = propagate_bounds(model, z_fixing(model, attack))
    loose = [nm for nm in model.binaries if dom[nm][0] != dom[nm][1]]
    if loose:
        raise ValueError(f"{len(loose)} binaries left undetermined, e.g. {loose[0]}")
    values = {nm: d[0] for nm, d in dom.items()}
    return dom[BOUND][0], values


# -- solutions -----------------------------------------------------------------------

@dataclass
class Phase2Result:
    critical_set: frozenset[int]
    optimal_f: int
    bound: int
    solver_stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "critical_set": sorted(self.critical_set),
            "optimal_f": self.optimal_f,
            "bound": self.bound,
            "solver_stats": self.solver_stats,
        }


def check_values(model: IlpModel, values: dict[str, int]) -> None:
    """Raise :class:`ConstraintViolation` for the first broken constraint."""
    lo, hi = model.bound_range
    for nm in model.binaries:
        if nm not in values:
            raise ConstraintViolation("domain", f"{nm} has no value")
        if values[nm] not in (0, 1):
            raise ConstraintViolation("domain", f"{nm}={values[nm]} is not binary")
    if not lo <= values.get(BOUND, lo - 1) <= hi:
        raise ConstraintViolation("domain", f"bound={values.get(BOUND)} outside [{lo}, {hi}]")
    for c in model.constraints:
        if not c.satisfied(values):
            raise ConstraintViolation(c.name, f"activity {c.activity(values)} {c.sense} {c.rhs} fails")


def decode_solution(model: IlpModel, system: InterdependentSystem, values: dict[str, int],
                    optimal: bool = True, stats: dict | None = None) -> Phase2Result:
    """Read the attack set off ``z`` and cross-check ``bound`` by simulation."""
    check_values(model, values)
    attack = frozenset(i for i in range(1, model.n + 1) if values[z(i).name] == 1)
    f = severity(system, attack)
    bound = values[BOUND]
    if f > bound:
        raise ConstraintViolation("size", f"simulated f={f} exceeds bound={bound}")
    if optimal and f != bound:
        raise ConstraintViolation("size", f"simulated f={f} below claimed optimum bound={bound}")
    return Phase2Result(attack, f, bound, dict(stats or {}))


# -- backends --------------------------------------------------------------------------

class BuiltinIlp:
    """Exact search over ``z``: each k-subset is scored by the simulator.

    The winning subset's full variable vector is then recovered by bound
    propagation over the model itself and checked constraint by
    constraint, so a mismatch between model and simulator surfaces as an
    error rather than a silent wrong answer.
    """

    name = "builtin"

    def solve(self, model, system, fixed_attack=None):
        packed = PackedSystem(system)
        t0 = time.perf_counter()
        best_f, best = model.n + 1, None
        count = 0
        candidates = [tuple(sorted(fixed_attack))] if fixed_attack is not None else \
            combinations(range(1, model.n + 1), model.k)
        for attack in candidates:
            count += 1
            f = packed.outcome(attack)[1]
            if f < best_f:
                best_f, best = f, attack
        dom = propagate_bounds(model, z_fixing(model, best))
        values = {nm: d[0] for nm, d in dom.items()}
        values[BOUND] = max(values[BOUND], best_f)
        stats = {"backend": self.name, "evaluated": count, "seconds": time.perf_counter() - t0}
        return values, stats


class HighsIlp:
    """scipy's HiGHS MILP solver run on the model's constraint matrix."""

    name = "highs"

    def __init__(self, time_limit: float | None = None):
        self.time_limit = time_limit

    def solve(self, model, system=None, fixed_attack=None):
        import numpy as np
        from scipy.optimize import Bounds, LinearConstraint as SpLinear, milp
        from scipy.sparse import coo_array

        names = model.variables
        idx = {nm: i for i, nm in enumerate(names)}
        rows, cols, data, lb, ub = [], [], [], [], []
        for r, c in enumerate(model.constraints):
            for v, a in c.terms:
                rows.append(r)
                cols.append(idx[v])
                data.append(a)
            lb.append(c.rhs if c.sense in (">=", "=") else -np.inf)
            ub.append(c.rhs if c.sense in ("<=", "=") else np.inf)
        a_mat = coo_array((data, (rows, cols)), shape=(len(model.constraints), len(names))).tocsr()
        lo = np.zeros(len(names))
        hi = np.ones(len(names))
        lo[idx[BOUND]], hi[idx[BOUND]] = model.bound_range
        if fixed_attack is not None:
            for nm, val in z_fixing(model, fixed_attack).items():
                lo[idx[nm]] = hi[idx[nm]] = val
        cost = np.zeros(len(names))
        cost[idx[BOUND]] = 1.0
        options = {"time_limit": self.time_limit} if self.time_limit else {}
        t0 = time.perf_counter()
        res = milp(cost, integrality=np.ones(len(names)), bounds=Bounds(lo, hi),
                   constraints=SpLinear(a_mat, lb, ub), options=options)
        if res.status == 2:
            raise BackendError("HiGHS reports the model infeasible")
        if res.x is None or res.status != 0:
            raise BackendError(f"HiGHS failed: {res.message}")
        values = {nm: int(round(res.x[i])) for nm, i in idx.items()}
        stats = {"backend": self.name, "seconds": time.perf_counter() - t0,
                 "objective": float(res.fun), "mip_nodes": int(getattr(res, "mip_node_count", 0) or 0)}
        return values, stats


def parse_solution_file(text: str) -> tuple[Optional[float], dict[str, int]]:
    """``name value`` lines; ``objective <v>`` optional; ``#`` starts a comment."""
    objective = None
    values = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(":", " ").replace("=", " ").split()
        if len(parts) != 2:
            raise BackendError(f"unparseable solution line {raw!r}")
        name, val = parts
        if name.lower() in ("objective", "obj"):
            objective = float(val)
        else:
            values[name] = int(round(float(val)))
    return objective, values


class LpExecIlp:
    """Runs ``<path> <model.lp> <solution.txt>`` and parses the solution file.

    ``parser`` adapts other solvers' output formats; it receives the
    solution file text and returns ``(objective, {name: value})``.
    """

    def __init__(self, path: str, parser: Callable = parse_solution_file, extra_args=(),
                 timeout: float | None = None):
        self.path = path
        self.parser = parser
        self.extra_args = list(extra_args)
        self.timeout = timeout
        self.name = f"lp-exec:{path}"

    def solve(self, model, system=None, fixed_attack=None):
        if fixed_attack is not None:
            raise BackendError("external LP backends do not support fixings")
        with tempfile.TemporaryDirectory() as tmp:
            lp_path = os.path.join(tmp, "model.lp")
            sol_path = os.path.join(tmp, "solution.txt")
            with open(lp_path, "w") as fh:
                fh.write(emit_lp(model))
            t0 = time.perf_counter()
            try:
                proc = subprocess.run([self.path, *self.extra_args, lp_path, sol_path],
                                      capture_output=True, text=True, timeout=self.timeout)
            except (OSError, subprocess.TimeoutExpired) as exc:
                raise BackendError(f"LP backend {self.path} failed: {exc}") from exc
            if proc.returncode != 0 or not os.path.exists(sol_path):
                raise BackendError(f"LP backend exited {proc.returncode}: {proc.stderr.strip()[:200]}")
            with open(sol_path) as fh:
                objective, values = self.parser(fh.read())
        for nm in model.variables:
            values.setdefault(nm, 0)
        stats = {"backend": self.name, "seconds": time.perf_counter() - t0, "objective": objective}
        return values, stats


def ilp_backend(spec: str = "builtin"):
    if spec == "builtin":
        return BuiltinIlp()
    if spec == "highs":
        return HighsIlp()
    if spec.startswith("lp-exec:"):
        return LpExecIlp(spec.split(":", 1)[1])
    raise InvalidInputError(f"unknown ILP backend {spec!r}")


def solve_ilp(model: IlpModel, system: InterdependentSystem, backend=None) -> Phase2Result:
    backend = backend or BuiltinIlp()
    if system.n != model.n:
        raise InvalidInputError("model and system disagree on n")
    values, stats = backend.solve(model, system)
    return decode_solution(model, system, values, optimal=True, stats=stats)


def minimal_bound_under_fixing(model: IlpModel, system: InterdependentSystem, attack,
                               backend=None) -> int:
    """Optimal ``bound`` with ``z`` pinned to ``attack``, solved on the model itself."""
    validate_attack(attack, model.n)
    backend = backend or HighsIlp()
    values, _ = backend.solve(model, system, fixed_attack=attack)
    check_values(model, values)
    return values[BOUND]
