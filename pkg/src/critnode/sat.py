"""Maximum failure-stage computation by iterated satisfiability checks."""
from __future__ import annotations

import logging
import os
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Optional, Protocol

from . import kernels
from .cnf import CnfFormula, build_m, emit_dimacs
from .errors import BackendError, InvalidInputError
from .graph import InterdependentSystem

log = logging.getLogger(__name__)


class SatBackend(Protocol):
    name: str

    def solve(self, formula: CnfFormula) -> Optional[list[int]]:
        """Model as signed literals ``[±1, ±2, ...]``, or ``None`` if unsatisfiable."""


def builtin_sat_solve(formula: CnfFormula, impl=None) -> Optional[list[int]]:
    val = kernels.dpll_solve(formula.num_vars, formula.clauses, impl=impl)
    if val is None:
        return None
    return [v if val[v] > 0 else -v for v in range(1, formula.num_vars + 1)]


class BuiltinSat:
    name = "builtin"

    def __init__(self, impl=None):
        self.impl = impl

    def solve(self, formula):
        return builtin_sat_solve(formula, self.impl)


def parse_competition_output(text: str) -> Optional[list[int]]:
    """Parse ``s``/``v`` lines of SAT-competition solver output."""
    status = None
    model: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            status = line[2:].strip()
        elif line.startswith("v ") or line == "v":
            model.extend(int(t) for t in line[1:].split() if t != "0")
    if status == "SATISFIABLE":
        return model
    if status == "UNSATISFIABLE":
        return None
    raise BackendError(f"solver output has no usable status line (got {status!r})")


class DimacsExecSat:
    """Runs ``<path> <file.cnf>`` and reads competition-format stdout."""

    def __init__(self, path: str, extra_args=(), timeout: Optional[float] = None):
        self.path = path
        self.extra_args = list(extra_args)
        self.timeout = timeout
        self.name = f"dimacs-exec:{path}"

    def solve(self, formula):
        fd, cnf_path = tempfile.mkstemp(suffix=".cnf")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(emit_dimacs(formula, comments=False))
            try:
                proc = subprocess.run(
                    [self.path, *self.extra_args, cnf_path],
                    capture_output=True, text=True, timeout=self.timeout,
                )
            except (OSError, subprocess.TimeoutExpired) as exc:
                raise BackendError(f"SAT backend {self.path} failed: {exc}") from exc
        finally:
            os.unlink(cnf_path)
        model = parse_competition_output(proc.stdout)
        if model is not None:
            seen = {abs(q) for q in model}
            # unmentioned variables are don't-cares
            model += [-v for v in range(1, formula.num_vars + 1) if v not in seen]
            model.sort(key=abs)
        return model


def sat_backend(spec: str = "builtin") -> SatBackend:
    if spec == "builtin":
        return BuiltinSat()
    if spec.startswith("builtin:"):
        return BuiltinSat(kernels.get(spec.split(":", 1)[1]))
    if spec.startswith("dimacs-exec:"):
        return DimacsExecSat(spec.split(":", 1)[1])
    raise InvalidInputError(f"unknown SAT backend {spec!r}")


@dataclass
class Phase1Result:
    l_max: int
    witness_attacks: dict = field(default_factory=dict)  # stage -> frozenset of nodes
    verdicts: dict = field(default_factory=dict)  # stage -> bool
    sat_calls: int = 0
    per_call_times: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "l_max": self.l_max,
            "witness_attacks": {str(s): sorted(a) for s, a in sorted(self.witness_attacks.items())},
            "verdicts": {str(s): v for s, v in sorted(self.verdicts.items())},
            "sat_calls": self.sat_calls,
            "per_call_times": self.per_call_times,
        }


def compute_lmax(system: InterdependentSystem, k: int, backend: SatBackend | None = None,
                 max_stage: int | None = None) -> Phase1Result:
    """Largest stage at which some ``k``-attack still removes a link.

    ``M_2`` and ``M_3`` are both always checked, because layer A can lose
    links in stage 3 even when stage 2 removes nothing. From stage 4 the
    check repeats until the first unsatisfiable ``M_l``.
    """
    if not 1 <= k < system.n:
        raise InvalidInputError(f"k must satisfy 1 <= k < n={system.n}, got {k}")
    backend = backend or BuiltinSat()
    if max_stage is None:
        # stage 2 may be quiet; every later failing stage removes a link
        max_stage = len(system.graph_a.edges) + len(system.graph_b.edges) + 2
    res = Phase1Result(l_max=1)

    def check(l):
        formula = build_m(system, k, l)
        t0 = time.perf_counter()
        model = backend.solve(formula)
        res.per_call_times.append(time.perf_counter() - t0)
        res.sat_calls += 1
        res.verdicts[l] = model is not None
        if model is not None:
            res.witness_attacks[l] = formula.attack_from_model(model)
        log.debug("M_%d: %s", l, "SAT" if model is not None else "UNSAT")
        return model is not None

    sat2, sat3 = check(2), check(3)
    if not sat2 and not sat3:
        res.l_max = 1
        return res
    if sat2 and not sat3:
        res.l_max = 2
        return res
    l = 4
    while True:
        if not check(l):
            res.l_max = l - 1
            return res
        if l > max_stage:
            raise BackendError(
                f"M_{l} still satisfiable past the stage cap {max_stage}; the encoding is inconsistent"
            )
        l += 1
