"""Boolean encoding of the cascade: formula AST, CNF conversion, DIMACS I/O.

Semantic variables
------------------
``x(i, j, s, k)``
    Layer-A Warshall variable at odd stage ``s``. ``k = 0`` is "link
    ``{i, j}`` survives stage ``s``", ``k = n`` is "``i`` and ``j`` are
    connected at the end of stage ``s``".
``y(i, j, s, k)``
    Layer-B counterpart at even ``s``; ``s = 0`` stands for stage 1.
``z(i)``
    Node ``i`` is attacked.

Variables are numbered Z block first, then X ordered by ``(s, k, i, j)``,
then Y likewise, then auxiliaries in creation order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence, Union

from .errors import InvalidInputError
from .graph import InterdependentSystem, UndirectedGraph

_KIND_ORDER = {"Z": 0, "X": 1, "Y": 2, "AUX": 3}


@dataclass(frozen=True, order=True)
class SemanticVar:
    kind: str
    s: int = 0
    k: int = 0
    i: int = 0
    j: int = 0
    tag: str = ""

    def sort_key(self):
        return (_KIND_ORDER[self.kind], self.s, self.k, self.i, self.j)

    @property
    def name(self) -> str:
        if self.kind == "Z":
            return f"z_{self.i}"
        if self.kind == "AUX":
            return f"aux_{self.s}_{self.tag}" if self.tag else f"aux_{self.s}"
        return f"{self.kind.lower()}_{self.i}_{self.j}_s{self.s}_k{self.k}"


def z(i: int) -> SemanticVar:
    return SemanticVar("Z", i=i)


def x(i: int, j: int, s: int, k: int) -> SemanticVar:
    if i > j:
        i, j = j, i
    return SemanticVar("X", s=s, k=k, i=i, j=j)


def y(i: int, j: int, s: int, k: int) -> SemanticVar:
    if i > j:
        i, j = j, i
    return SemanticVar("Y", s=s, k=k, i=i, j=j)


def layer_var(layer: str, i: int, j: int, s: int, k: int) -> SemanticVar:
    return x(i, j, s, k) if layer == "A" else y(i, j, s, k)


# -- formula AST ----------------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    var: SemanticVar
    positive: bool = True

    def __neg__(self) -> "Lit":
        return Lit(self.var, not self.positive)


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Card:
    """Exactly ``k`` of ``lits`` are true."""

    lits: tuple
    k: int


Formula = Union[Lit, Const, Not, And, Or, Iff, Card]

TRUE = Const(True)
FALSE = Const(False)


def pos(v: SemanticVar) -> Lit:
    return Lit(v, True)


def neg(v: SemanticVar) -> Lit:
    return Lit(v, False)


def conj(*args) -> And:
    return And(tuple(args))


def disj(*args) -> Or:
    return Or(tuple(args))


def negate(f: Formula) -> Formula:
    """Push a negation one level down (NNF step)."""
    if isinstance(f, Lit):
        return -f
    if isinstance(f, Const):
        return Const(not f.value)
    if isinstance(f, Not):
        return f.arg
    if isinstance(f, And):
        return Or(tuple(negate(a) for a in f.args))
    if isinstance(f, Or):
        return And(tuple(negate(a) for a in f.args))
    if isinstance(f, Iff):
        return Iff(f.left, negate(f.right))
    raise TypeError(f"cannot negate {type(f).__name__} in place")


def evaluate(f: Formula, assignment) -> bool:
    """Truth value of ``f`` under ``assignment`` (SemanticVar -> bool)."""
    if isinstance(f, Lit):
        return assignment[f.var] == f.positive
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not evaluate(f.arg, assignment)
    if isinstance(f, And):
        return all(evaluate(a, assignment) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, assignment) for a in f.args)
    if isinstance(f, Iff):
        return evaluate(f.left, assignment) == evaluate(f.right, assignment)
    if isinstance(f, Card):
        return sum(evaluate(a, assignment) for a in f.lits) == f.k
    raise TypeError(type(f).__name__)


# -- CNF conversion ---------------------------------------------------------------

SemClause = tuple  # of Lit


class ClauseSink:
    """Accumulates semantic clauses and mints auxiliary variables."""

    def __init__(self):
        self.clauses: list[SemClause] = []
        self.aux: list[SemanticVar] = []

    def fresh(self, tag: str = "") -> Lit:
        v = SemanticVar("AUX", s=len(self.aux) + 1, tag=tag)
        self.aux.append(v)
        return Lit(v)

    def add(self, *lits: Lit) -> None:
        self.clauses.append(tuple(lits))

    # -- equivalence patterns ----------------------------------------------

    def iff_lit(self, a: Lit, b: Lit) -> None:
        self.add(-a, b)
        self.add(a, -b)

    def iff_and(self, a: Lit, terms: Sequence[Lit]) -> None:
        for t in terms:
            self.add(-a, t)
        self.add(a, *(-t for t in terms))

    def iff_or(self, a: Lit, terms: Sequence[Lit]) -> None:
        for t in terms:
            self.add(a, -t)
        self.add(-a, *terms)

    def iff_or_and(self, a: Lit, p: Lit, c: Lit, d: Lit) -> None:
        """``a <-> (p or (c and d))`` as the four-clause pattern."""
        self.add(-a, p, c)
        self.add(-a, p, d)
        self.add(-p, a)
        self.add(-c, -d, a)

    # -- recursive conversion ------------------------------------------------

    def _literal(self, f: Formula, tag: str):
        """Return a literal equivalent to ``f``, introducing a definition if needed."""
        if isinstance(f, Lit):
            return f
        if isinstance(f, Not) and isinstance(f.arg, Lit):
            return -f.arg
        t = self.fresh(tag)
        self.define(t, f, tag)
        return t

    def define(self, a: Lit, f: Formula, tag: str = "") -> None:
        """Emit clauses for ``a <-> f``."""
        if isinstance(f, Not):
            f = negate(f.arg)
        if isinstance(f, Const):
            self.add(a if f.value else -a)
            return
        if isinstance(f, Lit):
            self.iff_lit(a, f)
            return
        if isinstance(f, Or) and len(f.args) == 2:
            p, q = f.args
            if isinstance(q, And) and len(q.args) == 2 and isinstance(p, Lit) \
                    and all(isinstance(t, Lit) for t in q.args):
                self.iff_or_and(a, p, q.args[0], q.args[1])
                return
        if isinstance(f, And):
            self.iff_and(a, [self._literal(t, tag) for t in f.args])
            return
        if isinstance(f, Or):
            self.iff_or(a, [self._literal(t, tag) for t in f.args])
            return
        if isinstance(f, Iff):
            left, right = self._literal(f.left, tag), self._literal(f.right, tag)
            self.add(-a, -left, right)
            self.add(-a, left, -right)
            self.add(a, left, right)
            self.add(a, -left, -right)
            return
        if isinstance(f, Card):
            raise TypeError("cardinality constraints can only appear at top level")
        raise TypeError(type(f).__name__)

    def assert_formula(self, f: Formula, tag: str = "") -> None:
        """Emit clauses requiring ``f`` to hold."""
        if isinstance(f, Not):
            f = negate(f.arg)
        if isinstance(f, Const):
            if not f.value:
                self.add()
            return
        if isinstance(f, Lit):
            self.add(f)
            return
        if isinstance(f, And):
            for part in f.args:
                self.assert_formula(part, tag)
            return
        if isinstance(f, Or):
            self.add(*(self._literal(t, tag) for t in f.args))
            return
        if isinstance(f, Iff):
            if isinstance(f.left, Lit):
                self.define(f.left, f.right, tag)
            else:
                self.define(self._literal(f.left, tag), f.right, tag)
            return
        if isinstance(f, Card):
            encode_cardinality(f.lits, f.k, self)
            return
        raise TypeError(type(f).__name__)


def encode_cardinality(lits: Sequence[Lit], k: int, sink: ClauseSink) -> None:
    """Exactly ``k`` of ``lits`` true.

    ``k == 1`` uses pairwise at-most-one plus one at-least-one clause.
    Otherwise a sequential counter whose register ``R[i][j]`` is defined as
    "at least ``j`` of the first ``i`` literals are true", for
    ``j <= k + 1``, then ``R[m][k]`` is asserted and ``R[m][k + 1]`` refuted.
    Every register is fully defined (both directions), so fixing ``lits``
    determines all auxiliaries by unit propagation.
    """
    lits = list(lits)
    m = len(lits)
    if not 0 < k <= m:
        raise InvalidInputError(f"cardinality bound {k} outside 1..{m}")
    if k == 1:
        for a, b in combinations(lits, 2):
            sink.add(-a, -b)
        sink.add(*lits)
        return
    top = k + 1
    # prev[j] holds R[i-1][j] for j = 1..min(i-1, top); None means constant false
    prev = [None, lits[0]]
    for i in range(2, m + 1):
        v = lits[i - 1]
        cur = [None]
        for j in range(1, min(i, top) + 1):
            r = sink.fresh(f"card_{i}_{j}")
            below = prev[j] if j < len(prev) else None
            carry = prev[j - 1] if j >= 2 else None
            if j == 1:
                sink.iff_or(r, [below, v])
            elif below is None:
                sink.iff_and(r, [carry, v])
            else:
                sink.iff_or_and(r, below, carry, v)
            cur.append(r)
        prev = cur
    sink.add(prev[k])
    if top < len(prev):
        sink.add(-prev[top])


# -- numbered CNF ----------------------------------------------------------------

@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    var_map: dict = field(compare=False, hash=False)  # int -> SemanticVar

    @property
    def index(self) -> dict:
        return {v: n for n, v in self.var_map.items()}

    def semantic_vars(self):
        return [v for v in self.var_map.values() if v.kind != "AUX"]

    def decode(self, model) -> dict:
        """Map a solver model (list indexed by var number, or iterable of signed ints) to SemanticVar -> bool."""
        if isinstance(model, dict):
            return {self.var_map[n]: bool(val) for n, val in model.items() if n in self.var_map}
        if model and isinstance(model, (list, tuple)) and len(model) == self.num_vars + 1 and model[0] == 0:
            return {self.var_map[n]: model[n] > 0 for n in range(1, self.num_vars + 1) if model[n] != 0}
        out = {}
        for lit in model:
            if lit and abs(lit) in self.var_map:
                out[self.var_map[abs(lit)]] = lit > 0
        return out

    def attack_from_model(self, model) -> frozenset[int]:
        vals = self.decode(model)
        return frozenset(v.i for v, b in vals.items() if v.kind == "Z" and b)

    def literal(self, lit: Lit) -> int:
        num = self.index[lit.var]
        return num if lit.positive else -num


def finalize(sink: ClauseSink) -> CnfFormula:
    semantic = set()
    for cl in sink.clauses:
        for lit in cl:
            if lit.var.kind != "AUX":
                semantic.add(lit.var)
    ordered = sorted(semantic, key=SemanticVar.sort_key) + list(sink.aux)
    number = {v: idx for idx, v in enumerate(ordered, start=1)}
    out = []
    for cl in sink.clauses:
        ints = list(dict.fromkeys((number[l.var] if l.positive else -number[l.var]) for l in cl))
        if any(-q in ints for q in ints):
            continue
        out.append(tuple(ints))
    return CnfFormula(len(ordered), tuple(out), {idx: v for v, idx in number.items()})


def to_cnf(f: Formula) -> CnfFormula:
    sink = ClauseSink()
    sink.assert_formula(f)
    return finalize(sink)


# -- sub-formula builders -----------------------------------------------------------

def _check_k(system: InterdependentSystem, k: int) -> None:
    if not 1 <= k < system.n:
        raise InvalidInputError(f"k must satisfy 1 <= k < n={system.n}, got {k}")


def _stage_one_links(g: UndirectedGraph, layer: str, s: int) -> list:
    parts = []
    for i, j in combinations(g.nodes, 2):
        v = layer_var(layer, i, j, s, 0)
        if (i, j) in g.edges:
            parts.append(Iff(pos(v), conj(neg(z(i)), neg(z(j)))))
        else:
            parts.append(neg(v))
    return parts


def build_stage1(system: InterdependentSystem, k: int) -> And:
    """Links surviving stage 1 in both layers, plus exactly ``k`` attacked nodes."""
    _check_k(system, k)
    parts = _stage_one_links(system.graph_a, "A", 1)
    parts += _stage_one_links(system.graph_b, "B", 0)
    parts.append(Card(tuple(pos(z(i)) for i in system.graph_a.nodes), k))
    return And(tuple(parts))


def warshall_unrolling(n: int, layer: str, s: int) -> list:
    """Closure chain ``r^(s,0) .. r^(s,n)`` for one layer at one stage."""
    parts = []
    for i, j in combinations(range(1, n + 1), 2):
        for k in range(1, n + 1):
            cur = pos(layer_var(layer, i, j, s, k))
            prev = pos(layer_var(layer, i, j, s, k - 1))
            if k in (i, j):
                parts.append(Iff(cur, prev))
            else:
                via = conj(pos(layer_var(layer, i, k, s, k - 1)), pos(layer_var(layer, k, j, s, k - 1)))
                parts.append(Iff(cur, disj(prev, via)))
    return parts


def _propagation(system: InterdependentSystem, s: int, source: str) -> And:
    n = system.n
    target = "B" if source == "A" else "A"
    g_target = system.graph_b if target == "B" else system.graph_a
    parts = warshall_unrolling(n, source, s - 1)
    for i, j in combinations(range(1, n + 1), 2):
        v = layer_var(target, i, j, s, 0)
        if (i, j) in g_target.edges:
            parts.append(Iff(pos(v), conj(pos(layer_var(source, i, j, s - 1, n)),
                                          pos(layer_var(target, i, j, s - 2, 0)))))
    for i, j in g_target.non_edges():
        parts.append(neg(layer_var(target, i, j, s, 0)))
    return And(tuple(parts))


def build_ab(system: InterdependentSystem, s: int) -> And:
    """Layer-A disconnections at the end of stage ``s - 1`` remove layer-B links in even stage ``s``."""
    if s < 2 or s % 2:
        raise InvalidInputError(f"A-to-B propagation needs an even stage >= 2, got {s}")
    return _propagation(system, s, "A")


def build_ba(system: InterdependentSystem, s: int) -> And:
    if s < 3 or s % 2 == 0:
        raise InvalidInputError(f"B-to-A propagation needs an odd stage >= 3, got {s}")
    return _propagation(system, s, "B")


def build_p(system: InterdependentSystem, l: int) -> Or:
    """Some link alive after stage ``l - 2`` is gone after stage ``l``."""
    if l < 2:
        raise InvalidInputError(f"failure check needs l >= 2, got {l}")
    layer, g = ("B", system.graph_b) if l % 2 == 0 else ("A", system.graph_a)
    return Or(tuple(
        conj(pos(layer_var(layer, i, j, l - 2, 0)), neg(layer_var(layer, i, j, l, 0)))
        for i, j in g.sorted_edges()
    ))


def propagation_formula(system: InterdependentSystem, k: int, l: int) -> And:
    """``S`` and every propagation step up to stage ``l``."""
    parts = [build_stage1(system, k)]
    for s in range(2, l + 1):
        parts.append(build_ab(system, s) if s % 2 == 0 else build_ba(system, s))
    return And(tuple(parts))


def build_m(system: InterdependentSystem, k: int, l: int) -> CnfFormula:
    """CNF satisfiable iff some ``k``-attack removes a link in exactly stage ``l``."""
    if l < 2:
        raise InvalidInputError(f"l must be >= 2, got {l}")
    sink = ClauseSink()
    sink.assert_formula(propagation_formula(system, k, l))
    p = build_p(system, l)
    sink.add(*(sink._literal(term, "fail") for term in p.args))
    return finalize(sink)


def build_propagation_cnf(system: InterdependentSystem, k: int, l: int) -> CnfFormula:
    """Same as :func:`build_m` without the failure check; used to inspect propagation."""
    return to_cnf(propagation_formula(system, k, l))


def semantic_var_count(n: int, l: int) -> int:
    """Number of non-auxiliary variables in ``build_m(system, k, l)``."""
    pairs = n * (n - 1) // 2
    return n + 2 * pairs + (l - 1) * (n + 1) * pairs


# -- DIMACS -------------------------------------------------------------------------

def emit_dimacs(f: CnfFormula, comments: bool = True) -> str:
    lines = []
    if comments:
        for num in sorted(f.var_map):
            lines.append(f"c {num} {f.var_map[num].name}")
    lines.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    for cl in f.clauses:
        lines.append(" ".join(str(q) for q in cl) + (" 0" if cl else "0"))
    return "\n".join(lines) + "\n"


def var_map_json(f: CnfFormula) -> str:
    return json.dumps({str(num): f.var_map[num].name for num in sorted(f.var_map)}, indent=1) + "\n"


def parse_dimacs(text: str) -> tuple[int, list[tuple[int, ...]]]:
    """Read ``(num_vars, clauses)`` from DIMACS text. Clauses may span lines."""
    num_vars = None
    clauses = []
    cur: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            fields = line.split()
            if len(fields) != 4 or fields[1] != "cnf":
                raise InvalidInputError(f"bad DIMACS header: {line!r}")
            num_vars = int(fields[2])
            continue
        for tok in line.split():
            q = int(tok)
            if q == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(q)
    if cur:
        clauses.append(tuple(cur))
    if num_vars is None:
        raise InvalidInputError("DIMACS text has no header")
    return num_vars, clauses


def from_clauses(num_vars: int, clauses: Iterable[Iterable[int]]) -> CnfFormula:
    """Wrap raw integer clauses; variables get placeholder AUX names."""
    cls = tuple(tuple(c) for c in clauses)
    return CnfFormula(num_vars, cls, {v: SemanticVar("AUX", s=v) for v in range(1, num_vars + 1)})
