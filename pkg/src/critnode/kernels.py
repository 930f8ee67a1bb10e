"""Kernel selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` module. Setting ``CRITNODE_PURE_PYTHON=1`` forces
the fallback.
"""
import os
from array import array

from . import _pykernels

if os.environ.get("CRITNODE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        _impl = _pykernels

IMPLEMENTATION = _impl.IMPLEMENTATION


def available():
    """Names of every kernel implementation importable in this process."""
    names = {"python": _pykernels}
    try:
        from . import _ckernels  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        names["cython"] = _ckernels
    return names


def get(name=None):
    if name is None:
        return _impl
    try:
        return available()[name]
    except KeyError:
        raise ValueError(f"kernel implementation {name!r} is not available") from None


class PackedSystem:
    """Edge endpoint arrays of both layers, packed once for repeated cascades."""

    __slots__ = ("n", "a_u", "a_v", "b_u", "b_v")

    def __init__(self, system):
        self.n = system.n
        ea = system.graph_a.sorted_edges()
        eb = system.graph_b.sorted_edges()
        self.a_u = array("i", [e[0] for e in ea])
        self.a_v = array("i", [e[1] for e in ea])
        self.b_u = array("i", [e[0] for e in eb])
        self.b_v = array("i", [e[1] for e in eb])

    def mask(self, attack):
        m = bytearray(self.n + 1)
        for v in attack:
            m[v] = 1
        return m

    def outcome(self, attack, impl=None):
        """``(last_failure_stage, largest_component_size)`` for ``attack``."""
        k = impl or _impl
        return k.cascade_outcome(self.n, self.a_u, self.a_v, self.b_u, self.b_v, self.mask(attack))


def pack_clauses(clauses):
    lits = array("i")
    starts = array("i", [0])
    for c in clauses:
        lits.extend(c)
        starts.append(len(lits))
    return lits, starts


def dpll_solve(num_vars, clauses, assumptions=(), impl=None):
    k = impl or _impl
    lits, starts = pack_clauses(clauses)
    return k.dpll_solve(num_vars, lits, starts, array("i", assumptions))


def unit_propagate(num_vars, clauses, assumptions=(), impl=None):
    k = impl or _impl
    lits, starts = pack_clauses(clauses)
    return k.unit_propagate(num_vars, lits, starts, array("i", assumptions))
