"""Pure-Python hot kernels. ``_ckernels.pyx`` mirrors these function by function.

Both modules take flat integer sequences so callers can pack once and
reuse the buffers:

* cascades: edge endpoint arrays per layer plus an attacked-node mask
  of length ``n + 1``;
* CNF: literals concatenated into ``lits`` with clause ``i`` occupying
  ``lits[starts[i]:starts[i + 1]]``.
"""

IMPLEMENTATION = "python"


def _labels(n, us, vs, alive):
    parent = list(range(n + 1))
    for e in range(len(us)):
        if not alive[e]:
            continue
        a = us[e]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = vs[e]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            parent[b] = a
    for v in range(n + 1):
        r = v
        while parent[r] != r:
            r = parent[r]
        parent[v] = r
    return parent


def _filter(us, vs, alive, labels):
    """Kill alive edges whose endpoints carry different labels. Returns count removed."""
    removed = 0
    for e in range(len(us)):
        if alive[e] and labels[us[e]] != labels[vs[e]]:
            alive[e] = 0
            removed += 1
    return removed


def cascade_outcome(n, a_u, a_v, b_u, b_v, attacked):
    """Run the cascade to fixpoint.

    Returns ``(last_failure_stage, largest_component_size)``.
    """
    alive_a = [0 if (attacked[a_u[e]] or attacked[a_v[e]]) else 1 for e in range(len(a_u))]
    alive_b = [0 if (attacked[b_u[e]] or attacked[b_v[e]]) else 1 for e in range(len(b_u))]
    last = 1
    stage = 2
    while True:
        if stage % 2 == 0:
            removed = _filter(b_u, b_v, alive_b, _labels(n, a_u, a_v, alive_a))
        else:
            removed = _filter(a_u, a_v, alive_a, _labels(n, b_u, b_v, alive_b))
        if removed:
            last = stage
        elif stage >= 3:
            break
        stage += 1
    labels = _labels(n, a_u, a_v, alive_a)
    sizes = [0] * (n + 1)
    for v in range(1, n + 1):
        sizes[labels[v]] += 1
    return last, max(sizes)


# -- SAT ----------------------------------------------------------------------

def _setup(num_vars, lits, starts):
    """Clause copies plus two-watched-literal lists keyed by literal index.

    Literal index: ``2 * var`` for positive, ``2 * var + 1`` for negative.
    """
    clauses = []
    units = []
    watches = [[] for _ in range(2 * num_vars + 2)]
    for c in range(len(starts) - 1):
        cl = list(dict.fromkeys(lits[starts[c]:starts[c + 1]]))
        if not cl:
            return None, None, None
        if len(cl) == 1:
            units.append(cl[0])
            continue
        idx = len(clauses)
        clauses.append(cl)
        for w in (cl[0], cl[1]):
            watches[2 * w if w > 0 else -2 * w + 1].append(idx)
    return clauses, watches, units


def _propagate(val, trail, qhead, clauses, watches):
    """Unit propagation from ``trail[qhead:]``. Returns (new qhead, conflict flag)."""
    while qhead < len(trail):
        lit = trail[qhead]
        qhead += 1
        false_lit = -lit
        wl = watches[2 * false_lit if false_lit > 0 else -2 * false_lit + 1]
        i = j = 0
        end = len(wl)
        while i < end:
            ci = wl[i]
            i += 1
            c = clauses[ci]
            if c[0] == false_lit:
                c[0], c[1] = c[1], false_lit
            first = c[0]
            fv = val[first] if first > 0 else -val[-first]
            if fv == 1:
                wl[j] = ci
                j += 1
                continue
            moved = False
            for p in range(2, len(c)):
                q = c[p]
                if (val[q] if q > 0 else -val[-q]) != -1:
                    c[1], c[p] = q, false_lit
                    watches[2 * q if q > 0 else -2 * q + 1].append(ci)
                    moved = True
                    break
            if moved:
                continue
            wl[j] = ci
            j += 1
            if fv == -1:
                while i < end:
                    wl[j] = wl[i]
                    j += 1
                    i += 1
                del wl[j:]
                return qhead, True
            if first > 0:
                val[first] = 1
            else:
                val[-first] = -1
            trail.append(first)
        del wl[j:]
    return qhead, False


def _assign_units(val, trail, units):
    for u in units:
        cur = val[u] if u > 0 else -val[-u]
        if cur == -1:
            return False
        if cur == 0:
            if u > 0:
                val[u] = 1
            else:
                val[-u] = -1
            trail.append(u)
    return True


def unit_propagate(num_vars, lits, starts, assumptions):
    """Unit-propagate the formula under ``assumptions`` (a list of literals).

    Returns a list ``val`` of length ``num_vars + 1`` with entries in
    ``{-1, 0, 1}``, or ``None`` if propagation hits a conflict.
    """
    clauses, watches, units = _setup(num_vars, lits, starts)
    if clauses is None:
        return None
    val = [0] * (num_vars + 1)
    trail = []
    if not _assign_units(val, trail, list(units) + list(assumptions)):
        return None
    _, conflict = _propagate(val, trail, 0, clauses, watches)
    return None if conflict else val


def dpll_solve(num_vars, lits, starts, assumptions=()):
    """Complete DPLL with two-watched-literal propagation.

    Branches on the lowest-numbered unassigned variable, true first, and
    backtracks chronologically, so the returned model is reproducible.
    Returns a list of ``num_vars + 1`` values in ``{-1, 1}`` (index 0
    unused) or ``None`` when unsatisfiable.
    """
    clauses, watches, units = _setup(num_vars, lits, starts)
    if clauses is None:
        return None
    val = [0] * (num_vars + 1)
    trail = []
    if not _assign_units(val, trail, list(units) + list(assumptions)):
        return None
    qhead = 0
    # per decision level: (trail position of the decision, already flipped?)
    levels = []
    next_var = 1
    while True:
        qhead, conflict = _propagate(val, trail, qhead, clauses, watches)
        if conflict:
            while levels:
                pos, flipped = levels.pop()
                for lit in trail[pos:]:
                    val[lit if lit > 0 else -lit] = 0
                    v = lit if lit > 0 else -lit
                    if v < next_var:
                        next_var = v
                decision = trail[pos]
                del trail[pos:]
                if not flipped:
                    levels.append((pos, True))
                    lit = -decision
                    val[lit if lit > 0 else -lit] = 1 if lit > 0 else -1
                    trail.append(lit)
                    qhead = pos
                    break
            else:
                return None
            continue
        while next_var <= num_vars and val[next_var] != 0:
            next_var += 1
        if next_var > num_vars:
            return val
        levels.append((len(trail), False))
        val[next_var] = 1
        trail.append(next_var)
