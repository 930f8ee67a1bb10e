# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same signatures and results as ``_pykernels``."""
from libc.stdlib cimport malloc, realloc, free, calloc

IMPLEMENTATION = "cython"


cdef inline int _find(int* parent, int a) noexcept nogil:
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


cdef void _labels(int n, const int[:] us, const int[:] vs, const unsigned char* alive, int* parent) noexcept nogil:
    cdef Py_ssize_t e
    cdef int a, b, v
    for v in range(n + 1):
        parent[v] = v
    for e in range(us.shape[0]):
        if not alive[e]:
            continue
        a = _find(parent, us[e])
        b = _find(parent, vs[e])
        if a != b:
            parent[b] = a
    for v in range(n + 1):
        parent[v] = _find(parent, v)


cdef int _filter(const int[:] us, const int[:] vs, unsigned char* alive, const int* labels) noexcept nogil:
    cdef Py_ssize_t e
    cdef int removed = 0
    for e in range(us.shape[0]):
        if alive[e] and labels[us[e]] != labels[vs[e]]:
            alive[e] = 0
            removed += 1
    return removed


def cascade_outcome(int n, const int[:] a_u, const int[:] a_v, const int[:] b_u, const int[:] b_v,
                    const unsigned char[:] attacked):
    """Run the cascade to fixpoint. Returns ``(last_failure_stage, largest_component_size)``."""
    cdef Py_ssize_t ma = a_u.shape[0], mb = b_u.shape[0], e
    cdef unsigned char* alive_a = <unsigned char*> malloc(ma + 1)
    cdef unsigned char* alive_b = <unsigned char*> malloc(mb + 1)
    cdef int* labels = <int*> malloc((n + 1) * sizeof(int))
    cdef int* sizes = <int*> calloc(n + 1, sizeof(int))
    cdef int last = 1, stage = 2, removed, best = 0, v
    if not alive_a or not alive_b or not labels or not sizes:
        free(alive_a); free(alive_b); free(labels); free(sizes)
        raise MemoryError()
    with nogil:
        for e in range(ma):
            alive_a[e] = 0 if (attacked[a_u[e]] or attacked[a_v[e]]) else 1
        for e in range(mb):
            alive_b[e] = 0 if (attacked[b_u[e]] or attacked[b_v[e]]) else 1
        while True:
            if stage % 2 == 0:
                _labels(n, a_u, a_v, alive_a, labels)
                removed = _filter(b_u, b_v, alive_b, labels)
            else:
                _labels(n, b_u, b_v, alive_b, labels)
                removed = _filter(a_u, a_v, alive_a, labels)
            if removed:
                last = stage
            elif stage >= 3:
                break
            stage += 1
        _labels(n, a_u, a_v, alive_a, labels)
        for v in range(1, n + 1):
            sizes[labels[v]] += 1
        for v in range(n + 1):
            if sizes[v] > best:
                best = sizes[v]
    free(alive_a); free(alive_b); free(labels); free(sizes)
    return last, best


# -- SAT ----------------------------------------------------------------------

cdef struct Solver:
    int num_vars
    int num_clauses
    int* lits          # deduplicated clause literals (clauses of length >= 2)
    int* cstart
    int* clen
    int** watch        # per literal index, clause ids
    int* wlen
    int* wcap
    int* units
    int nunits
    signed char* val
    int* trail
    int tlen


cdef inline int _li(int lit) noexcept nogil:
    return 2 * lit if lit > 0 else -2 * lit + 1


cdef inline int _value(Solver* s, int lit) noexcept nogil:
    return s.val[lit] if lit > 0 else -s.val[-lit]


cdef inline void _set(Solver* s, int lit) noexcept nogil:
    if lit > 0:
        s.val[lit] = 1
    else:
        s.val[-lit] = -1
    s.trail[s.tlen] = lit
    s.tlen += 1


cdef int _push_watch(Solver* s, int li, int ci) noexcept nogil:
    cdef int* grown
    if s.wlen[li] == s.wcap[li]:
        s.wcap[li] = 4 if s.wcap[li] == 0 else 2 * s.wcap[li]
        grown = <int*> realloc(s.watch[li], s.wcap[li] * sizeof(int))
        if not grown:
            return -1
        s.watch[li] = grown
    s.watch[li][s.wlen[li]] = ci
    s.wlen[li] += 1
    return 0


cdef void _free(Solver* s) noexcept:
    cdef int i
    if s.watch:
        for i in range(2 * s.num_vars + 2):
            free(s.watch[i])
    free(s.watch); free(s.wlen); free(s.wcap)
    free(s.lits); free(s.cstart); free(s.clen); free(s.units)
    free(s.val); free(s.trail)


cdef int _setup(Solver* s, int num_vars, const int[:] lits, const int[:] starts) except -2:
    """0 on success, -1 if some clause is empty."""
    cdef Py_ssize_t nc = starts.shape[0] - 1, c, p
    cdef int nl = 2 * num_vars + 2, lit, w, i, stamp
    cdef int* seen
    s.num_vars = num_vars
    s.num_clauses = 0
    s.nunits = 0
    s.tlen = 0
    s.lits = <int*> malloc((lits.shape[0] + 1) * sizeof(int))
    s.cstart = <int*> malloc((nc + 1) * sizeof(int))
    s.clen = <int*> malloc((nc + 1) * sizeof(int))
    s.units = <int*> malloc((nc + 1) * sizeof(int))
    s.watch = <int**> calloc(nl, sizeof(int*))
    s.wlen = <int*> calloc(nl, sizeof(int))
    s.wcap = <int*> calloc(nl, sizeof(int))
    s.val = <signed char*> calloc(num_vars + 1, 1)
    s.trail = <int*> malloc((num_vars + 1) * sizeof(int))
    seen = <int*> calloc(nl, sizeof(int))
    if not (s.lits and s.cstart and s.clen and s.units and s.watch and s.wlen and s.wcap
            and s.val and s.trail and seen):
        free(seen)
        raise MemoryError()
    cdef int pos = 0, length
    for c in range(nc):
        stamp = <int> c + 1
        length = 0
        for p in range(starts[c], starts[c + 1]):
            lit = lits[p]
            i = _li(lit)
            if seen[i] == stamp:
                continue
            seen[i] = stamp
            s.lits[pos + length] = lit
            length += 1
        if length == 0:
            free(seen)
            return -1
        if length == 1:
            s.units[s.nunits] = s.lits[pos]
            s.nunits += 1
            continue
        s.cstart[s.num_clauses] = pos
        s.clen[s.num_clauses] = length
        for w in range(2):
            if _push_watch(s, _li(s.lits[pos + w]), s.num_clauses) < 0:
                free(seen)
                raise MemoryError()
        s.num_clauses += 1
        pos += length
    free(seen)
    return 0


cdef int _propagate(Solver* s, int* qhead) except -2:
    """1 on conflict, 0 otherwise; ``qhead`` advances through the trail."""
    cdef int lit, false_lit, li, i, j, end, ci, first, fv, p, q, moved
    cdef int* c
    cdef int* wl
    while qhead[0] < s.tlen:
        lit = s.trail[qhead[0]]
        qhead[0] += 1
        false_lit = -lit
        li = _li(false_lit)
        i = 0
        j = 0
        end = s.wlen[li]
        while i < end:
            wl = s.watch[li]
            ci = wl[i]
            i += 1
            c = s.lits + s.cstart[ci]
            if c[0] == false_lit:
                c[0] = c[1]
                c[1] = false_lit
            first = c[0]
            fv = _value(s, first)
            if fv == 1:
                wl[j] = ci
                j += 1
                continue
            moved = 0
            for p in range(2, s.clen[ci]):
                q = c[p]
                if _value(s, q) != -1:
                    c[1] = q
                    c[p] = false_lit
                    if _push_watch(s, _li(q), ci) < 0:
                        raise MemoryError()
                    moved = 1
                    break
            if moved:
                continue
            wl = s.watch[li]
            wl[j] = ci
            j += 1
            if fv == -1:
                while i < end:
                    wl[j] = wl[i]
                    j += 1
                    i += 1
                s.wlen[li] = j
                return 1
            _set(s, first)
        s.wlen[li] = j
    return 0


cdef int _assign_units(Solver* s, const int* units, int count) noexcept:
    cdef int k, u, cur
    for k in range(count):
        u = units[k]
        cur = _value(s, u)
        if cur == -1:
            return 0
        if cur == 0:
            _set(s, u)
    return 1


cdef int _start(Solver* s, const int[:] assumptions) except -2:
    """Assert units then assumptions; 0 on immediate conflict."""
    cdef Py_ssize_t k
    cdef int u, cur
    if not _assign_units(s, s.units, s.nunits):
        return 0
    for k in range(assumptions.shape[0]):
        u = assumptions[k]
        if u == 0 or u > s.num_vars or -u > s.num_vars:
            raise ValueError(f"assumption literal {u} out of range")
        cur = _value(s, u)
        if cur == -1:
            return 0
        if cur == 0:
            _set(s, u)
    return 1


cdef list _values(Solver* s):
    return [s.val[v] for v in range(s.num_vars + 1)]


def unit_propagate(int num_vars, const int[:] lits, const int[:] starts, const int[:] assumptions):
    """Values in ``{-1, 0, 1}`` after unit propagation, or ``None`` on conflict."""
    cdef Solver s
    cdef int qhead = 0
    memset_solver(&s)
    try:
        if _setup(&s, num_vars, lits, starts) < 0:
            return None
        if not _start(&s, assumptions):
            return None
        if _propagate(&s, &qhead):
            return None
        return _values(&s)
    finally:
        _free(&s)


cdef void memset_solver(Solver* s) noexcept:
    s.lits = NULL; s.cstart = NULL; s.clen = NULL; s.units = NULL
    s.watch = NULL; s.wlen = NULL; s.wcap = NULL; s.val = NULL; s.trail = NULL
    s.num_vars = 0


def dpll_solve(int num_vars, const int[:] lits, const int[:] starts, assumptions=()):
    """Complete DPLL; lowest unassigned variable first, true first, chronological backtracking."""
    cdef Solver s
    cdef int qhead = 0, next_var = 1, nlev = 0, pos, decision, lit, v, k
    cdef int* lev_pos = NULL
    cdef char* lev_flip = NULL
    cdef int[:] assume
    from array import array
    assume = array("i", assumptions)
    memset_solver(&s)
    try:
        if _setup(&s, num_vars, lits, starts) < 0:
            return None
        if not _start(&s, assume):
            return None
        lev_pos = <int*> malloc((num_vars + 1) * sizeof(int))
        lev_flip = <char*> malloc(num_vars + 1)
        if not lev_pos or not lev_flip:
            raise MemoryError()
        while True:
            if _propagate(&s, &qhead):
                while True:
                    if nlev == 0:
                        return None
                    nlev -= 1
                    pos = lev_pos[nlev]
                    for k in range(pos, s.tlen):
                        lit = s.trail[k]
                        v = lit if lit > 0 else -lit
                        s.val[v] = 0
                        if v < next_var:
                            next_var = v
                    decision = s.trail[pos]
                    s.tlen = pos
                    if not lev_flip[nlev]:
                        lev_pos[nlev] = pos
                        lev_flip[nlev] = 1
                        nlev += 1
                        _set(&s, -decision)
                        qhead = pos
                        break
                continue
            while next_var <= num_vars and s.val[next_var] != 0:
                next_var += 1
            if next_var > num_vars:
                return _values(&s)
            lev_pos[nlev] = s.tlen
            lev_flip[nlev] = 0
            nlev += 1
            _set(&s, next_var)
    finally:
        free(lev_pos)
        free(lev_flip)
        _free(&s)
