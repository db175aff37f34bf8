# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled CDCL search core; algorithmic twin of _satcore_py.search.

The clause database lives in one growable C buffer, watch lists are
per-literal C arrays, and the propagation loop never touches Python
objects.  Only the rare deadline check calls back into Python.
"""

import time

from libc.stdlib cimport free, malloc, realloc

from rcterm._satcore_py import SolverTimeout


cdef int _luby(int x):
    cdef int size = 1, seq = 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x %= size
    return 1 << seq


cdef struct Buf:
    int* data
    int length
    int cap


cdef inline int buf_push(Buf* b, int value) except -1:
    cdef int new_cap
    if b.length == b.cap:
        new_cap = b.cap * 2 if b.cap else 8
        b.data = <int*>realloc(b.data, new_cap * sizeof(int))
        if b.data == NULL:
            raise MemoryError()
        b.cap = new_cap
    b.data[b.length] = value
    b.length += 1
    return 0


def search(clauses, int nvars, deadline=None):
    """Return a model as a list of bools (index 0 unused) or None."""
    cdef int ncodes = 2 * nvars + 2
    cdef int* values = NULL
    cdef int* level = NULL
    cdef int* reason = NULL
    cdef int* phase = NULL
    cdef char* seen = NULL
    cdef double* activity = NULL
    cdef int* trail = NULL
    cdef int* trail_lim = NULL
    cdef int* learnt = NULL
    cdef int* to_clear = NULL
    cdef Buf* watches = NULL
    cdef Buf cls_data
    cdef Buf cls_start
    cdef int i, v

    cls_data.data = NULL; cls_data.length = 0; cls_data.cap = 0
    cls_start.data = NULL; cls_start.length = 0; cls_start.cap = 0

    values = <int*>malloc((nvars + 1) * sizeof(int))
    level = <int*>malloc((nvars + 1) * sizeof(int))
    reason = <int*>malloc((nvars + 1) * sizeof(int))
    phase = <int*>malloc((nvars + 1) * sizeof(int))
    seen = <char*>malloc((nvars + 1) * sizeof(char))
    activity = <double*>malloc((nvars + 1) * sizeof(double))
    trail = <int*>malloc((nvars + 2) * sizeof(int))
    trail_lim = <int*>malloc((nvars + 2) * sizeof(int))
    learnt = <int*>malloc((nvars + 2) * sizeof(int))
    to_clear = <int*>malloc((nvars + 2) * sizeof(int))
    watches = <Buf*>malloc(ncodes * sizeof(Buf))
    if (values == NULL or level == NULL or reason == NULL or phase == NULL
            or seen == NULL or activity == NULL or trail == NULL
            or trail_lim == NULL or learnt == NULL or to_clear == NULL
            or watches == NULL):
        raise MemoryError()
    for v in range(nvars + 1):
        values[v] = -1
        level[v] = 0
        reason[v] = -1
        phase[v] = 0
        seen[v] = 0
        activity[v] = 0.0
    for i in range(ncodes):
        watches[i].data = NULL
        watches[i].length = 0
        watches[i].cap = 0

    cdef int trail_len = 0, lim_len = 0, qhead = 0
    cdef int n_clauses = 0

    cdef int code, first, false_code, cid, k, n, j, w, back, var, counter
    cdef int conflict, best, index, cl_start, cl_len
    cdef double var_inc = 1.0, best_act
    cdef int conflicts_total = 0, conflicts_round = 0
    cdef int restart_round = 0, restart_limit = 64
    cdef object result = None
    cdef bint unsat = False, found = False

    try:
        # ---- ingestion ----
        pending_units = []
        for lits in clauses:
            codes = set()
            cl = []
            taut = False
            for lit in lits:
                code = (abs(lit) << 1) | (lit < 0)
                if code ^ 1 in codes:
                    taut = True
                    break
                if code not in codes:
                    codes.add(code)
                    cl.append(code)
            if taut:
                continue
            if not cl:
                unsat = True
                break
            if len(cl) == 1:
                pending_units.append(cl[0])
                continue
            cid = n_clauses
            n_clauses += 1
            buf_push(&cls_start, cls_data.length)
            buf_push(&cls_start, len(cl))
            for code in cl:
                buf_push(&cls_data, code)
            buf_push(&watches[cls_data.data[cls_start.data[2 * cid]]], cid)
            buf_push(&watches[cls_data.data[cls_start.data[2 * cid] + 1]], cid)

        if not unsat:
            for code in pending_units:
                v = code >> 1
                if values[v] < 0:
                    values[v] = (code & 1) ^ 1
                    level[v] = 0
                    reason[v] = -1
                    trail[trail_len] = code
                    trail_len += 1
                elif values[v] != ((code & 1) ^ 1):
                    unsat = True
                    break

        # ---- search ----
        while not unsat and not found:
            # propagate
            conflict = -1
            while qhead < trail_len:
                false_code = trail[qhead] ^ 1
                qhead += 1
                n = watches[false_code].length
                i = 0
                j = 0
                while i < n:
                    cid = watches[false_code].data[i]
                    i += 1
                    cl_start = cls_start.data[2 * cid]
                    cl_len = cls_start.data[2 * cid + 1]
                    if cls_data.data[cl_start] == false_code:
                        cls_data.data[cl_start] = cls_data.data[cl_start + 1]
                        cls_data.data[cl_start + 1] = false_code
                    first = cls_data.data[cl_start]
                    v = values[first >> 1]
                    if v >= 0 and (v ^ (first & 1)) == 1:
                        watches[false_code].data[j] = cid
                        j += 1
                        continue
                    w = 0
                    for k in range(2, cl_len):
                        code = cls_data.data[cl_start + k]
                        v = values[code >> 1]
                        if v < 0 or (v ^ (code & 1)) == 1:
                            cls_data.data[cl_start + 1] = code
                            cls_data.data[cl_start + k] = false_code
                            buf_push(&watches[code], cid)
                            w = 1
                            break
                    if w:
                        continue
                    watches[false_code].data[j] = cid
                    j += 1
                    v = values[first >> 1]
                    if v >= 0:
                        # conflict: keep the untraversed tail
                        while i < n:
                            watches[false_code].data[j] = watches[false_code].data[i]
                            j += 1
                            i += 1
                        watches[false_code].length = j
                        conflict = cid
                        break
                    var = first >> 1
                    values[var] = (first & 1) ^ 1
                    level[var] = lim_len
                    reason[var] = cid
                    trail[trail_len] = first
                    trail_len += 1
                if conflict >= 0:
                    break
                watches[false_code].length = j

            if conflict >= 0:
                conflicts_total += 1
                conflicts_round += 1
                if lim_len == 0:
                    unsat = True
                    continue
                if deadline is not None and conflicts_total % 128 == 0:
                    if time.monotonic() > deadline:
                        raise SolverTimeout()
                # analyze (first UIP)
                counter = 0
                code = -1
                index = trail_len
                cl_start = cls_start.data[2 * conflict]
                cl_len = cls_start.data[2 * conflict + 1]
                n = 1  # learnt length; learnt[0] reserved for the UIP
                w = 0  # marked variables, for the seen[] reset below
                while True:
                    for k in range(cl_len):
                        var = cls_data.data[cl_start + k] >> 1
                        if seen[var] == 0 and level[var] > 0:
                            seen[var] = 1
                            to_clear[w] = var
                            w += 1
                            activity[var] += var_inc
                            if level[var] == lim_len:
                                counter += 1
                            else:
                                learnt[n] = cls_data.data[cl_start + k]
                                n += 1
                    while True:
                        index -= 1
                        if seen[trail[index] >> 1]:
                            break
                    code = trail[index] ^ 1
                    counter -= 1
                    if counter == 0:
                        break
                    cid = reason[code >> 1]
                    cl_start = cls_start.data[2 * cid]
                    cl_len = cls_start.data[2 * cid + 1]
                learnt[0] = code
                for k in range(w):
                    seen[to_clear[k]] = 0
                back = 0
                if n > 1:
                    for k in range(1, n):
                        if level[learnt[k] >> 1] > back:
                            back = level[learnt[k] >> 1]
                    for k in range(1, n):
                        if level[learnt[k] >> 1] == back:
                            code = learnt[1]
                            learnt[1] = learnt[k]
                            learnt[k] = code
                            break
                # backtrack
                k = trail_lim[back]
                for i in range(trail_len - 1, k - 1, -1):
                    var = trail[i] >> 1
                    phase[var] = (trail[i] & 1) ^ 1
                    values[var] = -1
                trail_len = k
                lim_len = back
                qhead = trail_len
                # install the learnt clause and assert the UIP
                var = learnt[0] >> 1
                if n == 1:
                    values[var] = (learnt[0] & 1) ^ 1
                    level[var] = lim_len
                    reason[var] = -1
                else:
                    cid = n_clauses
                    n_clauses += 1
                    buf_push(&cls_start, cls_data.length)
                    buf_push(&cls_start, n)
                    for k in range(n):
                        buf_push(&cls_data, learnt[k])
                    buf_push(&watches[learnt[0]], cid)
                    buf_push(&watches[learnt[1]], cid)
                    values[var] = (learnt[0] & 1) ^ 1
                    level[var] = lim_len
                    reason[var] = cid
                trail[trail_len] = learnt[0]
                trail_len += 1
                # decay activities
                var_inc /= 0.95
                if var_inc > 1e100:
                    for v in range(1, nvars + 1):
                        activity[v] *= 1e-100
                    var_inc *= 1e-100
                if conflicts_round >= restart_limit:
                    conflicts_round = 0
                    restart_round += 1
                    restart_limit = 64 * _luby(restart_round)
                    if lim_len > 0:
                        k = trail_lim[0]
                        for i in range(trail_len - 1, k - 1, -1):
                            var = trail[i] >> 1
                            phase[var] = (trail[i] & 1) ^ 1
                            values[var] = -1
                        trail_len = k
                        lim_len = 0
                        qhead = trail_len
                continue

            # decide
            best = 0
            best_act = -1.0
            for v in range(1, nvars + 1):
                if values[v] < 0 and activity[v] > best_act:
                    best = v
                    best_act = activity[v]
            if best == 0:
                result = [False] * (nvars + 1)
                for v in range(1, nvars + 1):
                    result[v] = values[v] == 1
                found = True
                continue
            trail_lim[lim_len] = trail_len
            lim_len += 1
            values[best] = phase[best]
            level[best] = lim_len
            reason[best] = -1
            trail[trail_len] = (best << 1) | (phase[best] ^ 1)
            trail_len += 1

        return None if unsat else result
    finally:
        free(values); free(level); free(reason); free(phase)
        free(seen); free(activity); free(trail); free(trail_lim)
        free(learnt); free(to_clear)
        if watches != NULL:
            for i in range(ncodes):
                free(watches[i].data)
            free(watches)
        free(cls_data.data)
        free(cls_start.data)
