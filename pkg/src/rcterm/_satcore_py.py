"""Pure-Python CDCL search core.

This is the fallback twin of the compiled module _satcore; both expose
``search(clauses, nvars, deadline)`` with identical semantics and the
surrounding code picks whichever imports.  Literals arrive DIMACS-style
(nonzero ints) and are recoded internally as 2*v for v and 2*v+1 for -v.

The search is conflict-driven: two watched literals per clause, first-UIP
learning, phase saving, activity-based decisions with multiplicative decay,
and Luby restarts.  It is complete; the deadline is the only way to leave
early, and that raises instead of guessing.
"""

from __future__ import annotations

import time


class SolverTimeout(Exception):
    pass


def _luby(x: int) -> int:
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x %= size
    return 1 << seq


def search(clauses, nvars, deadline=None):
    """Return a model as a list of bools indexed by variable (entry 0
    unused) or None when unsatisfiable.
    """
    values = [-1] * (nvars + 1)
    level = [0] * (nvars + 1)
    reason = [-1] * (nvars + 1)
    activity = [0.0] * (nvars + 1)
    phase = [0] * (nvars + 1)
    db: list[list[int]] = []
    watches: list[list[int]] = [[] for _ in range(2 * nvars + 2)]
    trail: list[int] = []
    trail_lim: list[int] = []
    qhead = 0

    def lit_value(code: int) -> int:
        v = values[code >> 1]
        if v < 0:
            return -1
        return v ^ (code & 1)

    def enqueue(code: int, why: int):
        nonlocal qhead
        var = code >> 1
        values[var] = (code & 1) ^ 1
        level[var] = len(trail_lim)
        reason[var] = why
        trail.append(code)

    # clause ingestion: drop tautologies and duplicate literals
    pending_units = []
    for lits in clauses:
        seen = set()
        cl = []
        taut = False
        for lit in lits:
            code = (abs(lit) << 1) | (lit < 0)
            if code ^ 1 in seen:
                taut = True
                break
            if code not in seen:
                seen.add(code)
                cl.append(code)
        if taut:
            continue
        if not cl:
            return None
        if len(cl) == 1:
            pending_units.append(cl[0])
            continue
        cid = len(db)
        db.append(cl)
        watches[cl[0]].append(cid)
        watches[cl[1]].append(cid)

    for code in pending_units:
        val = lit_value(code)
        if val == 0:
            return None
        if val < 0:
            enqueue(code, -1)

    def propagate() -> int:
        nonlocal qhead
        while qhead < len(trail):
            false_code = trail[qhead] ^ 1
            qhead += 1
            ws = watches[false_code]
            kept = []
            i = 0
            n = len(ws)
            while i < n:
                cid = ws[i]
                i += 1
                cl = db[cid]
                if cl[0] == false_code:
                    cl[0], cl[1] = cl[1], cl[0]
                first = cl[0]
                if lit_value(first) == 1:
                    kept.append(cid)
                    continue
                for k in range(2, len(cl)):
                    if lit_value(cl[k]) != 0:
                        cl[1], cl[k] = cl[k], cl[1]
                        watches[cl[1]].append(cid)
                        break
                else:
                    kept.append(cid)
                    if lit_value(first) == 0:
                        kept.extend(ws[i:])
                        watches[false_code] = kept
                        return cid
                    enqueue(first, cid)
            watches[false_code] = kept
        return -1

    var_inc = 1.0

    def bump(var: int):
        nonlocal var_inc
        activity[var] += var_inc

    def decay():
        nonlocal var_inc
        var_inc /= 0.95
        if var_inc > 1e100:
            for v in range(1, nvars + 1):
                activity[v] *= 1e-100
            var_inc *= 1e-100

    def analyze(conflict: int):
        learnt = [0]
        seen = [False] * (nvars + 1)
        counter = 0
        code = -1
        index = len(trail)
        cl = db[conflict]
        while True:
            for q in cl:
                var = q >> 1
                if not seen[var] and level[var] > 0:
                    seen[var] = True
                    bump(var)
                    if level[var] == len(trail_lim):
                        counter += 1
                    else:
                        learnt.append(q)
            while True:
                index -= 1
                if seen[trail[index] >> 1]:
                    break
            code = trail[index] ^ 1
            counter -= 1
            if counter == 0:
                break
            cl = db[reason[code >> 1]]
        learnt[0] = code
        if len(learnt) == 1:
            return learnt, 0
        back = max(level[q >> 1] for q in learnt[1:])
        # move a literal of the backtrack level into the second watch slot
        for k in range(1, len(learnt)):
            if level[learnt[k] >> 1] == back:
                learnt[1], learnt[k] = learnt[k], learnt[1]
                break
        return learnt, back

    def backtrack(to_level: int):
        nonlocal qhead
        limit = trail_lim[to_level]
        for code in reversed(trail[limit:]):
            var = code >> 1
            phase[var] = (code & 1) ^ 1
            values[var] = -1
        del trail[limit:]
        del trail_lim[to_level:]
        qhead = len(trail)

    def pick_variable() -> int:
        best = 0
        best_act = -1.0
        for v in range(1, nvars + 1):
            if values[v] < 0 and activity[v] > best_act:
                best = v
                best_act = activity[v]
        return best

    conflicts_total = 0
    conflicts_round = 0
    restart_round = 0
    restart_limit = 64 * _luby(restart_round)

    while True:
        conflict = propagate()
        if conflict >= 0:
            conflicts_total += 1
            conflicts_round += 1
            if not trail_lim:
                return None
            if deadline is not None and conflicts_total % 128 == 0:
                if time.monotonic() > deadline:
                    raise SolverTimeout
            learnt, back = analyze(conflict)
            backtrack(back)
            if len(learnt) == 1:
                enqueue(learnt[0], -1)
            else:
                cid = len(db)
                db.append(learnt)
                watches[learnt[0]].append(cid)
                watches[learnt[1]].append(cid)
                enqueue(learnt[0], cid)
            decay()
            if conflicts_round >= restart_limit:
                conflicts_round = 0
                restart_round += 1
                restart_limit = 64 * _luby(restart_round)
                if trail_lim:
                    backtrack(0)
            continue
        var = pick_variable()
        if var == 0:
            return [v == 1 for v in values]
        trail_lim.append(len(trail))
        enqueue((var << 1) | (phase[var] ^ 1), -1)
