"""SAT solving in one place: the builtin CDCL core (compiled when the
extension built, pure Python otherwise) and the external DIMACS process
protocol.

Models coming back from any backend are checked clause by clause before
being handed out; the solvers are fast but untrusted.
"""

from __future__ import annotations

import os
import subprocess
import sys
import tempfile
import time

from ._satcore_py import SolverTimeout, search as _python_search

try:
    from ._satcore import search as _compiled_search
except ImportError:
    _compiled_search = None

ENV_SAT_BINARY = "RC_SAT_BINARY"

HAVE_COMPILED_CORE = _compiled_search is not None


def builtin_cores():
    """Name/function pairs of the available in-process search cores."""
    cores = {"python": _python_search}
    if _compiled_search is not None:
        cores["compiled"] = _compiled_search
    return cores


def _check_model(clauses, model: dict) -> bool:
    for cl in clauses:
        for lit in cl:
            value = model.get(abs(lit), False)
            if value == (lit > 0):
                break
        else:
            return False
    return True


def solve_cnf(clauses, nvars, backend="auto", binary=None, deadline=None):
    """Return a {var: bool} model or None for unsatisfiable.

    backend "builtin" runs in process, "external" runs the configured
    DIMACS solver, "auto" picks external exactly when a binary is
    configured (argument or RC_SAT_BINARY).
    """
    clauses = [list(cl) for cl in clauses]
    if binary is None:
        binary = os.environ.get(ENV_SAT_BINARY) or None
    if backend == "auto":
        backend = "external" if binary else "builtin"
    if backend == "builtin":
        search = _compiled_search or _python_search
        assignment = search(clauses, nvars, deadline)
        if assignment is None:
            return None
        model = {v: assignment[v] for v in range(1, nvars + 1)}
    elif backend == "external":
        if not binary:
            raise RuntimeError(
                f"external SAT backend requested but no binary configured"
                f" (set {ENV_SAT_BINARY})"
            )
        model = _run_external(clauses, nvars, binary, deadline)
        if model is None:
            return None
    else:
        raise ValueError(f"unknown SAT backend {backend!r}")
    if not _check_model(clauses, model):
        raise RuntimeError(f"{backend} SAT backend returned a bad model")
    return model


def to_dimacs(clauses, nvars) -> str:
    lines = [f"p cnf {nvars} {len(clauses)}"]
    for cl in clauses:
        lines.append(" ".join(str(lit) for lit in cl) + " 0")
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str):
    """Read a DIMACS CNF document; returns (clauses, nvars)."""
    nvars = None
    clauses = []
    current = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"malformed problem line: {line!r}")
            nvars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(current)
    if nvars is None:
        nvars = max((abs(l) for cl in clauses for l in cl), default=0)
    return clauses, nvars


def parse_solver_reply(text: str):
    """Decode an external solver's stdout: a model dict, None for unsat."""
    status = None
    lits = []
    for line in text.splitlines():
        if line.startswith("s "):
            status = line[2:].strip()
        elif line.startswith("v "):
            lits.extend(int(tok) for tok in line[2:].split())
    if status == "UNSATISFIABLE":
        return None
    if status != "SATISFIABLE":
        raise RuntimeError(f"solver protocol violation: status {status!r}")
    model = {}
    for lit in lits:
        if lit != 0:
            model[abs(lit)] = lit > 0
    return model


def _run_external(clauses, nvars, binary, deadline):
    budget = None
    if deadline is not None:
        budget = deadline - time.monotonic()
        if budget <= 0:
            raise SolverTimeout
    with tempfile.NamedTemporaryFile(
        "w", suffix=".cnf", prefix="rcterm", delete=False
    ) as handle:
        handle.write(to_dimacs(clauses, nvars))
        path = handle.name
    try:
        proc = subprocess.run(
            [binary, path],
            capture_output=True,
            text=True,
            timeout=budget,
        )
    except subprocess.TimeoutExpired:
        raise SolverTimeout from None
    except OSError as exc:
        raise RuntimeError(f"cannot run SAT solver {binary!r}: {exc}") from exc
    finally:
        os.unlink(path)
    reply = proc.stdout
    if "s " not in reply and proc.returncode not in (0, 10, 20):
        raise RuntimeError(
            f"SAT solver {binary!r} failed with code {proc.returncode}:"
            f" {proc.stderr.strip()[:200]}"
        )
    model = parse_solver_reply(reply)
    if model is not None:
        # external models may omit don't-care variables
        for v in range(1, nvars + 1):
            model.setdefault(v, False)
    return model


def dimacs_main(argv=None) -> int:
    """Entry point of the rc-sat script: a DIMACS solver over stdin/file."""
    args = sys.argv[1:] if argv is None else list(argv)
    if len(args) > 1 or args[:1] in (["-h"], ["--help"]):
        print("usage: rc-sat [file.cnf]", file=sys.stderr)
        return 2
    text = open(args[0]).read() if args else sys.stdin.read()
    clauses, nvars = parse_dimacs(text)
    search = _compiled_search or _python_search
    assignment = search(clauses, nvars, None)
    if assignment is None:
        print("s UNSATISFIABLE")
        return 20
    lits = [v if assignment[v] else -v for v in range(1, nvars + 1)]
    print("s SATISFIABLE")
    print("v " + " ".join(str(l) for l in lits) + " 0")
    return 10


if __name__ == "__main__":
    sys.exit(dimacs_main())
