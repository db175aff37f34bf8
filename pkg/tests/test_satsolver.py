import random
import shutil
import subprocess
import sys

import pytest

from rcterm import satsolver
from rcterm._satcore_py import search as python_search

cores = pytest.mark.parametrize(
    "core", list(satsolver.builtin_cores().items()), ids=lambda c: c[0]
)


@cores
def test_trivial_instances(core):
    _, search = core
    assert search([[1]], 1) is not None
    assert search([[1], [-1]], 1) is None
    assert search([], 3) is not None
    assert search([[]], 0) is None


@cores
def test_model_satisfies_formula(core):
    _, search = core
    clauses = [[1, 2], [-1, 3], [-3, -2], [2, 3]]
    model = search(clauses, 3)
    assert model is not None
    for cl in clauses:
        assert any(model[abs(l)] == (l > 0) for l in cl)


@cores
def test_pigeonhole_unsat(core):
    # 5 pigeons, 4 holes
    _, search = core
    pigeons, holes = 5, 4
    var = lambda p, h: p * holes + h + 1
    clauses = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p1 in range(pigeons):
            for p2 in range(p1 + 1, pigeons):
                clauses.append([-var(p1, h), -var(p2, h)])
    assert search(clauses, pigeons * holes) is None


def random_cnf(rng, nvars=20, nclauses=85):
    return [
        [rng.choice([v, -v]) for v in rng.sample(range(1, nvars + 1), 3)]
        for _ in range(nclauses)
    ]


def brute_force_sat(clauses, nvars):
    for bits in range(1 << nvars):
        model = {v: bool(bits >> (v - 1) & 1) for v in range(1, nvars + 1)}
        if all(any(model[abs(l)] == (l > 0) for l in cl) for cl in clauses):
            return True
    return False


@cores
def test_agreement_with_brute_force_on_small_formulas(core):
    _, search = core
    rng = random.Random(11)
    for _ in range(40):
        clauses = random_cnf(rng, nvars=8, nclauses=36)
        assert (search(clauses, 8) is not None) == brute_force_sat(clauses, 8)


def test_cores_agree_on_random_3cnf():
    cores = satsolver.builtin_cores()
    if len(cores) < 2:
        pytest.skip("compiled core not built")
    rng = random.Random(7)
    for _ in range(100):
        clauses = random_cnf(rng)
        answers = {
            name: search(clauses, 20) is not None
            for name, search in cores.items()
        }
        assert len(set(answers.values())) == 1, answers


def test_backends_agree_on_random_3cnf():
    binary = shutil.which("rc-sat")
    if binary is None:
        pytest.skip("rc-sat not on PATH")
    rng = random.Random(3)
    for _ in range(100):
        clauses = random_cnf(rng)
        builtin = satsolver.solve_cnf(clauses, 20, backend="builtin")
        external = satsolver.solve_cnf(
            clauses, 20, backend="external", binary=binary
        )
        assert (builtin is None) == (external is None)


def test_dimacs_round_trip():
    clauses = [[1, -2], [2, 3, -1], [-3]]
    text = satsolver.to_dimacs(clauses, 3)
    assert text.splitlines()[0] == "p cnf 3 3"
    parsed, nvars = satsolver.parse_dimacs(text)
    assert parsed == clauses
    assert nvars == 3


def test_reply_parsing():
    model = satsolver.parse_solver_reply("c noise\ns SATISFIABLE\nv 1 -2 0\n")
    assert model == {1: True, 2: False}
    assert satsolver.parse_solver_reply("s UNSATISFIABLE\n") is None
    with pytest.raises(RuntimeError, match="protocol"):
        satsolver.parse_solver_reply("segfault\n")


def test_solve_cnf_checks_external_models(tmp_path, monkeypatch):
    lying = tmp_path / "lying-solver"
    lying.write_text("#!/bin/sh\necho 's SATISFIABLE'\necho 'v 1 2 0'\n")
    lying.chmod(0o755)
    with pytest.raises(RuntimeError, match="bad model"):
        satsolver.solve_cnf([[1], [-2]], 2, backend="external", binary=str(lying))


def test_external_backend_via_own_cli(tmp_path):
    binary = shutil.which("rc-sat")
    if binary is None:
        pytest.skip("rc-sat not on PATH")
    model = satsolver.solve_cnf(
        [[1, 2], [-1], [-2, 3]], 3, backend="external", binary=binary
    )
    assert model == {1: False, 2: True, 3: True}
    assert (
        satsolver.solve_cnf([[1], [-1]], 1, backend="external", binary=binary)
        is None
    )


def test_rc_sat_cli_protocol(tmp_path):
    path = tmp_path / "problem.cnf"
    path.write_text(satsolver.to_dimacs([[1, 2], [-1, -2]], 2))
    proc = subprocess.run(
        [sys.executable, "-m", "rcterm.satsolver", str(path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 10
    lines = proc.stdout.splitlines()
    assert lines[0] == "s SATISFIABLE"
    assert lines[1].startswith("v ") and lines[1].endswith(" 0")
