import random

import pytest

from rcterm.diophantine import (
    EQ,
    GE,
    Constraint,
    DioSystem,
    bitblast,
    enumerate_solve,
    solve,
)
from rcterm.polynomials import Poly

X, Y = Poly.var("x"), Poly.var("y")


def test_single_inequality_two_bits():
    system = DioSystem([Constraint(X - 1)])
    assignment = solve(system, bits=2, backend="builtin")
    assert assignment is not None
    assert assignment["x"] in {1, 2, 3}


def test_negative_constant_is_unsat():
    system = DioSystem([Constraint(Poly.const(-1))])
    assert solve(system, bits=3, backend="builtin") is None


def test_equalities_pin_a_product():
    system = DioSystem([Constraint(X * Y - 4, EQ), Constraint(X - Y, EQ)])
    assert enumerate_solve(system, 8) == {"x": 2, "y": 2}
    assert solve(system, bits=3, backend="builtin") == {"x": 2, "y": 2}


def test_empty_system_yields_all_zero():
    system = DioSystem((), {"x": 2, "y": 1})
    assert enumerate_solve(system, 8) == {"x": 0, "y": 0}
    assert solve(system, bits=2, backend="builtin") == {"x": 0, "y": 0}


def test_products_never_truncate():
    # 9 needs four bits; a modular two-bit product could never reach it
    system = DioSystem([Constraint(X * X - 9, EQ)])
    assert solve(system, bits=2, backend="builtin") == {"x": 3}


def test_enumeration_budget_guard():
    names = [f"v{i}" for i in range(9)]
    system = DioSystem([Constraint(sum(map(Poly.var, names), Poly.const(0)))])
    with pytest.raises(ResourceWarning):
        enumerate_solve(system, 10)


def test_cnf_literals_stay_in_range():
    clauses, nvars, _ = bitblast(DioSystem([Constraint(X * Y - 3)]), 3)
    assert all(1 <= abs(l) <= nvars for cl in clauses for l in cl)


def test_solve_rejects_corrupt_models(monkeypatch):
    from rcterm import diophantine

    monkeypatch.setattr(
        diophantine.satsolver,
        "solve_cnf",
        lambda clauses, nvars, **kw: {v: True for v in range(1, nvars + 1)},
    )
    with pytest.raises(RuntimeError, match="re-verification"):
        solve(DioSystem([Constraint(X - 1, EQ)]), bits=3, backend="builtin")


def test_known_coefficient_system():
    # a 10-constraint system from an interpretation search, kept as a
    # regression fixture; 8 unknowns, one equality, known solution
    a, b, c, d = Poly.var("a"), Poly.var("b"), Poly.var("c"), Poly.var("d")
    e, f, g, h = Poly.var("e"), Poly.var("f"), Poly.var("g"), Poly.var("h")
    system = DioSystem(
        [
            Constraint(b**2 * e * f + b * f**2 - a * b * f**2 - b**2 * f),
            Constraint(
                a * b * e**2 + a**2 * e * f + a * e * f
                - 2 * a**2 * e * f - a * e * b
            ),
            Constraint(b**2 * f * h - b * d * f**2 - b * f),
            Constraint(a**2 * e * h + a * d * e - a * d * e**2 - a * e * h),
            Constraint(a + b - 1),
            Constraint(e + f - 1),
            Constraint(b * e + f - a * f - b, EQ),
            Constraint(
                a * f**2 + b**2 * e**2 + b * e * f
                - a**2 * f**2 - a * b * f - b**2 * e
            ),
            Constraint(
                2 * a * b * f * h + b**2 * e * h + b * d * f
                - a * d * f**2 - 2 * b * d * e * f - b * f * h - b * e - a * f
            ),
            Constraint(
                a**2 * f * h + 2 * a * b * e * h + a * d * f + b * d * e
                - 2 * a * d * e * f - a * f * h - b * d * e**2
                - b * e * h - a * e
            ),
        ],
        widths={name: 3 for name in "abcdefgh"},
    )
    known = dict(a=1, b=1, c=0, d=0, e=1, f=0, g=0, h=1)
    assert system.check(known)
    found = solve(system, bits=3, backend="builtin")
    assert found is not None
    assert system.check(found)


def random_system(rng):
    names = rng.sample("uvwxyz", rng.randint(1, 6))
    constraints = []
    for _ in range(rng.randint(1, 3)):
        poly = Poly.const(rng.randint(-4, 2))
        for _ in range(rng.randint(1, 3)):
            coeff = rng.choice([-3, -2, -1, 1, 2, 3])
            mono = Poly.const(coeff)
            for _ in range(rng.randint(1, 3)):
                mono = mono * Poly.var(rng.choice(names))
            poly = poly + mono
        relation = EQ if rng.random() < 0.2 else GE
        constraints.append(Constraint(poly, relation))
    widths = {n: rng.choice([2, 2, 3]) for n in names}
    return DioSystem(constraints, widths)


def test_enumeration_agrees_with_bitblasting():
    rng = random.Random(23)
    for _ in range(50):
        system = random_system(rng)
        slow = enumerate_solve(system, 8)
        fast = solve(system, bits=3, backend="builtin")
        assert (slow is None) == (fast is None), system
        if slow is not None:
            assert system.check(slow) and system.check(fast)
