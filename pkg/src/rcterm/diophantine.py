"""Diophantine constraint systems over bounded natural domains.

Constraints are polynomial inequalities `p >= 0` or equalities `p = 0`
with integer coefficients.  Three ways to solve: bit-blasting to CNF for
the SAT backends, and exhaustive enumeration as the slow oracle.  Widths
never truncate: products get the full sum of argument widths, sums grow a
carry bit, so a decoded model is exact by construction.  Decoded models
are still re-checked with integer arithmetic before anyone sees them;
solvers stay untrusted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .polynomials import Poly
from . import satsolver

GE = ">=0"
EQ = "==0"

ENUMERATION_BUDGET = 10**7


@dataclass(frozen=True)
class Constraint:
    poly: Poly
    relation: str = GE

    def __post_init__(self):
        if self.relation not in (GE, EQ):
            raise ValueError(f"unknown relation {self.relation!r}")

    def holds(self, assignment: Mapping[str, int]) -> bool:
        value = self.poly.evaluate(assignment)
        return value == 0 if self.relation == EQ else value >= 0

    def __repr__(self) -> str:
        op = "=" if self.relation == EQ else ">="
        return f"{self.poly} {op} 0"


@dataclass(frozen=True)
class DioSystem:
    constraints: tuple = ()
    widths: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "widths", dict(self.widths))

    def variables(self) -> list[str]:
        out = set(self.widths)
        for c in self.constraints:
            out |= c.poly.variables()
        return sorted(out)

    def width(self, var: str, default_bits: int) -> int:
        return self.widths.get(var, default_bits)

    def check(self, assignment: Mapping[str, int]) -> bool:
        return all(c.holds(assignment) for c in self.constraints)


class _CnfBuilder:
    """Tseitin-style circuit builder with constant folding.

    Literals are DIMACS ints; TRUE/FALSE are +/- a dedicated variable
    pinned by a unit clause.
    """

    def __init__(self):
        self.nvars = 1
        self.clauses: list[list[int]] = [[1]]
        self.TRUE = 1
        self.FALSE = -1

    def new_var(self) -> int:
        self.nvars += 1
        return self.nvars

    def add_clause(self, *lits: int):
        if self.TRUE in lits:
            return
        body = [l for l in lits if l != self.FALSE]
        self.clauses.append(body)

    def gate_and(self, a: int, b: int) -> int:
        if a == self.FALSE or b == self.FALSE:
            return self.FALSE
        if a == self.TRUE:
            return b
        if b == self.TRUE:
            return a
        if a == b:
            return a
        if a == -b:
            return self.FALSE
        c = self.new_var()
        self.add_clause(-a, -b, c)
        self.add_clause(a, -c)
        self.add_clause(b, -c)
        return c

    def gate_xor(self, a: int, b: int) -> int:
        if a == self.FALSE:
            return b
        if b == self.FALSE:
            return a
        if a == self.TRUE:
            return -b
        if b == self.TRUE:
            return -a
        if a == b:
            return self.FALSE
        if a == -b:
            return self.TRUE
        c = self.new_var()
        self.add_clause(-a, -b, -c)
        self.add_clause(a, b, -c)
        self.add_clause(a, -b, c)
        self.add_clause(-a, b, c)
        return c

    def gate_majority(self, a: int, b: int, c: int) -> int:
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            if x == self.TRUE:
                return self.gate_or(y, z)
            if x == self.FALSE:
                return self.gate_and(y, z)
        m = self.new_var()
        for x, y in ((a, b), (a, c), (b, c)):
            self.add_clause(-x, -y, m)
            self.add_clause(x, y, -m)
        return m

    def gate_or(self, a: int, b: int) -> int:
        return -self.gate_and(-a, -b)

    # ---- unsigned vectors, least significant bit first ----

    def constant(self, value: int) -> list[int]:
        bits = []
        while value:
            bits.append(self.TRUE if value & 1 else self.FALSE)
            value >>= 1
        return bits

    def add_vectors(self, xs: list[int], ys: list[int]) -> list[int]:
        out = []
        carry = self.FALSE
        for i in range(max(len(xs), len(ys))):
            a = xs[i] if i < len(xs) else self.FALSE
            b = ys[i] if i < len(ys) else self.FALSE
            out.append(self.gate_xor(self.gate_xor(a, b), carry))
            carry = self.gate_majority(a, b, carry)
        out.append(carry)
        while len(out) > 1 and out[-1] == self.FALSE:
            out.pop()
        return out

    def mul_vectors(self, xs: list[int], ys: list[int]) -> list[int]:
        if not xs or not ys:
            return []
        acc: list[int] = []
        for i, y in enumerate(ys):
            row = [self.FALSE] * i + [self.gate_and(x, y) for x in xs]
            acc = self.add_vectors(acc, row) if acc else row
        return acc

    def geq(self, xs: list[int], ys: list[int]) -> int:
        """Literal asserting xs >= ys (no borrow out of xs - ys)."""
        borrow = self.FALSE
        for i in range(max(len(xs), len(ys))):
            a = xs[i] if i < len(xs) else self.FALSE
            b = ys[i] if i < len(ys) else self.FALSE
            borrow = self.gate_majority(-a, b, borrow)
        return -borrow


def bitblast(system: DioSystem, bits: int):
    """Translate to CNF; returns (clauses, nvars, decode) where decode
    maps a SAT model to the integer assignment it encodes.
    """
    if bits < 1:
        raise ValueError("need at least one bit")
    builder = _CnfBuilder()
    var_bits: dict[str, list[int]] = {}
    for name in system.variables():
        width = system.width(name, bits)
        var_bits[name] = [builder.new_var() for _ in range(width)]

    for constraint in system.constraints:
        pos_vec: list[int] = []
        neg_vec: list[int] = []
        for mono, coeff in sorted(constraint.poly.terms.items()):
            vec = builder.constant(abs(coeff))
            for var, exp in mono:
                for _ in range(exp):
                    vec = builder.mul_vectors(vec, var_bits[var])
            if coeff > 0:
                pos_vec = builder.add_vectors(pos_vec, vec)
            else:
                neg_vec = builder.add_vectors(neg_vec, vec)
        builder.add_clause(builder.geq(pos_vec, neg_vec))
        if constraint.relation == EQ:
            builder.add_clause(builder.geq(neg_vec, pos_vec))

    def decode(model: Mapping[int, bool]) -> dict[str, int]:
        out = {}
        for name, lits in var_bits.items():
            out[name] = sum(1 << i for i, lit in enumerate(lits) if model[lit])
        return out

    return builder.clauses, builder.nvars, decode


def solve(
    system: DioSystem,
    bits: int,
    backend: str = "auto",
    binary: str | None = None,
    deadline: float | None = None,
):
    """Bit-blast, run SAT, decode, and re-verify.  Returns an integer
    assignment or None.  A decoded model failing the exact re-check is a
    bug somewhere below and raises instead of lying.
    """
    clauses, nvars, decode = bitblast(system, bits)
    model = satsolver.solve_cnf(
        clauses, nvars, backend=backend, binary=binary, deadline=deadline
    )
    if model is None:
        return None
    assignment = decode(model)
    if not system.check(assignment):
        raise RuntimeError(
            "decoded SAT model fails exact arithmetic re-verification"
        )
    return assignment


def enumerate_solve(system: DioSystem, bound: int):
    """Exhaustive reference solver; first satisfying assignment in
    lexicographic variable order, or None.
    """
    names = system.variables()
    domains = []
    total = 1
    for name in names:
        width = system.widths.get(name)
        top = bound if width is None else min(bound, 1 << width)
        domains.append(range(top))
        total *= top
        if total > ENUMERATION_BUDGET:
            raise ResourceWarning(
                f"enumeration space exceeds {ENUMERATION_BUDGET} combinations"
            )
    for combo in itertools.product(*domains):
        assignment = dict(zip(names, combo))
        if system.check(assignment):
            return assignment
    return None
