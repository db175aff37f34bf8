"""Polynomial interpretations over the naturals for orienting rules.

Three shape classes are supported.  Strongly linear shapes are argument
sums plus a constant; they double as weight functions, which is what the
weight gap arithmetic needs.  Linear restricted shapes keep constructor
symbols strongly linear and give every other symbol free argument
coefficients of at least one.  Quadratic restricted shapes additionally
allow degree-two monomials on the non-constructor symbols.

Orientation is reduced to absolute positivity: a rule is strictly
oriented when every coefficient of [lhs] - [rhs] - 1, read as a
polynomial in the rule's variables, is non-negative.  That relaxation is
sound, keeps the constraints Diophantine, and feeds straight into the
bit-blasting solver.  The carrier always includes zero; interpretations
that live naturally on the positive naturals are expressed by shifting
their constants instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from . import diophantine
from .diophantine import Constraint, DioSystem, GE
from .polynomials import Poly
from .terms import CONSTRUCTOR, FunSym, Rule, Term, Var, funs, variables

SLI = "strongly-linear"
LINEAR = "linear-restricted"
QUADRATIC = "quadratic-restricted"
CLASSES = (SLI, LINEAR, QUADRATIC)

#: coefficients range over {0, ..., 2^width - 1}; three bits cover the
#: small domains that orient practically everything we meet
COEFF_BITS = 3


def arg_var(i: int) -> str:
    """Placeholder for argument slot i of a shape, 1-based."""
    return f"${i}"


def coeff_var(symbol: str, part: str) -> str:
    return f"{symbol}:{part}"


def _strongly_linear_shape(f: FunSym) -> Poly:
    shape = Poly.var(coeff_var(f.name, "c"))
    for i in range(1, f.arity + 1):
        shape = shape + Poly.var(arg_var(i))
    return shape


def _free_shape(f: FunSym, quadratic: bool) -> tuple[Poly, list[Constraint]]:
    shape = Poly.var(coeff_var(f.name, "c"))
    side = []
    for i in range(1, f.arity + 1):
        a = Poly.var(coeff_var(f.name, f"a{i}"))
        shape = shape + a * Poly.var(arg_var(i))
        side.append(Constraint(a - 1, GE))
    if quadratic:
        for i in range(1, f.arity + 1):
            for j in range(i, f.arity + 1):
                q = Poly.var(coeff_var(f.name, f"q{i}.{j}"))
                shape = shape + q * Poly.var(arg_var(i)) * Poly.var(arg_var(j))
    return shape, side


@dataclass(frozen=True)
class ParametricInterp:
    """Per-symbol shapes whose coefficients are solver variables."""

    shapes: Mapping[str, Poly]
    klass: str
    side: tuple[Constraint, ...]

    def coefficient_variables(self) -> set[str]:
        out = set()
        for shape in self.shapes.values():
            out |= {v for v in shape.variables() if not v.startswith("$")}
        return out


def parametric_interpretation(
    signature: Iterable[FunSym], klass: str
) -> ParametricInterp:
    if klass not in CLASSES:
        raise ValueError(f"unknown interpretation class {klass!r}")
    shapes = {}
    side: list[Constraint] = []
    for f in sorted(signature, key=lambda f: f.name):
        if klass == SLI or f.kind == CONSTRUCTOR:
            shapes[f.name] = _strongly_linear_shape(f)
        else:
            shapes[f.name], extra = _free_shape(f, klass == QUADRATIC)
            side.extend(extra)
    return ParametricInterp(shapes, klass, tuple(side))


def interpret_term(shapes: Mapping[str, Poly], t: Term) -> Poly:
    """The polynomial value of a term; its variables stand for the
    (unknown) values of the term's variables."""
    if isinstance(t, Var):
        return Poly.var(t.name)
    shape = shapes.get(t.sym.name)
    if shape is None:
        raise ValueError(f"no interpretation for symbol {t.sym.name}")
    values = {
        arg_var(i): interpret_term(shapes, arg)
        for i, arg in enumerate(t.args, start=1)
    }
    return shape.substitute(values)


@dataclass(frozen=True)
class ConcreteInterp:
    """Shapes with integer coefficients, ready for exact checking."""

    shapes: Mapping[str, Poly]
    klass: str

    def interpret(self, t: Term) -> Poly:
        return interpret_term(self.shapes, t)

    def zero_value(self, t: Term) -> int:
        """Evaluate with every term variable set to zero."""
        poly = self.interpret(t)
        return poly.evaluate(dict.fromkeys(poly.variables(), 0))

    def constant_of(self, name: str) -> int:
        shape = self.shapes[name]
        return shape.evaluate(dict.fromkeys(shape.variables(), 0))

    def max_weight(self) -> int:
        if not self.shapes:
            return 0
        return max(self.constant_of(name) for name in self.shapes)

    def is_safe(self, compounds: Iterable[FunSym]) -> bool:
        """Strict monotonicity of every compound symbol's shape."""
        for f in compounds:
            shape = self.shapes[f.name]
            for i in range(1, f.arity + 1):
                if shape.coefficient(((arg_var(i), 1),)) < 1:
                    return False
        return True


def from_assignment(
    pi: ParametricInterp, assignment: Mapping[str, int]
) -> ConcreteInterp:
    shapes = {}
    for name, shape in pi.shapes.items():
        values = {
            v: Poly.const(assignment[v])
            for v in shape.variables()
            if not v.startswith("$")
        }
        shapes[name] = shape.substitute(values)
    return ConcreteInterp(shapes, pi.klass)


def _rule_signature(rules: Iterable[Rule]) -> set[FunSym]:
    out: set[FunSym] = set()
    for rule in rules:
        out |= funs(rule.lhs) | funs(rule.rhs)
    return out


def _positivity(diff: Poly, term_vars: set[str]) -> list[Constraint]:
    grouped = diff.group_by(term_vars)
    return [Constraint(coeff, GE) for coeff in grouped.values()]


def compat_constraints(
    klass: str,
    strict: Iterable[Rule],
    weak: Iterable[Rule] = (),
    bits: int = COEFF_BITS,
) -> tuple[ParametricInterp, DioSystem]:
    """The Diophantine system whose solutions orient `strict` strictly
    and `weak` weakly under a `klass`-shaped interpretation."""
    strict = tuple(strict)
    weak = tuple(weak)
    pi = parametric_interpretation(_rule_signature(strict + weak), klass)
    constraints = list(pi.side)
    for rule, margin in [(r, 1) for r in strict] + [(r, 0) for r in weak]:
        diff = (
            interpret_term(pi.shapes, rule.lhs)
            - interpret_term(pi.shapes, rule.rhs)
            - margin
        )
        constraints.extend(
            _positivity(diff, variables(rule.lhs) | variables(rule.rhs))
        )
    unique = tuple(dict.fromkeys(constraints))
    widths = {v: bits for v in pi.coefficient_variables()}
    return pi, DioSystem(unique, widths)


class WeightGap(NamedTuple):
    gap: int
    max_weight: int


def weight_gap(ci: ConcreteInterp, rules: Iterable[Rule]) -> WeightGap:
    """Largest weight increase any rule can cause, next to the largest
    symbol weight.  Only meaningful for strongly linear shapes, where
    the value of a term under the all-zero assignment is its weight."""
    if ci.klass != SLI:
        raise ValueError("weight gap needs a strongly linear interpretation")
    gap = 0
    for rule in rules:
        increase = ci.zero_value(rule.rhs) - ci.zero_value(rule.lhs)
        gap = max(gap, increase)
    return WeightGap(gap, ci.max_weight())


def absolutely_positive(p: Poly) -> bool:
    return all(coeff >= 0 for coeff in p.terms.values())


def verify_interpretation(
    ci: ConcreteInterp,
    strict: Iterable[Rule],
    weak: Iterable[Rule] = (),
) -> bool:
    """Exact re-check by integer polynomial subtraction, independent of
    any solver output."""
    for rule in strict:
        if not absolutely_positive(
            ci.interpret(rule.lhs) - ci.interpret(rule.rhs) - 1
        ):
            return False
    for rule in weak:
        if not absolutely_positive(
            ci.interpret(rule.lhs) - ci.interpret(rule.rhs)
        ):
            return False
    return True


def search_interpretation(
    klass: str,
    strict: Iterable[Rule],
    weak: Iterable[Rule] = (),
    bits: int = COEFF_BITS,
    backend: str = "auto",
    binary: str | None = None,
    deadline: float | None = None,
) -> ConcreteInterp | None:
    strict = tuple(strict)
    weak = tuple(weak)
    pi, system = compat_constraints(klass, strict, weak, bits=bits)
    assignment = diophantine.solve(
        system, bits=bits, backend=backend, binary=binary, deadline=deadline
    )
    if assignment is None:
        return None
    ci = from_assignment(pi, assignment)
    if not verify_interpretation(ci, strict, weak):
        raise RuntimeError("solver model does not orient the rules")
    return ci


def runtime_bound_constant(ci: ConcreteInterp, trs) -> int:
    """A constant C with [t] <= C * |t|^d on ground basic terms, where d
    is 1 for (strongly) linear shapes and 2 for quadratic ones.

    Constructor shapes are strongly linear, so a ground constructor term
    v satisfies [v] <= MC * |v| for MC the largest constructor constant.
    Plugging that into the root symbol's shape gives the constant.
    """
    constructor_names = {f.name for f in trs.constructor_symbols}
    mc = max(
        (ci.constant_of(n) for n in constructor_names if n in ci.shapes),
        default=0,
    )
    best = 1
    for name, shape in ci.shapes.items():
        if name in constructor_names:
            best = max(best, ci.constant_of(name))
            continue
        linear = 0
        quad = 0
        for mono, coeff in shape.terms.items():
            degree = sum(e for _, e in mono)
            if degree == 1:
                linear = max(linear, coeff)
            elif degree == 2:
                quad += coeff
        best = max(best, linear * mc + quad * mc * mc + ci.constant_of(name))
    return best
