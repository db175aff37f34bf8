"""Context dependent interpretations with one shape per symbol.

Every symbol f gets the value function

    f[D](z_1, ..., z_n) = sum a_i z_i + sum b_i z_i D + c D + d

together with per-argument parameter functions D / (a_i + b_i D), which
share the a and b coefficients so that monotonicity by a margin of D
comes for free.  The restricted flavour additionally pins every a_i to
zero or one, which is what drops the derivational complexity bound from
exponential to quadratic.

Symbolic evaluation happens inside ordinary polynomials by encoding the
non-polynomial pieces as opaque variables: "@D" is the context value,
"@q[...]" a quotient D/(a+bD), and "@x[...]" the unknown value of a term
variable under the quotient it was reached with.  A registry maps those
encoded names back to their structure.  Denominator clearing multiplies
a constraint by (a + bD) until no quotient variables remain, which is
sound because the denominators are forced positive.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, NamedTuple

from . import diophantine
from .diophantine import Constraint, DioSystem, EQ, GE
from .polynomials import Poly
from .terms import Term, Trs, Var

DELTA_LINEAR = "delta-linear"
DELTA_RESTRICTED = "delta-restricted"
CLASSES = (DELTA_LINEAR, DELTA_RESTRICTED)

DELTA = "@D"

COEFF_BITS = 3


@dataclass(frozen=True)
class Quotient:
    """The value D / (a + b D); a and b are coefficient polynomials."""

    a: Poly
    b: Poly

    def compose(self, inner: Quotient) -> Quotient:
        """Substitute `inner` for D; the result is again a quotient."""
        return Quotient(self.a * inner.a, self.a * inner.b + self.b)

    def is_trivial(self) -> bool:
        return self.a == 1 and self.b == 0

    def value(self, delta: Fraction, coeffs: Mapping[str, int]) -> Fraction:
        a = self.a.evaluate(coeffs)
        b = self.b.evaluate(coeffs)
        return delta / (a + b * delta)

    def key(self) -> str:
        return f"{self.a};{self.b}"


TRIVIAL = Quotient(Poly.const(1), Poly.const(0))


class CdaSymbol(NamedTuple):
    a: tuple[Poly, ...]
    b: tuple[Poly, ...]
    c: Poly
    d: Poly

    def parameter(self, i: int) -> Quotient:
        return Quotient(self.a[i], self.b[i])


@dataclass(frozen=True)
class Cda:
    """Interpretation and parameter functions for a whole signature."""

    symbols: Mapping[str, CdaSymbol]
    klass: str

    def coefficient_variables(self) -> set[str]:
        out: set[str] = set()
        for sym in self.symbols.values():
            for poly in itertools.chain(sym.a, sym.b, (sym.c, sym.d)):
                out |= poly.variables()
        return out

    def argument_coefficient_variables(self) -> set[str]:
        out: set[str] = set()
        for sym in self.symbols.values():
            for poly in sym.a:
                out |= poly.variables()
        return out


def parametric_cda(trs: Trs, klass: str) -> Cda:
    if klass not in CLASSES:
        raise ValueError(f"unknown interpretation class {klass!r}")
    symbols = {}
    for f in sorted(trs.signature, key=lambda f: f.name):
        symbols[f.name] = CdaSymbol(
            a=tuple(
                Poly.var(f"{f.name}:a{i}") for i in range(1, f.arity + 1)
            ),
            b=tuple(
                Poly.var(f"{f.name}:b{i}") for i in range(1, f.arity + 1)
            ),
            c=Poly.var(f"{f.name}:c"),
            d=Poly.var(f"{f.name}:d"),
        )
    return Cda(symbols, klass)


def instantiate(cda: Cda, assignment: Mapping[str, int]) -> Cda:
    def fix(poly: Poly) -> Poly:
        return poly.substitute(
            {v: Poly.const(assignment[v]) for v in poly.variables()}
        )

    symbols = {
        name: CdaSymbol(
            a=tuple(fix(p) for p in sym.a),
            b=tuple(fix(p) for p in sym.b),
            c=fix(sym.c),
            d=fix(sym.d),
        )
        for name, sym in cda.symbols.items()
    }
    return Cda(symbols, cda.klass)


# ---------------------------------------------------------------------------
# symbolic evaluation

def _quotient_literal(q: Quotient, table: dict) -> Poly:
    if q.is_trivial():
        return Poly.var(DELTA)
    name = f"@q[{q.key()}]"
    table[name] = ("quotient", q)
    return Poly.var(name)


def _assignment_literal(var: str, q: Quotient, table: dict) -> Poly:
    name = f"@x[{var};{q.key()}]"
    table[name] = ("assign", (var, q))
    return Poly.var(name)


def delta_eval(
    cda: Cda, t: Term, table: dict, context: Quotient = TRIVIAL
) -> Poly:
    """Symbolic value of t under the context quotient accumulated so
    far.  Term variables become opaque assignment literals indexed by
    that quotient."""
    if isinstance(t, Var):
        return _assignment_literal(t.name, context, table)
    sym = cda.symbols.get(t.sym.name)
    if sym is None:
        raise ValueError(f"no interpretation for symbol {t.sym.name}")
    delta = _quotient_literal(context, table)
    value = sym.c * delta + sym.d
    for i, arg in enumerate(t.args):
        inner = sym.parameter(i).compose(context)
        arg_value = delta_eval(cda, arg, table, inner)
        value = value + sym.a[i] * arg_value + sym.b[i] * arg_value * delta
    return value


def clear_denominators(poly: Poly, table: Mapping[str, tuple]) -> Poly:
    """Multiply by quotient denominators until no quotient literal is
    left.  Each pass lowers the highest power of the chosen quotient by
    one: monomials containing it trade one power for a factor D, all
    others pick up the denominator."""
    while True:
        present = sorted(
            v for v in poly.variables() if v.startswith("@q[")
        )
        if not present:
            return poly
        name = present[0]
        q: Quotient = table[name][1]
        denominator = q.a + q.b * Poly.var(DELTA)
        out = Poly()
        for mono, coeff in poly.terms.items():
            exps = dict(mono)
            if name in exps:
                if exps[name] == 1:
                    del exps[name]
                else:
                    exps[name] -= 1
                exps[DELTA] = exps.get(DELTA, 0) + 1
                out = out + Poly({tuple(sorted(exps.items())): coeff})
            else:
                out = out + Poly({mono: coeff}) * denominator
        poly = out


def eval_symbolic(
    poly: Poly,
    table: Mapping[str, tuple],
    delta: Fraction,
    coeffs: Mapping[str, int],
    alpha: Callable[[str, Fraction], Fraction],
):
    """Evaluate an encoded polynomial by expanding its literals."""
    values: dict[str, object] = {}
    for name in poly.variables():
        if name == DELTA:
            values[name] = delta
        elif name.startswith("@q["):
            values[name] = table[name][1].value(delta, coeffs)
        elif name.startswith("@x["):
            var, q = table[name][1]
            values[name] = alpha(var, q.value(delta, coeffs))
        else:
            values[name] = coeffs[name]
    return poly.evaluate(values)


def monotonicity_defect(cda: Cda, name: str, i: int, table: dict) -> Poly:
    """f[D](.., z + q_i(D), ..) - f[D](.., z, ..) - D after clearing.
    The shared coefficients make this vanish identically, which is the
    whole point of tying parameter functions to the shape."""
    sym = cda.symbols[name]
    delta = Poly.var(DELTA)
    q = _quotient_literal(sym.parameter(i), table)
    bump = (sym.a[i] + sym.b[i] * delta) * q - delta
    return clear_denominators(bump, table)


# ---------------------------------------------------------------------------
# constraint generation

def _literal_names(poly: Poly) -> set[str]:
    return {v for v in poly.variables() if v.startswith("@")}


def _identify_assignments(poly: Poly, table: Mapping[str, tuple]) -> Poly:
    """Rename every assignment literal of a variable x to one shared
    literal; the equality constraints license exactly this."""
    mapping = {}
    for name in _literal_names(poly):
        if name.startswith("@x["):
            var = table[name][1][0]
            mapping[name] = Poly.var(f"@v[{var}]")
    return poly.substitute(mapping) if mapping else poly


def compatibility_constraints(
    trs: Trs, cda: Cda, table: dict
) -> list[Poly]:
    """[l] - [r] - D per rule, plus positive-denominator guards."""
    polys = []
    for rule in trs.rules:
        lhs = delta_eval(cda, rule.lhs, table)
        rhs = delta_eval(cda, rule.rhs, table)
        polys.append(lhs - rhs - Poly.var(DELTA))
    for f in sorted(trs.signature, key=lambda f: f.name):
        sym = cda.symbols[f.name]
        for i in range(f.arity):
            polys.append(sym.a[i] + sym.b[i] - 1)
    return polys


def _equality_parts(d1: Quotient, d2: Quotient) -> list[Poly]:
    parts = []
    for lhs, rhs in [(d1.a, d2.a), (d1.b, d2.b)]:
        diff = lhs - rhs
        if diff:
            parts.append(diff)
    return parts


def equality_constraints(
    cleared: Iterable[Poly], table: Mapping[str, tuple]
) -> list[Poly]:
    """Whenever one constraint sees the same term variable under two
    distinct quotients, their denominators are forced equal."""
    out: dict[Poly, None] = {}
    for poly in cleared:
        by_var: dict[str, list[Quotient]] = {}
        for name in sorted(_literal_names(poly)):
            if name.startswith("@x["):
                var, q = table[name][1]
                by_var.setdefault(var, []).append(q)
        for quotients in by_var.values():
            for d1, d2 in itertools.combinations(quotients, 2):
                for part in _equality_parts(d1, d2):
                    out.setdefault(part, None)
    return list(out)


@dataclass(frozen=True)
class CdiProblem:
    cda: Cda
    table: dict
    cleared: tuple[Poly, ...]
    equalities: tuple[Poly, ...]
    system: DioSystem


def build_constraints(
    trs: Trs, klass: str, bits: int = COEFF_BITS
) -> CdiProblem:
    cda = parametric_cda(trs, klass)
    table: dict = {}
    raw = compatibility_constraints(trs, cda, table)
    cleared = tuple(clear_denominators(p, table) for p in raw)
    equalities = tuple(equality_constraints(cleared, table))

    constraints: list[Constraint] = []
    for poly in cleared:
        identified = _identify_assignments(poly, table)
        for coeff in identified.group_by(_literal_names(identified)).values():
            constraints.append(Constraint(coeff, GE))
    for poly in equalities:
        constraints.append(Constraint(poly, EQ))
    unique = tuple(dict.fromkeys(constraints))

    widths = {v: bits for v in cda.coefficient_variables()}
    if klass == DELTA_RESTRICTED:
        for v in cda.argument_coefficient_variables():
            widths[v] = 1
    return CdiProblem(cda, table, cleared, equalities,
                      DioSystem(unique, widths))


# ---------------------------------------------------------------------------
# exact numeric checking and search

def _concrete(poly: Poly) -> int:
    if not poly.is_constant():
        raise ValueError(f"coefficient {poly} is not instantiated")
    return poly.constant


def numeric_value(
    cda: Cda,
    t: Term,
    delta: Fraction,
    alpha: Callable[[str, Fraction], Fraction],
):
    """Evaluate a term directly from the definition, with exact
    rational arithmetic; independent of the symbolic pipeline."""
    if isinstance(t, Var):
        return alpha(t.name, delta)
    sym = cda.symbols[t.sym.name]
    total = _concrete(sym.c) * delta + _concrete(sym.d)
    for i, arg in enumerate(t.args):
        a = _concrete(sym.a[i])
        b = _concrete(sym.b[i])
        inner = delta / (a + b * delta)
        value = numeric_value(cda, arg, inner, alpha)
        total = total + a * value + b * value * delta
    return total


def verify_cdi(
    trs: Trs,
    cda: Cda,
    deltas: Iterable[Fraction] = (
        Fraction(1), Fraction(1, 2), Fraction(1, 4)
    ),
    samples: int = 5,
    seed: int = 0,
) -> bool:
    """Spot-check compatibility: [l] - [r] >= D for sampled D and
    random non-negative rational variable values."""
    rng = random.Random(seed)
    for delta in deltas:
        for _ in range(samples):
            cache: dict[tuple[str, Fraction], Fraction] = {}

            def alpha(name: str, d: Fraction) -> Fraction:
                key = (name, d)
                if key not in cache:
                    cache[key] = Fraction(rng.randrange(0, 24), 3)
                return cache[key]

            for rule in trs.rules:
                lhs = numeric_value(cda, rule.lhs, delta, alpha)
                rhs = numeric_value(cda, rule.rhs, delta, alpha)
                if lhs - rhs < delta:
                    return False
    return True


def search_cdi(
    trs: Trs,
    klass: str,
    bits: int = COEFF_BITS,
    backend: str = "auto",
    binary: str | None = None,
    deadline: float | None = None,
) -> Cda | None:
    problem = build_constraints(trs, klass, bits=bits)
    assignment = diophantine.solve(
        problem.system, bits=bits, backend=backend, binary=binary,
        deadline=deadline,
    )
    if assignment is None:
        return None
    cda = instantiate(problem.cda, assignment)
    if not verify_cdi(trs, cda):
        raise RuntimeError("interpretation fails the compatibility check")
    return cda


# ---------------------------------------------------------------------------
# complexity certificates

class CdiBound(NamedTuple):
    kind: str
    constant: int

    def bound(self, n: int) -> int:
        if self.kind == "quadratic":
            return self.constant * n * n
        return self.constant ** n


def cdi_certificate(cda: Cda) -> CdiBound:
    """Derivational complexity bound read off a compatible
    interpretation: quadratic for the restricted class, exponential for
    the linear one."""
    coefficients = [0]
    consts = [1]
    arg_deltas = [1]
    for sym in cda.symbols.values():
        coefficients.extend(_concrete(p) for p in sym.a)
        coefficients.extend(_concrete(p) for p in sym.b)
        coefficients.append(_concrete(sym.c))
        coefficients.append(_concrete(sym.d))
        consts.append(_concrete(sym.c))
        consts.append(_concrete(sym.d))
        arg_deltas.extend(_concrete(p) for p in sym.b)
    if cda.klass == DELTA_RESTRICTED:
        k = max(max(consts), max(arg_deltas))
        return CdiBound("quadratic", k * k)
    return CdiBound("exponential", max(coefficients) + 2)
