"""Exact multivariate polynomial arithmetic over the integers.

Monomials are canonical sorted tuples of (variable, exponent) pairs with
positive exponents; the empty tuple is the constant monomial.  Coefficients
are plain Python ints, so all arithmetic is exact.  Evaluation accepts any
commutative values (ints, Fractions, other Polys), which is what the
interpretation search and the rational spot checks both lean on.
"""

from __future__ import annotations

from typing import Iterable, Mapping

Monomial = tuple[tuple[str, int], ...]


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    exps = dict(m1)
    for var, e in m2:
        exps[var] = exps.get(var, 0) + e
    return tuple(sorted(exps.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


class Poly:
    """Immutable polynomial; hashable so it can key interning tables."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        cleaned = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff != 0:
                    cleaned[tuple(sorted(mono))] = coeff
        object.__setattr__(self, "terms", cleaned)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def const(cls, c: int) -> Poly:
        return cls({(): c})

    @classmethod
    def var(cls, name: str) -> Poly:
        return cls({((name, 1),): 1})

    @classmethod
    def promote(cls, value) -> Poly:
        if isinstance(value, Poly):
            return value
        return cls.const(value)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(
                self, "_hash", hash(tuple(sorted(self.terms.items())))
            )
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other) -> Poly:
        other = Poly.promote(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            terms[mono] = terms.get(mono, 0) + coeff
        return Poly(terms)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly({mono: -coeff for mono, coeff in self.terms.items()})

    def __sub__(self, other) -> Poly:
        return self + (-Poly.promote(other))

    def __rsub__(self, other) -> Poly:
        return Poly.promote(other) + (-self)

    def __mul__(self, other) -> Poly:
        other = Poly.promote(other)
        terms: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = mono_mul(m1, m2)
                terms[mono] = terms.get(mono, 0) + c1 * c2
        return Poly(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Poly:
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1)
        for _ in range(n):
            result = result * self
        return result

    def coefficient(self, mono: Monomial) -> int:
        return self.terms.get(tuple(sorted(mono)), 0)

    @property
    def constant(self) -> int:
        return self.terms.get((), 0)

    def variables(self) -> set[str]:
        return {var for mono in self.terms for var, _ in mono}

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree 0."""
        if not self.terms:
            return 0
        return max(mono_degree(mono) for mono in self.terms)

    def evaluate(self, assignment: Mapping[str, object]):
        """Evaluate under a total assignment of the variables.

        Values only need + and *; missing variables raise KeyError so a
        partial assignment is caught instead of silently zeroed.
        """
        total = 0
        for mono, coeff in self.terms.items():
            value = coeff
            for var, e in mono:
                base = assignment[var]
                for _ in range(e):
                    value = value * base
            total = total + value
        return total

    def substitute(self, mapping: Mapping[str, Poly]) -> Poly:
        """Replace variables by polynomials; absent variables stay put."""
        total = Poly()
        for mono, coeff in self.terms.items():
            part = Poly.const(coeff)
            for var, e in mono:
                base = mapping.get(var)
                if base is None:
                    base = Poly.var(var)
                part = part * base ** e
            total = total + part
        return total

    def group_by(self, vars_of_interest: Iterable[str]) -> dict[Monomial, Poly]:
        """Split into coefficient polynomials, grouped by monomials over
        the given variables.  The remaining variables end up inside the
        coefficients.  This is how an interpretation inequality collapses
        into one constraint per term-variable monomial.
        """
        keep = set(vars_of_interest)
        grouped: dict[Monomial, dict[Monomial, int]] = {}
        for mono, coeff in self.terms.items():
            outer = tuple((v, e) for v, e in mono if v in keep)
            inner = tuple((v, e) for v, e in mono if v not in keep)
            bucket = grouped.setdefault(outer, {})
            bucket[inner] = bucket.get(inner, 0) + coeff
        return {outer: Poly(inner) for outer, inner in grouped.items()}

    def is_constant(self) -> bool:
        return not self.terms or self.terms.keys() == {()}

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=lambda m: (-mono_degree(m), m)):
            coeff = self.terms[mono]
            body = "*".join(
                var if e == 1 else f"{var}^{e}" for var, e in mono
            )
            if not body:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(body)
            elif coeff == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{coeff}*{body}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")
