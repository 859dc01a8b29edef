"""Signed tropical polynomials: sign twists and positive parts.

A term is (sign, valuation, exponent). Real constant coefficients have
valuation 0. The positive part of a tropical hypersurface is the set of
points where the minimum is attained by terms of both signs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import sympy

from .errors import DimensionError, InputFormatError
from .exact_lp import feasible_point
from .semiring_core import parse_rational


@dataclass(frozen=True, order=True)
class SignedTerm:
    exponent: tuple
    sign: int
    valuation: Fraction = Fraction(0)

    def value_at(self, w) -> Fraction:
        return self.valuation + sum(a * x for a, x in zip(self.exponent, w))


@dataclass(frozen=True)
class SignedTropicalPolynomial:
    nvars: int
    terms: tuple

    @classmethod
    def from_coefficients(cls, nvars, coeffs: Mapping[tuple, object]) -> "SignedTropicalPolynomial":
        """Real rational coefficients keyed by exponent; zero coefficients are dropped."""
        terms = []
        for exp, c in coeffs.items():
            c = parse_rational(c)
            if len(exp) != nvars:
                raise DimensionError(f"exponent {exp} has wrong length")
            if c:
                terms.append(SignedTerm(tuple(exp), 1 if c > 0 else -1))
        if not terms:
            raise InputFormatError("the zero polynomial has no tropicalization")
        return cls(nvars, tuple(sorted(terms)))

    @classmethod
    def linear_form(cls, coeffs: Sequence) -> "SignedTropicalPolynomial":
        n = len(coeffs)
        unit = lambda k: tuple(int(i == k) for i in range(n))  # noqa: E731
        return cls.from_coefficients(n, {unit(k): c for k, c in enumerate(coeffs)})

    def signs(self) -> dict:
        return {t.exponent: t.sign for t in self.terms}

    def sign_twist(self, s: Sequence[int]) -> "SignedTropicalPolynomial":
        """Multiply each term's sign by the product of s_i over its exponent."""
        if len(s) != self.nvars:
            raise DimensionError("sign vector length differs from the number of variables")
        twisted = []
        for t in self.terms:
            sign = t.sign
            for si, a in zip(s, t.exponent):
                if si == -1 and a % 2:
                    sign = -sign
            twisted.append(SignedTerm(t.exponent, sign, t.valuation))
        return SignedTropicalPolynomial(self.nvars, tuple(sorted(twisted)))

    def initial_terms(self, w) -> list:
        w = [parse_rational(x) for x in w]
        values = [t.value_at(w) for t in self.terms]
        low = min(values)
        return [t for t, v in zip(self.terms, values) if v == low]

    def is_positive_at(self, w) -> bool:
        return {t.sign for t in self.initial_terms(w)} == {1, -1}

    def is_monomial_signed(self) -> bool:
        return len({t.sign for t in self.terms}) == 1

    def positive_witness(self):
        """A point of the positive part, or None if it is empty."""
        if self.is_monomial_signed():
            return None
        xs = sympy.symbols(f"w1:{self.nvars + 1}")

        def expr(t):
            return sympy.Rational(t.valuation) + sum(a * x for a, x in zip(t.exponent, xs))

        pos = [t for t in self.terms if t.sign == 1]
        neg = [t for t in self.terms if t.sign == -1]
        for a, b in itertools.product(pos, neg):
            cons = [sympy.Eq(expr(a), expr(b))] + [expr(a) <= expr(c) for c in self.terms if c not in (a, b)]
            point = feasible_point(cons, xs)
            if point is not None:
                w = tuple(point[x] for x in xs)
                if self.is_positive_at(w):
                    return w
        return None

    def positive_part_empty(self) -> bool:
        return self.positive_witness() is None

    def __str__(self):
        parts = []
        for t in self.terms:
            mono = "*".join(f"x{k + 1}" + (f"^{a}" if a > 1 else "") for k, a in enumerate(t.exponent) if a) or "1"
            parts.append(("+" if t.sign > 0 else "-") + mono)
        return " ".join(parts)


def plucker_circuit_forms(m: int, p: Mapping[tuple, object]):
    """Linear forms p_jk x_i - p_ik x_j + p_ij x_k for each triple i<j<k of [m], keyed by the triple."""
    coords = {(min(i, j), max(i, j)): parse_rational(v) for (i, j), v in p.items()}
    forms = {}
    for i, j, k in itertools.combinations(range(1, m + 1), 3):
        coeffs = [Fraction(0)] * m
        coeffs[i - 1] = coords[(j, k)]
        coeffs[j - 1] = -coords[(i, k)]
        coeffs[k - 1] = coords[(i, j)]
        forms[(i, j, k)] = (tuple(coeffs), SignedTropicalPolynomial.linear_form(coeffs))
    return forms
