"""Thin wrapper around sympy's rational simplex for small feasibility problems."""

from __future__ import annotations

from fractions import Fraction

import sympy
from sympy.solvers.simplex import InfeasibleLPError, UnboundedLPError, lpmax


def _to_fraction(v) -> Fraction:
    v = sympy.Rational(v)
    return Fraction(int(v.p), int(v.q))


def maximize(objective, constraints, variables):
    """Return (optimum, assignment) with Fractions, None if infeasible, or ("unbounded", None)."""
    try:
        value, sol = lpmax(objective, constraints)
    except InfeasibleLPError:
        return None
    except UnboundedLPError:
        return "unbounded", None
    assignment = {v: _to_fraction(sol.get(v, 0)) for v in variables}
    return _to_fraction(value), assignment


def feasible_point(constraints, variables):
    """Some exact solution of the linear system, or None."""
    result = maximize(sympy.Integer(0), constraints, variables)
    if result is None:
        return None
    _, assignment = result
    return assignment
