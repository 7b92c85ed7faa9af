"""Independent expansion oracle based on sympy.

Closed-form rational functions are expanded through sympy's univariate
series machinery (an auxiliary scaling variable makes the truncation a
total-degree one), so the expected term dictionaries do not go through the
package's own series arithmetic.
"""

from fractions import Fraction

import sympy


def expand_terms(expr, variables, degree_bound):
    """Total-degree truncation of a sympy expression as {exponents: Fraction}."""
    t = sympy.Symbol("_t")
    scaled = expr.subs({x: t * x for x in variables}, simultaneous=True)
    series = sympy.series(scaled, t, 0, degree_bound + 1).removeO()
    poly = sympy.Poly(sympy.expand(series.subs(t, 1)), *variables)
    out = {}
    for monom, coeff in poly.terms():
        q = sympy.Rational(coeff)
        out[tuple(int(k) for k in monom)] = Fraction(int(q.p), int(q.q))
    return out


def symbols(n, prefix="X"):
    return sympy.symbols(f"{prefix}1:{n + 1}")
