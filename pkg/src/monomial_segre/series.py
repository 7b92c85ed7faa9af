"""Truncated multivariate power series over exact rationals.

Coefficients are `fractions.Fraction`; exponent tuples are the sparse term
keys.  All arithmetic truncates at a total-degree bound, and binary
operations inherit the minimum of the operand bounds.  Output ordering is
graded lexicographic throughout, so printed and serialized forms are stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DimensionMismatchError, MonomialSegreError

Exponent = tuple[int, ...]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class TruncatedSeries:
    """A polynomial truncation of a power series in ``num_vars`` variables."""

    __slots__ = ("num_vars", "degree_bound", "terms")

    def __init__(self, num_vars: int, degree_bound: int,
                 terms: Mapping[Exponent, Fraction] | None = None):
        if num_vars < 0:
            raise MonomialSegreError("num_vars must be nonnegative")
        if degree_bound < 0:
            raise MonomialSegreError("degree_bound must be nonnegative")
        self.num_vars = num_vars
        self.degree_bound = degree_bound
        clean: dict[Exponent, Fraction] = {}
        if terms:
            for e, c in terms.items():
                if len(e) != num_vars:
                    raise DimensionMismatchError(
                        f"exponent {e} has length {len(e)}, expected {num_vars}")
                if sum(e) > degree_bound:
                    continue
                c = _as_fraction(c)
                if c != 0:
                    clean[tuple(e)] = c
        self.terms = clean

    # -- constructors -----------------------------------------------------

    @classmethod
    def _raw(cls, num_vars: int, degree_bound: int,
             terms: dict[Exponent, Fraction]) -> "TruncatedSeries":
        """Trusted constructor: terms must already be clean (right arity,
        within the bound, no zero coefficients).  Internal fast path."""
        s = cls.__new__(cls)
        s.num_vars = num_vars
        s.degree_bound = degree_bound
        s.terms = terms
        return s

    @classmethod
    def zero(cls, num_vars: int, degree_bound: int) -> "TruncatedSeries":
        return cls(num_vars, degree_bound)

    @classmethod
    def one(cls, num_vars: int, degree_bound: int) -> "TruncatedSeries":
        return cls.constant(1, num_vars, degree_bound)

    @classmethod
    def constant(cls, c, num_vars: int, degree_bound: int) -> "TruncatedSeries":
        return cls(num_vars, degree_bound, {(0,) * num_vars: _as_fraction(c)})

    @classmethod
    def monomial(cls, exponent: Iterable[int], num_vars: int, degree_bound: int,
                 coefficient=1) -> "TruncatedSeries":
        return cls(num_vars, degree_bound, {tuple(exponent): _as_fraction(coefficient)})

    @classmethod
    def variable(cls, index: int, num_vars: int, degree_bound: int) -> "TruncatedSeries":
        e = [0] * num_vars
        e[index] = 1
        return cls.monomial(e, num_vars, degree_bound)

    # -- basic queries ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.num_vars, Fraction(0))

    def coefficient(self, exponent: Iterable[int]) -> Fraction:
        return self.terms.get(tuple(exponent), Fraction(0))

    def is_integral(self) -> bool:
        """True when every stored coefficient is an integer."""
        return all(c.denominator == 1 for c in self.terms.values())

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in graded lexicographic order."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    # -- arithmetic -------------------------------------------------------

    def _check_vars(self, other: "TruncatedSeries"):
        if self.num_vars != other.num_vars:
            raise DimensionMismatchError(
                f"variable counts differ: {self.num_vars} vs {other.num_vars}")

    def truncate(self, degree_bound: int) -> "TruncatedSeries":
        return TruncatedSeries(self.num_vars, degree_bound, self.terms)

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(other, self.num_vars, self.degree_bound)
        self._check_vars(other)
        bound = min(self.degree_bound, other.degree_bound)
        if bound == self.degree_bound:
            terms = dict(self.terms)
        else:
            terms = {e: c for e, c in self.terms.items() if sum(e) <= bound}
        for e, c in other.terms.items():
            if bound != other.degree_bound and sum(e) > bound:
                continue
            v = terms.get(e)
            if v is None:
                terms[e] = c
            else:
                v = v + c
                if v:
                    terms[e] = v
                else:
                    del terms[e]
        return TruncatedSeries._raw(self.num_vars, bound, terms)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries._raw(self.num_vars, self.degree_bound,
                                    {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(other, self.num_vars, self.degree_bound)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            c = _as_fraction(other)
            if c == 0:
                return TruncatedSeries._raw(self.num_vars, self.degree_bound, {})
            return TruncatedSeries._raw(self.num_vars, self.degree_bound,
                                        {e: c * v for e, v in self.terms.items()})
        self._check_vars(other)
        bound = min(self.degree_bound, other.degree_bound)
        terms: dict[Exponent, Fraction] = {}
        graded = [(e2, sum(e2), c2) for e2, c2 in other.terms.items()]
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, d2, c2 in graded:
                if d1 + d2 > bound:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                v = terms.get(e)
                terms[e] = c1 * c2 if v is None else v + c1 * c2
        return TruncatedSeries._raw(self.num_vars, bound,
                                    {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise MonomialSegreError("negative powers are not defined")
        result = TruncatedSeries.one(self.num_vars, self.degree_bound)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.num_vars == other.num_vars and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.num_vars, frozenset(self.terms.items())))

    def substitute(self, images: list["TruncatedSeries"]) -> "TruncatedSeries":
        """Replace variable i by images[i]; images share a common variable layout."""
        if len(images) != self.num_vars:
            raise DimensionMismatchError("one image per variable is required")
        if not images:
            return self
        nv = images[0].num_vars
        bound = min([self.degree_bound] + [im.degree_bound for im in images])
        cache: dict[tuple[int, int], TruncatedSeries] = {}

        def power(i: int, k: int) -> TruncatedSeries:
            key = (i, k)
            if key not in cache:
                cache[key] = images[i] ** k
            return cache[key]

        acc: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            term = TruncatedSeries.one(nv, bound)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            for ee, cc in term.terms.items():
                v = acc.get(ee)
                acc[ee] = c * cc if v is None else v + c * cc
        out = TruncatedSeries._raw(nv, bound,
                                   {e: c for e, c in acc.items() if c})
        return out

    # -- display ----------------------------------------------------------

    def render(self, labels: Iterable[str] | None = None) -> str:
        if labels is None:
            labels = [f"X{i + 1}" for i in range(self.num_vars)]
        else:
            labels = list(labels)
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for lab, k in zip(labels, e):
                if k == 1:
                    factors.append(lab)
                elif k > 1:
                    factors.append(f"{lab}^{k}")
            mono = "*".join(factors)
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        head_sign, head = parts[0]
        text = (("-" if head_sign == "-" else "") + head)
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"TruncatedSeries({self.render()!r}, D_max={self.degree_bound})"


@dataclass(frozen=True)
class LinearForm:
    """constant + sum(coefficients[i] * X_i)."""

    constant: Fraction
    coefficients: tuple[Fraction, ...]

    @classmethod
    def of(cls, constant, coefficients: Iterable) -> "LinearForm":
        return cls(_as_fraction(constant),
                   tuple(_as_fraction(c) for c in coefficients))

    @property
    def num_vars(self) -> int:
        return len(self.coefficients)

    def is_constant_free(self) -> bool:
        return self.constant == 0

    def linear_part(self, degree_bound: int) -> TruncatedSeries:
        n = self.num_vars
        terms = {}
        for i, c in enumerate(self.coefficients):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        return TruncatedSeries(n, degree_bound, terms)

    def as_series(self, degree_bound: int) -> TruncatedSeries:
        s = self.linear_part(degree_bound)
        return s + TruncatedSeries.constant(self.constant, self.num_vars, degree_bound)


def reciprocal_one_plus(f: LinearForm, degree_bound: int) -> TruncatedSeries:
    """Expand 1/f for a linear form f with constant term 1 (geometric series)."""
    if f.constant != 1:
        raise MonomialSegreError(
            f"reciprocal expansion needs constant term 1, got {f.constant}")
    g = f.linear_part(degree_bound)
    acc = TruncatedSeries.one(f.num_vars, degree_bound)
    power = acc
    for _ in range(degree_bound):
        power = power * (-g)
        if power.is_zero():
            break
        acc = acc + power
    return acc


def graded_piece(c: TruncatedSeries, p: int) -> TruncatedSeries:
    """The total-degree-p homogeneous part of c."""
    return TruncatedSeries(c.num_vars, c.degree_bound,
                           {e: v for e, v in c.terms.items() if sum(e) == p})


def tensor_line(c: TruncatedSeries, line: LinearForm) -> TruncatedSeries:
    """Twist by a line class L: the degree-p piece of c is divided by (1+L)^p."""
    if not line.is_constant_free():
        raise MonomialSegreError("the twisting form must have zero constant term")
    if line.num_vars != c.num_vars:
        raise DimensionMismatchError("twisting form has the wrong variable count")
    bound = c.degree_bound
    inv = reciprocal_one_plus(LinearForm(Fraction(1), line.coefficients), bound)
    out = TruncatedSeries.zero(c.num_vars, bound)
    inv_power = TruncatedSeries.one(c.num_vars, bound)
    for p in range(bound + 1):
        piece = graded_piece(c, p)
        if not piece.is_zero():
            out = out + piece * inv_power
        inv_power = inv_power * inv
    return out
