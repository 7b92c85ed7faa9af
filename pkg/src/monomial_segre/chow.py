"""Formal intersection-ring model of a simple-normal-crossings divisor
configuration, with codimension-2 blow-ups, pull-back, and push-forward.

Push-forward works by normal form: rewrite every proper transform through
Y~ = p*Y - E at the two center variables, reduce powers of E with the
quadratic relation E^2 = E p*(Y_i + Y_j) - p*(Y_i Y_j), then read off the
E-free part.  The Y~ = p*Y identification holds at the non-center variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable

from .errors import (DimensionMismatchError, EmptyCenterError,
                     LevelMismatchError, MonomialSegreError)
from .lattice import (ExponentVector, MonomialPresentation, residual_split,
                      support)
from .series import TruncatedSeries

NilPair = frozenset[str]


@dataclass(frozen=True)
class LevelRing:
    """Named divisor variables with tracked empty intersection strata.

    empty_strata lists every variable subset of size 2..ambient_dim whose
    divisors have empty common intersection.  It is upward closed within that
    size range; sets larger than the ambient dimension are always empty (a
    generic normal-crossings configuration has no deeper strata) and are not
    stored.  Pairwise tracking alone is not enough: a blow-up can create
    three divisors that meet pairwise but share no point, and missing that
    makes the divisor test chase a phantom residual forever."""

    ambient_dim: int
    variables: tuple[str, ...]
    empty_strata: frozenset[frozenset[str]] = frozenset()
    depth: int = 0

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        strata = frozenset(frozenset(s) for s in self.empty_strata)
        object.__setattr__(self, "empty_strata", strata)
        if self.ambient_dim < 1:
            raise MonomialSegreError("ambient_dim must be positive")
        if len(set(self.variables)) != len(self.variables):
            raise MonomialSegreError("variable labels must be unique")
        for s in strata:
            if not 2 <= len(s) <= self.ambient_dim:
                raise MonomialSegreError(
                    f"stratum {set(s)} has size outside 2..{self.ambient_dim}")
            if not s <= set(self.variables):
                raise MonomialSegreError(f"stratum {set(s)} uses unknown labels")

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def nil_pairs(self) -> frozenset[NilPair]:
        return frozenset(s for s in self.empty_strata if len(s) == 2)

    def index(self, label: str) -> int:
        try:
            return self.variables.index(label)
        except ValueError:
            raise MonomialSegreError(f"unknown variable {label!r}") from None

    def stratum_is_empty(self, labels: Iterable[str]) -> bool:
        s = frozenset(labels)
        if len(s) > self.ambient_dim:
            return True
        return s in self.empty_strata

    def nil_index_pairs(self) -> list[tuple[int, int]]:
        out = []
        for pair in self.nil_pairs:
            a, b = sorted(self.index(lab) for lab in pair)
            out.append((a, b))
        return sorted(out)


@dataclass(frozen=True)
class _BlownUpRing(LevelRing):
    """Ring one level above a blow-up, with lazy stratum emptiness.

    Towers get deep and wide (dozens of variables near the top), so listing
    every empty subset eagerly is wasteful; instead each query is answered
    from the level below and memoized.  The rules match the eager story:
    the proper transforms of the two center divisors are disjoint, any
    other stratum survives iff its image below is nonempty, and a stratum
    through E lies over the image cut down to the center."""

    lower: LevelRing = None
    center: tuple[str, str] = ("", "")
    exceptional: str = ""

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "_cache", {})

    def stratum_is_empty(self, labels: Iterable[str]) -> bool:
        s = frozenset(labels)
        if len(s) > self.ambient_dim:
            return True
        if len(s) < 2:
            return False
        cached = self._cache.get(s)
        if cached is None:
            cached = self._compute(s)
            self._cache[s] = cached
        return cached

    def _compute(self, s: frozenset[str]) -> bool:
        i, j = self.center
        ti, tj = "~" + i, "~" + j

        def back(lab: str) -> str:
            return lab[1:] if lab in (ti, tj) else lab

        if self.exceptional in s:
            low = {back(lab) for lab in s - {self.exceptional}}
            return ({i, j} <= low) or self.lower.stratum_is_empty(low | {i, j})
        low = {back(lab) for lab in s}
        return ({i, j} <= low) or self.lower.stratum_is_empty(low)

    @property
    def nil_pairs(self) -> frozenset[NilPair]:
        return frozenset(frozenset(pair)
                         for pair in combinations(self.variables, 2)
                         if self.stratum_is_empty(pair))


def _close_upward(n: int, variables: tuple[str, ...],
                  seeds: set[frozenset[str]]) -> frozenset[frozenset[str]]:
    """All variable subsets of size <= n containing some seed set."""
    out: set[frozenset[str]] = set()
    for size in range(2, n + 1):
        for combo in combinations(variables, size):
            cs = frozenset(combo)
            if any(seed <= cs for seed in seeds):
                out.add(cs)
    return frozenset(out)


def base_ring(n: int, labels: Iterable[str] | None = None,
              nil_pairs: Iterable[Iterable[str]] = ()) -> LevelRing:
    labels = tuple(labels) if labels else tuple(f"X{i + 1}" for i in range(n))
    seeds = {frozenset(p) for p in nil_pairs}
    for s in seeds:
        if len(s) != 2:
            raise MonomialSegreError(f"nil pair {set(s)} is not a pair")
    return LevelRing(n, labels, _close_upward(n, labels, seeds))


@dataclass(frozen=True)
class ChowClass:
    ring: LevelRing
    series: TruncatedSeries

    def __post_init__(self):
        if self.series.num_vars != self.ring.num_vars:
            raise LevelMismatchError(
                f"series in {self.series.num_vars} variables on a ring with "
                f"{self.ring.num_vars}")


@dataclass(frozen=True)
class BlowupStep:
    lower: LevelRing
    upper: LevelRing
    center: tuple[str, str]
    exceptional_label: str

    def center_positions(self) -> tuple[int, int]:
        i, j = self.center
        return self.lower.index(i), self.lower.index(j)


def blow_up(r: LevelRing, i: str, j: str) -> BlowupStep:
    """Blow up along the intersection of divisors i and j."""
    if i == j:
        raise MonomialSegreError("center labels must differ")
    r.index(i), r.index(j)  # validate labels
    if r.stratum_is_empty({i, j}):
        raise EmptyCenterError(f"center ({i}, {j}) is a known-empty intersection")
    exceptional = f"E{r.depth + 1}"

    def transform(lab: str) -> str:
        return "~" + lab if lab in (i, j) else lab

    upper_vars = (exceptional,) + tuple(transform(v) for v in r.variables)
    upper = _BlownUpRing(r.ambient_dim, upper_vars, frozenset(),
                         depth=r.depth + 1, lower=r, center=(i, j),
                         exceptional=exceptional)
    return BlowupStep(lower=r, upper=upper, center=(i, j),
                      exceptional_label=exceptional)


def pullback_generators(step: BlowupStep,
                        p: MonomialPresentation) -> MonomialPresentation:
    """Total transform of each monomial: the E-entry is the sum of the two
    center entries."""
    if p.variable_labels != step.lower.variables:
        raise LevelMismatchError("presentation is not over the lower ring")
    pi, pj = step.center_positions()
    gens = tuple((g[pi] + g[pj],) + g for g in p.generators)
    return MonomialPresentation(p.num_vars + 1, gens, step.upper.variables)


def pullback_class(step: BlowupStep, c: ChowClass) -> ChowClass:
    """p* on classes: center variables map to transform + E, others to their
    transform."""
    if c.ring is not step.lower and c.ring != step.lower:
        raise LevelMismatchError("class is not on the lower ring")
    pi, pj = step.center_positions()
    bound = c.series.degree_bound
    lifted = TruncatedSeries._raw(step.upper.num_vars, bound,
                                  {(0,) + e: v for e, v in c.series.terms.items()})
    return ChowClass(step.upper, _center_substitute(lifted, pi, pj, sign=1))


def _center_substitute(series: TruncatedSeries, pi: int, pj: int,
                       sign: int) -> TruncatedSeries:
    """Substitute Y~_center -> p*Y + sign*E in the working layout
    (E, Y_1, ..., Y_n); all other variables map to themselves.

    Only two variables have nontrivial images, so each term expands into a
    small binomial sum; this avoids generic series substitution, which is
    painfully slow high in a tower."""
    bound = series.degree_bound
    out: dict[tuple[int, ...], Fraction] = {}
    for e, c in series.terms.items():
        ai, aj = e[pi + 1], e[pj + 1]
        for r1 in range(ai + 1):
            for r2 in range(aj + 1):
                coeff = c * comb(ai, r1) * comb(aj, r2)
                if sign < 0 and (r1 + r2) % 2:
                    coeff = -coeff
                t = list(e)
                t[0] = e[0] + r1 + r2
                t[pi + 1] = ai - r1
                t[pj + 1] = aj - r2
                tt = tuple(t)  # total degree is unchanged
                v = out.get(tt)
                out[tt] = coeff if v is None else v + coeff
    return TruncatedSeries._raw(series.num_vars, bound,
                                {e: v for e, v in out.items() if v})


def _reduce_exceptional(series: TruncatedSeries, pi: int, pj: int) -> TruncatedSeries:
    """Rewrite E^k (k >= 2) with E^2 = E(Y_i + Y_j) - Y_i Y_j, in the working
    layout (E, p*Y_1, ..., p*Y_n)."""
    nv = series.num_vars
    bound = series.degree_bound
    out: dict[tuple[int, ...], Fraction] = {}
    work = list(series.terms.items())
    while work:
        e, c = work.pop()
        if e[0] < 2:
            out[e] = out.get(e, Fraction(0)) + c
            continue
        base = list(e)
        base[0] -= 2
        for target, coeff in (((pi + 1,), 1), ((pj + 1,), 1),
                              ((pi + 1, pj + 1), -1)):
            t = list(base)
            if len(target) == 1:
                t[0] += 1
            for pos in target:
                t[pos] += 1
            work.append((tuple(t), c * coeff))
    return TruncatedSeries(nv, bound, out)


def pushforward(step: BlowupStep, c: ChowClass) -> ChowClass:
    """Proper push-forward of a class on the upper ring down one level."""
    if c.ring != step.upper:
        raise LevelMismatchError("class is not on the upper ring")
    pi, pj = step.center_positions()
    bound = c.series.degree_bound
    # substitute E -> E, Y~_center -> p*Y - E, Y~_other -> p*Y
    working = _center_substitute(c.series, pi, pj, sign=-1)
    reduced = _reduce_exceptional(working, pi, pj)
    # keep the E-free part: p_*(A + B E) = A
    terms = {e[1:]: v for e, v in reduced.terms.items() if e[0] == 0}
    return ChowClass(step.lower,
                     TruncatedSeries(step.lower.num_vars, bound, terms))


def reduce_nils(r: LevelRing, c: ChowClass | TruncatedSeries):
    """Delete every term supported on a known-empty stratum."""
    series = c.series if isinstance(c, ChowClass) else c
    if series.num_vars != r.num_vars:
        raise LevelMismatchError("series does not match the ring")
    labels = r.variables
    terms = {}
    for e, v in series.terms.items():
        supp = frozenset(labels[k] for k, a in enumerate(e) if a > 0)
        if len(supp) >= 2 and r.stratum_is_empty(supp):
            continue
        terms[e] = v
    out = TruncatedSeries(r.num_vars, series.degree_bound, terms)
    return ChowClass(r, out) if isinstance(c, ChowClass) else out


def scheme_is_empty(r: LevelRing, p: MonomialPresentation) -> bool:
    """True when no transversal variable set (a nonempty stratum) meets the
    support of every generator.

    A point of the scheme would lie on one component of each generating
    divisor; collecting those components gives a variable set with nonempty
    joint intersection that hits every support.  Conversely such a set
    certifies a point of the scheme."""
    if p.variable_labels != r.variables:
        raise LevelMismatchError("presentation is not over this ring")
    if any(all(a == 0 for a in g) for g in p.generators):
        return True  # unit ideal
    supports = [support(g) for g in p.generators]
    indices = range(r.num_vars)
    for size in range(1, r.ambient_dim + 1):
        for cand in combinations(indices, size):
            cs = set(cand)
            if r.stratum_is_empty(frozenset(r.variables[k] for k in cand)):
                continue
            if all(s & cs for s in supports):
                return False
    return True


def scheme_is_divisor(r: LevelRing,
                      p: MonomialPresentation) -> ExponentVector | None:
    """The common-factor divisor when the residual scheme is empty, else None."""
    d, residual = residual_split(p)
    if scheme_is_empty(r, residual):
        return d
    return None
