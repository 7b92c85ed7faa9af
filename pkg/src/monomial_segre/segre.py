"""The two Segre-class pipelines and the identity checks tying them together.

Pipeline one integrates over the Newton region through a placing
triangulation; pipeline two principalizes the ideal by a blow-up tower,
applies the divisor closed form D/(1+D) at the top, and pushes the class
back down.  Both return series over the base divisor variables and must
agree termwise.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from . import chow
from .chow import ChowClass, LevelRing, base_ring, pushforward, reduce_nils
from .principalize import (DEFAULT_CAP, DEFAULT_STRATEGY, TowerTrace, admissible_pairs,
                           principalize as run_principalize)
from .errors import MonomialSegreError, TowerDivergenceError
from .lattice import (ExponentVector, MonomialPresentation, residual_split,
                      support_cover_check)
from .polytope import (HalfSimplex, Triangulation, alpha, classify_blowup_cells,
                       complement_configuration, hvol, lift_to_H, link_cells,
                       placement_order, placing_triangulation)
from .series import LinearForm, TruncatedSeries, reciprocal_one_plus, tensor_line

ORIGIN_LABEL = "O"


def default_degree_bound(n: int) -> int:
    return n + 3


def simplex_contribution(t: HalfSimplex, degree_bound: int) -> TruncatedSeries:
    """hvol(t) * prod of X_j over bounded directions, divided by (1 + v.X) for
    every finite vertex; zero for degenerate simplices."""
    volume = hvol(t)
    n = t.dim
    if volume == 0:
        return TruncatedSeries.zero(n, degree_bound)
    numerator = tuple(0 if d in t.infinite_directions else 1 for d in range(n))
    result = TruncatedSeries.monomial(numerator, n, degree_bound,
                                      coefficient=volume)
    for v in t.finite_vertices:
        result = result * reciprocal_one_plus(
            LinearForm.of(1, v), degree_bound)
    return result


@dataclass(frozen=True)
class SimplexTerm:
    simplex: HalfSimplex
    series: TruncatedSeries
    support: frozenset[int]  # bounded directions of the simplex


@dataclass(frozen=True)
class SegreResult:
    series: TruncatedSeries
    per_simplex: tuple[SimplexTerm, ...]          # cells covering the Newton region
    complement_terms: tuple[SimplexTerm, ...]     # cells covering its convex complement
    pipeline: str
    trace: TowerTrace | None = None


def _terms_for(cells, degree_bound: int) -> tuple[SimplexTerm, ...]:
    out = []
    for cell in cells:
        series = simplex_contribution(cell, degree_bound)
        bounded = frozenset(d for d in range(cell.dim)
                            if d not in cell.infinite_directions)
        out.append(SimplexTerm(cell, series, bounded))
    return tuple(out)


def orthant_triangulation(p: MonomialPresentation,
                          order_preset: str = "default") -> Triangulation:
    """Triangulate the whole positive orthant: place the complement
    configuration, then the origin last.  Cells avoiding the origin cover the
    convex complement; cells through the origin cover the Newton region."""
    config = complement_configuration(p)
    extended = config.with_point(ORIGIN_LABEL, (0,) * p.num_vars)
    order = placement_order(config, order_preset) + [ORIGIN_LABEL]
    return placing_triangulation(extended, order=order)


def split_cells(t: Triangulation):
    complement = tuple(c for c in t.cells if ORIGIN_LABEL not in c.provenance)
    newton = tuple(c for c in t.cells if ORIGIN_LABEL in c.provenance)
    return complement, newton


def segre_integral(p: MonomialPresentation, degree_bound: int | None = None,
                   order_preset: str = "default",
                   ring: LevelRing | None = None) -> SegreResult:
    """Newton-region integral pipeline: 1 minus the complement contributions."""
    n = p.num_vars
    if degree_bound is None:
        degree_bound = default_degree_bound(n)
    tri = orthant_triangulation(p, order_preset)
    complement, newton = split_cells(tri)
    comp_terms = _terms_for(complement, degree_bound)
    newton_terms = _terms_for(newton, degree_bound)
    series = TruncatedSeries.one(n, degree_bound)
    for term in comp_terms:
        series = series - term.series
    if ring is not None:
        series = reduce_nils(ring, series)
    return SegreResult(series, newton_terms, comp_terms, pipeline="integral")


def _divisor_segre_reduced(top: LevelRing, d, degree_bound: int):
    """D/(1+D) on the top ring with empty-stratum terms dropped as we go.

    Expanding 1/(1+D) outright is hopeless high in a tower (a dense linear
    form in dozens of variables), but almost every monomial of D^k sits on
    an empty stratum, so reducing after each multiplication keeps the
    intermediate series small.  Dropping a factor with empty support is
    exact: any product containing it is supported on a superset."""
    nv = top.num_vars
    lin = TruncatedSeries(nv, degree_bound,
                          {tuple(1 if k == m else 0 for k in range(nv)): Fraction(c)
                           for m, c in enumerate(d) if c})
    power = reduce_nils(top, lin)
    total = power
    sign = 1
    for _ in range(2, degree_bound + 1):
        power = reduce_nils(top, power * lin)
        sign = -sign
        total = total + (power if sign > 0 else -power)
    return total


def segre_tower(p: MonomialPresentation, degree_bound: int | None = None,
                strategy: str = DEFAULT_STRATEGY, ring: LevelRing | None = None,
                cap: int = DEFAULT_CAP) -> SegreResult:
    """Blow-up tower pipeline: principalize, apply D/(1+D) at the top, push
    the class back down level by level."""
    n = p.num_vars
    if degree_bound is None:
        degree_bound = default_degree_bound(n)
    if ring is None:
        ring = base_ring(n, p.variable_labels)
    trace = run_principalize(ring, p, strategy=strategy, cap=cap)
    top = trace.top_ring
    d = trace.terminal_divisor
    c = ChowClass(top, _divisor_segre_reduced(top, d, degree_bound))
    for step in reversed(trace.steps):
        c = reduce_nils(step.lower, pushforward(step, c))
    return SegreResult(c.series, (), (), pipeline="tower", trace=trace)


# -- identity checks ---------------------------------------------------------


def _first_difference(a: TruncatedSeries, b: TruncatedSeries):
    diff = a - b
    if diff.is_zero():
        return None
    return diff.sorted_terms()[0]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


@dataclass(frozen=True)
class ResidualReport:
    status: str  # "equal", "skipped", or "mismatch"
    lhs: TruncatedSeries | None = None
    rhs: TruncatedSeries | None = None
    first_difference: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.status in ("equal", "skipped")


def residual_identity_check(p: MonomialPresentation,
                            degree_bound: int | None = None) -> ResidualReport:
    """Check the residual formula: the full integral equals
    D/(1+D) + (1/(1+D)) (residual integral twisted by O(D))."""
    n = p.num_vars
    if degree_bound is None:
        degree_bound = default_degree_bound(n)
    d, residual = residual_split(p)
    if all(a == 0 for a in d):
        return ResidualReport("skipped")
    lhs = segre_integral(p, degree_bound).series
    d_form = LinearForm.of(1, d)
    inv = reciprocal_one_plus(d_form, degree_bound)
    d_series = TruncatedSeries.one(n, degree_bound) - inv
    residual_integral = segre_integral(residual, degree_bound).series
    twisted = tensor_line(residual_integral, LinearForm.of(0, d))
    rhs = d_series + inv * twisted
    diff = _first_difference(lhs, rhs)
    if diff is None:
        return ResidualReport("equal", lhs, rhs)
    return ResidualReport("mismatch", lhs, rhs, diff)


@dataclass(frozen=True)
class BlowupReport:
    ok: bool
    failures: tuple[str, ...]
    classification_sizes: tuple[int, int, int, int]
    lifted_total: TruncatedSeries | None = None
    base_total: TruncatedSeries | None = None


def blowup_invariance_check(p: MonomialPresentation, i: int, j: int,
                            degree_bound: int | None = None) -> BlowupReport:
    """Verify that the lifted integral pushes forward to the base integral,
    cell by cell: the U0 and U'' contributions die, the U' and U1
    contributions land on their alpha images.  i, j are 0-based base
    directions."""
    n = p.num_vars
    if degree_bound is None:
        degree_bound = default_degree_bound(n)
    ring = base_ring(n, p.variable_labels)
    step = chow.blow_up(ring, p.variable_labels[i], p.variable_labels[j])

    config = complement_configuration(p)
    lifted = lift_to_H(config, i, j)
    tri_hat = placing_triangulation(lifted, preset="blowup")
    parts = classify_blowup_cells(tri_hat)
    centers = lifted.lift_centers

    failures = []

    # the alpha images must be exactly the links of the a0 ray
    links = {c.key() for c in link_cells(tri_hat)}
    images = {}
    for cell in parts.Uprime + parts.U1:
        img = alpha(cell, parts, centers)
        images[cell.key()] = img
    image_keys = {img.key() for img in images.values()}
    if image_keys != links or len(images) != len(parts.Uprime) + len(parts.U1):
        failures.append("alpha is not a bijection onto the base cells")

    zero = TruncatedSeries.zero(n, degree_bound)
    lifted_sum = TruncatedSeries.zero(n + 1, degree_bound)
    for cell in parts.U0 + parts.Udoubleprime:
        contribution = simplex_contribution(cell, degree_bound)
        lifted_sum = lifted_sum + contribution
        pushed = pushforward(step, ChowClass(step.upper, contribution)).series
        if pushed != zero:
            failures.append(
                f"U0/U'' cell {cell.provenance} does not push to zero")
    base_sum = TruncatedSeries.zero(n, degree_bound)
    for cell in parts.Uprime + parts.U1:
        contribution = simplex_contribution(cell, degree_bound)
        lifted_sum = lifted_sum + contribution
        pushed = pushforward(step, ChowClass(step.upper, contribution)).series
        target = simplex_contribution(images[cell.key()], degree_bound)
        base_sum = base_sum + target
        if pushed != target:
            failures.append(
                f"U'/U1 cell {cell.provenance} does not push to its alpha image")

    # totals: push-forward of the lifted integral equals the base integral
    lifted_integral = TruncatedSeries.one(n + 1, degree_bound) - lifted_sum
    pushed_total = pushforward(step, ChowClass(step.upper, lifted_integral)).series
    base_integral = segre_integral(p, degree_bound).series
    if pushed_total != base_integral:
        failures.append("total push-forward does not match the base integral")
    if (TruncatedSeries.one(n, degree_bound) - base_sum) != base_integral:
        failures.append("link triangulation total differs from the base integral")

    sizes = (len(parts.U0), len(parts.U1), len(parts.Uprime),
             len(parts.Udoubleprime))
    return BlowupReport(not failures, tuple(failures), sizes,
                        lifted_total=pushed_total, base_total=base_integral)


@dataclass(frozen=True)
class VerifyReport:
    presentation: MonomialPresentation
    checks: tuple[CheckResult, ...]
    diverged: bool = False

    @property
    def ok(self) -> bool:
        return not self.diverged and all(c.passed for c in self.checks)


def verify(p: MonomialPresentation, degree_bound: int | None = None,
           strategy: str = DEFAULT_STRATEGY, nil_pairs=(),
           order_presets=("default", "rays_first"),
           include_blowup_checks: bool = True,
           cap: int = DEFAULT_CAP) -> VerifyReport:
    """Run every identity check on one presentation and aggregate a report."""
    n = p.num_vars
    if degree_bound is None:
        degree_bound = default_degree_bound(n)
    ring = base_ring(n, p.variable_labels, nil_pairs)
    checks: list[CheckResult] = []
    diverged = False

    def run(name, fn):
        start = time.perf_counter()
        try:
            passed, detail = fn()
        except TowerDivergenceError as exc:
            nonlocal diverged
            diverged = True
            passed, detail = False, f"tower divergence: {exc}"
        checks.append(CheckResult(name, passed, detail,
                                  time.perf_counter() - start))

    integral = segre_integral(p, degree_bound, ring=ring)

    def pipelines():
        tower = segre_tower(p, degree_bound, strategy=strategy, ring=ring,
                            cap=cap)
        diff = _first_difference(integral.series, tower.series)
        if diff is None:
            return True, f"tower depth {len(tower.trace.steps)}"
        return False, f"first differing term {diff}"
    run("pipeline_equality", pipelines)

    def residual():
        report = residual_identity_check(p, degree_bound)
        return report.ok, report.status
    run("residual_identity", residual)

    def integrality():
        return integral.series.is_integral(), ""
    run("integer_coefficients", integrality)

    def orthant():
        total = TruncatedSeries.one(n, degree_bound)
        acc = TruncatedSeries.zero(n, degree_bound)
        for term in integral.per_simplex + integral.complement_terms:
            acc = acc + term.series
        if acc != total:
            return False, "orthant contributions do not sum to 1"
        return True, ""
    run("orthant_normalization", orthant)

    def order_independence():
        for preset in order_presets:
            other = segre_integral(p, degree_bound, order_preset=preset,
                                   ring=ring)
            if other.series != integral.series:
                return False, f"preset {preset} disagrees"
        return True, ""
    run("order_independence", order_independence)

    def supports():
        for term in integral.per_simplex:
            if term.series.is_zero():
                continue
            if not support_cover_check(p, term.support):
                return False, f"cell {term.simplex.provenance} fails the cover check"
        for e in integral.series.terms:
            if not support_cover_check(p, support_of_exponent(e)):
                return False, f"term {e} is not supported on the scheme"
        if chow.scheme_is_empty(ring, with_ring_labels(p, ring)) \
                and not integral.series.is_zero():
            return False, "empty scheme with nonzero class"
        return True, ""
    run("support_property", supports)

    if include_blowup_checks:
        for (bi, bj) in admissible_base_pairs(ring, p):
            def blowup(bi=bi, bj=bj):
                report = blowup_invariance_check(p, bi, bj, degree_bound)
                detail = "; ".join(report.failures)
                return report.ok, detail
            run(f"blowup_invariance_{bi + 1}_{bj + 1}", blowup)

    return VerifyReport(p, tuple(checks), diverged)


def support_of_exponent(e: ExponentVector) -> frozenset[int]:
    return frozenset(i for i, a in enumerate(e) if a > 0)


def with_ring_labels(p: MonomialPresentation, ring: LevelRing) -> MonomialPresentation:
    if p.variable_labels == ring.variables:
        return p
    return MonomialPresentation(p.num_vars, p.generators, ring.variables)


def admissible_base_pairs(ring: LevelRing, p: MonomialPresentation):
    return list(dict.fromkeys(admissible_pairs(ring, with_ring_labels(p, ring))))
