"""Drive a tower of codimension-2 blow-ups until the transformed monomial
scheme is a divisor.

Centers are chosen among variable pairs witnessing incomparability of two
generators; termination is empirical (a cap turns runaway towers into a
reported error carrying the partial trace)."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .chow import (BlowupStep, LevelRing, blow_up, pullback_generators,
                   scheme_is_divisor)
from .errors import MonomialSegreError, NoAdmissibleCenterError, TowerDivergenceError
from .lattice import ExponentVector, MonomialPresentation, residual_split, support

STRATEGIES = ("lex", "max_drop", "euclid")

DEFAULT_STRATEGY = "euclid"

DEFAULT_CAP = 200


@dataclass(frozen=True)
class TowerTrace:
    levels: tuple[tuple[LevelRing, MonomialPresentation], ...]
    steps: tuple[BlowupStep, ...]
    terminal_divisor: ExponentVector
    strategy_name: str
    iterations_used: int

    @property
    def top_ring(self) -> LevelRing:
        return self.levels[-1][0]


def admissible_pairs(r: LevelRing, p: MonomialPresentation):
    gens = p.generators
    for i in range(r.num_vars):
        for j in range(i + 1, r.num_vars):
            if r.stratum_is_empty({r.variables[i], r.variables[j]}):
                continue
            for a in range(len(gens)):
                for b in range(a + 1, len(gens)):
                    u, v = gens[a], gens[b]
                    if (u[i] - v[i]) * (u[j] - v[j]) < 0:
                        yield i, j
                        break
                else:
                    continue
                break


def select_center(r: LevelRing, p: MonomialPresentation,
                  strategy: str = "lex") -> tuple[int, int] | None:
    """Pick a non-nil variable pair (i, j) with two generators incomparable in
    coordinates (i, j); None when no such pair exists."""
    pairs = list(admissible_pairs(r, p))
    if not pairs:
        return None
    if strategy == "lex":
        return pairs[0]
    if strategy == "max_drop":
        def drop(pair):
            i, j = pair
            total = 0
            gens = p.generators
            for a in range(len(gens)):
                for b in range(a + 1, len(gens)):
                    total += min(abs(gens[a][i] - gens[b][i]),
                                 abs(gens[a][j] - gens[b][j]))
            return total
        best = max(drop(pair) for pair in pairs)
        return next(pair for pair in pairs if drop(pair) == best)
    if strategy == "euclid":
        choice = _euclid_center(r, p)
        if choice is not None:
            return choice
        return pairs[0]
    raise MonomialSegreError(f"unknown strategy {strategy!r}")


def _euclid_center(r: LevelRing, p: MonomialPresentation):
    """Center from the first incomparable generator pair: strip the pairwise
    gcd, then blow up at the largest-exponent slot across the two leftover
    supports.

    Sticking with one generator pair matters.  The exceptional exponents of
    the attacked slot shrink like a run of the Euclidean algorithm, and a
    pair once comparable stays comparable under total transforms, so pairs
    get retired one by one.  Scanning all pairs greedily instead lets each
    new exceptional re-bridge the two supports and the driver orbits."""
    gens = p.generators
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            u, v = gens[a], gens[b]
            if all(x <= y for x, y in zip(u, v)) or \
               all(y <= x for x, y in zip(u, v)):
                continue
            w = [x - min(x, y) for x, y in zip(u, v)]
            z = [y - min(x, y) for x, y in zip(u, v)]
            slots = []
            for i in range(len(w)):
                if w[i] == 0:
                    continue
                for j in range(len(z)):
                    if z[j] == 0:
                        continue
                    if r.stratum_is_empty({r.variables[i], r.variables[j]}):
                        continue
                    slots.append((w[i] + z[j], i, j))
            if not slots:
                continue  # this pair's leftover scheme is already empty
            _, i, j = max(slots, key=lambda s: (s[0], -s[1], -s[2]))
            return (i, j) if i < j else (j, i)
    return None


def principalize(r0: LevelRing, p0: MonomialPresentation,
                 strategy: str = DEFAULT_STRATEGY,
                 cap: int = DEFAULT_CAP) -> TowerTrace:
    """Blow up at selected centers until the total transform is a divisor."""
    if p0.variable_labels != r0.variables:
        p0 = MonomialPresentation(p0.num_vars, p0.generators, r0.variables)
    ring, pres = r0, p0
    levels = [(ring, pres)]
    steps: list[BlowupStep] = []
    for iteration in range(cap + 1):
        d = scheme_is_divisor(ring, pres)
        if d is not None:
            return TowerTrace(tuple(levels), tuple(steps), d, strategy, iteration)
        if iteration == cap:
            break
        center = select_center(ring, pres, strategy)
        if center is None:
            raise NoAdmissibleCenterError(
                "non-divisor presentation admits no incomparability witness; "
                "this indicates a model bug")
        i, j = ring.variables[center[0]], ring.variables[center[1]]
        step = blow_up(ring, i, j)
        pres = pullback_generators(step, pres)
        ring = step.upper
        steps.append(step)
        levels.append((ring, pres))
    partial = TowerTrace(tuple(levels), tuple(steps), (0,) * ring.num_vars,
                         strategy, cap)
    raise TowerDivergenceError(
        f"no divisor reached within {cap} blow-ups", trace=partial)
