"""Numerical exceptional classes, effectiveness rules and ample-cone membership."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Any, Sequence

from . import _linalg as la
from ._enum import all_numexc, blocks_for, numexc_reps_cut, violator_degree_bound
from .lattice import (
    LatticeClass,
    SubLattice,
    canonical_class,
    exceptional,
    hyperplane,
    is_negative_definite,
    pairing,
    reflect,
)
from .pairs import CyclePair, PairClassification, RegimeKind, classify


class StepLimit(RuntimeError):
    pass


class Effectiveness(enum.Enum):
    EFFECTIVE = "Effective"
    NOT_EFFECTIVE = "NotEffective"
    SPAN_OF_D = "SpanOfD"
    UNDECIDED = "Undecided"


class Status(enum.Enum):
    PROVEN = "Proven"
    REFUTED = "Refuted"
    UNDECIDED = "Undecided"


def is_numexc(alpha: LatticeClass) -> bool:
    k = canonical_class(alpha.n)
    return alpha.square() == -1 and pairing(alpha, k) == -1


@dataclass(frozen=True)
class NumExcClass:
    cls: LatticeClass
    effectiveness: Effectiveness

    def __post_init__(self):
        if not is_numexc(self.cls):
            raise ValueError(f"{self.cls} is not numerically exceptional")

    def to_json(self) -> dict[str, Any]:
        return {"class": self.cls.to_json(), "degree": self.cls.degree,
                "effectiveness": self.effectiveness.value}


@dataclass(frozen=True)
class Wall:
    """The hyperplane normal^perp, preferred side x.normal >= 0."""

    normal: LatticeClass

    def __post_init__(self):
        if self.normal.square() >= 0:
            raise ValueError("a wall normal must have negative square")


@dataclass(frozen=True)
class BoundedVerdict:
    status: Status
    certificate: dict[str, Any]
    bound: int
    rule: str | None = None

    def to_json(self) -> dict[str, Any]:
        return {"status": self.status.value, "bound": self.bound, "rule": self.rule,
                "certificate": _jsonable(self.certificate)}


def _jsonable(obj):
    if isinstance(obj, LatticeClass):
        return obj.to_json()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


@dataclass(frozen=True)
class EffectivenessRule:
    """alpha is effective iff alpha.normal >= threshold (span of D excluded if flagged)."""

    name: str
    normal: LatticeClass
    threshold: int
    excludes_span: bool = False

    def decide(self, pair: CyclePair, alpha: LatticeClass) -> Effectiveness:
        if self.excludes_span and in_cycle_span(pair, alpha):
            return Effectiveness.SPAN_OF_D
        if pairing(alpha, self.normal) >= self.threshold:
            return Effectiveness.EFFECTIVE
        return Effectiveness.NOT_EFFECTIVE

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "normal": self.normal.to_json(),
                "threshold": self.threshold, "excludes_span": self.excludes_span}


def in_cycle_span(pair: CyclePair, x: LatticeClass) -> bool:
    return la.in_rational_span([c.coords for c in pair.components], x.coords)


def _primitive(x: Sequence[Fraction]) -> LatticeClass:
    den = la.lcm_denominators(x)
    ints = [int(v * den) for v in x]
    g = reduce(gcd, ints, 0) or 1
    return LatticeClass(tuple(v // g for v in ints))


def lambda_projection_of_h(pair: CyclePair) -> LatticeClass:
    """Primitive positive multiple of the projection of h to the complement of the cycle."""
    comps = pair.components
    idx = la.independent_subset([c.coords for c in comps])
    basis = [comps[i] for i in idx]
    h = hyperplane(pair.n)
    gram = [[pairing(a, b) for b in basis] for a in basis]
    coeffs = la.solve(gram, [pairing(h, b) for b in basis]) if basis else []
    proj = [Fraction(v) for v in h.coords]
    for c, b in zip(coeffs, basis):
        proj = [p - c * bc for p, bc in zip(proj, b.coords)]
    return _primitive(proj)


def _nef_certificate_rule(pair: CyclePair, nef: LatticeClass | None) -> EffectivenessRule | None:
    if nef is not None:
        if pairing(nef, pair.boundary) <= 0:
            raise ValueError("a nef certificate must pair positively with the cycle")
        return EffectivenessRule("nef-certificate", nef, 0)
    if pair.has_plane_marking:
        return EffectivenessRule("nef-certificate", hyperplane(pair.n), 0)
    return None


def effectiveness_rule(pair: CyclePair, nef: LatticeClass | None = None,
                       classification: PairClassification | None = None) -> EffectivenessRule | None:
    """The exact effectiveness test available for the pair, or None.

    `nef` is a caller-supplied nef class with positive degree on the cycle;
    without one, h is used when the marking comes from plane blowups.
    """
    cls = classify(pair) if classification is None else classification
    if cls.regime is RegimeKind.NOT_NEGATIVE_DEFINITE:
        total = pair.boundary
        if all(pairing(total, c) >= 0 for c in pair.components):
            return EffectivenessRule("not-negative-definite:cycle-nef", total, 0)
        for c in pair.components:
            if c.square() >= 0:
                return EffectivenessRule("not-negative-definite:component-nef", c, 0)
    elif cls.regime is RegimeKind.K_SQUARE_MINUS_ONE:
        return EffectivenessRule("light-cone", lambda_projection_of_h(pair), 1)
    elif cls.regime is RegimeKind.DISTINGUISHED:
        return EffectivenessRule("distinguished-point", cls.point, 0, excludes_span=True)
    return _nef_certificate_rule(pair, nef)


def classify_effectiveness(pair: CyclePair, alpha: LatticeClass,
                           regime: PairClassification | None = None,
                           nef: LatticeClass | None = None) -> Effectiveness:
    if not is_numexc(alpha):
        raise ValueError(f"{alpha} is not numerically exceptional")
    if regime is not None and regime != classify(pair):
        raise ValueError("supplied regime does not belong to this pair")
    rule = effectiveness_rule(pair, nef, regime)
    if rule is None:
        return Effectiveness.UNDECIDED
    return rule.decide(pair, alpha)


def enumerate_numexc(pair: CyclePair, bound: int, nef: LatticeClass | None = None) -> list[NumExcClass]:
    rule = effectiveness_rule(pair, nef)
    out = []
    for alpha in all_numexc(pair.n, bound):
        tag = Effectiveness.UNDECIDED if rule is None else rule.decide(pair, alpha)
        out.append(NumExcClass(alpha, tag))
    return out


@dataclass(frozen=True)
class NefClass:
    cls: LatticeClass
    multipliers: tuple[Fraction, ...]
    scale: int


def construct_nef(seed: LatticeClass, config: Sequence[LatticeClass]) -> NefClass:
    """H = N (seed + sum r_i G_i) with H.G_j = 0 for all j."""
    if seed.square() <= 0:
        raise ValueError("the seed must have positive square")
    gram = [[pairing(a, b) for b in config] for a in config]
    if config and not is_negative_definite(gram):
        raise ValueError("configuration is not negative definite")
    rhs = [-pairing(seed, g) for g in config]
    r = la.solve(gram, rhs) if config else []
    if any(v < 0 for v in r):
        raise ValueError("negative multiplier: the seed pairs negatively with the configuration")
    scale = la.lcm_denominators(r)
    coords = [Fraction(c) for c in seed.coords]
    for ri, g in zip(r, config):
        coords = [c + ri * gc for c, gc in zip(coords, g.coords)]
    h = LatticeClass(tuple(int(c * scale) for c in coords))
    assert all(pairing(h, g) == 0 for g in config)
    assert h.square() > 0
    return NefClass(h, tuple(r), scale)


def _search_blocks(pair: CyclePair, rule: EffectivenessRule, extra: Sequence[LatticeClass]):
    funcs = [rule.normal, *extra]
    if rule.excludes_span:
        funcs += list(pair.components)
    return blocks_for(pair.n, funcs)


def find_violator(pair: CyclePair, rule: EffectivenessRule, x: LatticeClass, limit: int,
                  c_max: int = -1) -> tuple[LatticeClass | None, bool]:
    """First effective alpha with alpha.x <= c_max and |degree| <= limit.

    Also reports whether a class of undecided effectiveness was met.
    """
    blocks = _search_blocks(pair, rule, [x])
    undecided = False
    for alpha in numexc_reps_cut(pair.n, limit, blocks, [(rule.normal, rule.threshold), (-x, -c_max)]):
        if rule.excludes_span and in_cycle_span(pair, alpha):
            undecided = True
            continue
        return alpha, undecided
    return None, undecided


def in_generic_ample_cone(pair: CyclePair, x: LatticeClass, bound: int,
                          nef: LatticeClass | None = None) -> BoundedVerdict:
    if x.n != pair.n:
        raise ValueError("class and pair live in different lattices")
    if x.square() <= 0:
        return BoundedVerdict(Status.REFUTED, {"reason": "non-positive square", "square": x.square()}, bound)
    if x.degree <= 0:
        return BoundedVerdict(Status.REFUTED, {"reason": "negative cone", "degree": x.degree}, bound)
    for i, c in enumerate(pair.components):
        if pairing(x, c) < 0:
            return BoundedVerdict(Status.REFUTED, {"reason": "cycle component", "index": i,
                                                   "witness": c, "pairing": pairing(x, c)}, bound)
    rule = effectiveness_rule(pair, nef)
    if rule is None:
        return BoundedVerdict(Status.UNDECIDED, {"reason": "no effectiveness rule"}, bound)
    deg_bound = violator_degree_bound(hyperplane(pair.n), rule.normal, rule.threshold, x, -1)
    limit = bound if deg_bound is None else min(bound, deg_bound)
    alpha, undecided = find_violator(pair, rule, x, limit)
    if alpha is not None:
        return BoundedVerdict(Status.REFUTED, {"reason": "effective exceptional class", "witness": alpha,
                                               "pairing": pairing(x, alpha)}, bound, rule.name)
    if deg_bound is not None and deg_bound <= bound and not undecided:
        return BoundedVerdict(Status.PROVEN, {"degree_bound": deg_bound, "rule": rule.to_json()},
                              bound, rule.name)
    return BoundedVerdict(Status.UNDECIDED, {"degree_bound": deg_bound, "searched": limit}, bound, rule.name)


def in_actual_ample_cone(pair: CyclePair, x: LatticeClass, bound: int,
                         nef: LatticeClass | None = None) -> BoundedVerdict:
    for i, d in enumerate(pair.declared_minus_two):
        if pairing(x, d) < 0:
            return BoundedVerdict(Status.REFUTED, {"reason": "declared -2 curve", "index": i,
                                                   "witness": d, "pairing": pairing(x, d)}, bound)
    return in_generic_ample_cone(pair, x, bound, nef)


def chamber_reduce(pair: CyclePair, x: LatticeClass, max_steps: int = 1000):
    """Reflect x into the chamber cut out by the declared -2 curves."""
    deltas = pair.declared_minus_two
    if not deltas:
        raise ValueError("no declared -2 curves to reduce against")
    word: list[int] = []
    while True:
        bad = next((i for i, d in enumerate(deltas) if pairing(x, d) < 0), None)
        if bad is None:
            return x, word
        if len(word) >= max_steps:
            raise StepLimit(f"no chamber reached after {max_steps} reflections")
        x = reflect(x, deltas[bad])
        word.append(bad)


def noether_generators(n: int = 10) -> list[LatticeClass]:
    gens = [exceptional(i, n) - exceptional(i + 1, n) for i in range(1, n)]
    gens.append(LatticeClass((1, -1, -1, -1) + (0,) * (n - 3)))
    return gens


def fiber_class(n: int = 10) -> LatticeClass:
    """f = 3h - e_1 - ... - e_9."""
    return LatticeClass((3,) + (-1,) * 9 + (0,) * (n - 9))


class NotIsotropic(ValueError):
    pass


class NotPrimitive(ValueError):
    pass


class NotInPositiveClosure(ValueError):
    pass


def noether_reduce(lam: LatticeClass, max_steps: int = 100000) -> tuple[list[int], LatticeClass]:
    """Reflect a primitive isotropic class orthogonal to K down to f.

    Reflections are taken in the lowest-index generator pairing negatively;
    indices 0..8 are e_i - e_{i+1}, index 9 is h - e_1 - e_2 - e_3.
    """
    if lam.n != 10:
        raise ValueError("Noether reduction works on the ten-point lattice")
    if lam.square() != 0 or pairing(lam, canonical_class(10)) != 0:
        raise NotIsotropic(f"{lam} is not isotropic and orthogonal to K")
    if reduce(gcd, lam.coords, 0) != 1:
        raise NotPrimitive(f"{lam} is not primitive")
    if lam.degree <= 0:
        raise NotInPositiveClosure(f"{lam} is not in the closed positive cone")
    gens = noether_generators()
    word: list[int] = []
    x = lam
    while True:
        bad = next((i for i, g in enumerate(gens) if pairing(x, g) < 0), None)
        if bad is None:
            break
        if len(word) >= max_steps:
            raise StepLimit("Noether reduction did not terminate")
        x = reflect(x, gens[bad])
        word.append(bad)
    if x != fiber_class():
        raise AssertionError(f"reduction stopped at {x}, not at f")
    return word, x


def apply_word(word: Sequence[int], x: LatticeClass, gens: Sequence[LatticeClass] | None = None) -> LatticeClass:
    """Apply reflections in order: word[0] first."""
    gens = noether_generators(x.n) if gens is None else gens
    for i in word:
        x = reflect(x, gens[i])
    return x


def duval_decompose(pair: CyclePair, alpha: LatticeClass) -> tuple[int, LatticeClass]:
    """Write alpha = k (D + e) + e with e exceptional, on the generic ten-point pair."""
    if pair.n != 10 or pair.declared_minus_two:
        raise ValueError("expects the generic ten-point pair")
    if not is_numexc(alpha):
        raise ValueError(f"{alpha} is not numerically exceptional")
    lam = alpha - canonical_class(10)
    if lam.is_zero():
        raise ValueError("alpha = K: the isotropic direction is undefined")
    g = reduce(gcd, lam.coords, 0)
    mult = g if lam.degree > 0 else -g
    lam0 = LatticeClass(tuple(c // mult for c in lam.coords))
    word, _ = noether_reduce(lam0)
    e = apply_word(list(reversed(word)), exceptional(10, 10))
    k = mult - 1
    if k * (pair.boundary + e) + e != alpha:
        raise AssertionError("decomposition does not reconstruct alpha")
    return k, e


def wall_equal(w1: Wall, w2: Wall, within: SubLattice | None = None) -> bool:
    """Whether the two walls coincide, optionally as hyperplanes inside a sublattice."""
    if within is None:
        u, v = w1.normal.coords, w2.normal.coords
    else:
        u = [pairing(w1.normal, b) for b in within.basis]
        v = [pairing(w2.normal, b) for b in within.basis]
    if not any(u) or not any(v):
        return False
    return la.rank([list(u), list(v)]) == 1
