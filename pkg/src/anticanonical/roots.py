"""Looijenga roots: detection, bounded root sets, distinguished points and isometry checks."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterator, Sequence

from . import _linalg as la
from ._enum import blocks_for, degree_order, expand_orbit, numexc_reps_cut, shell, violator_degree_bound
from .cones import (
    Effectiveness,
    EffectivenessRule,
    _jsonable,
    effectiveness_rule,
    find_violator,
    in_generic_ample_cone,
    lambda_projection_of_h,
)
from .lattice import (
    IntegerIsometry,
    LatticeClass,
    SubLattice,
    canonical_class,
    hyperplane,
    is_negative_definite,
    orthogonal_complement,
    pairing,
    preserves_positive_cone,
    reflect,
)
from .pairs import CyclePair, RegimeKind, classify, in_lambda, known_roots, lambda_lattice


class RootStatus(enum.Enum):
    IN_R = "InR"
    NOT_IN_R = "NotInR"
    UNDECIDED = "UndecidedUpToBound"


@dataclass(frozen=True)
class RootVerdict:
    beta: LatticeClass
    status: RootStatus
    rule: str
    bound: int
    witness: LatticeClass | None = None
    image: LatticeClass | None = None
    certificate: LatticeClass | None = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"beta": self.beta.to_json(), "status": self.status.value,
                               "rule": self.rule, "bound": self.bound}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
            out["image"] = self.image.to_json()
        if self.certificate is not None:
            out["interior_point"] = self.certificate.to_json()
        return out


@dataclass(frozen=True)
class DistinguishedCertificate:
    roots_used: tuple[LatticeClass, ...]
    x: LatticeClass
    gram_V: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict[str, Any]:
        return {"roots_used": [b.to_json() for b in self.roots_used], "x": self.x.to_json(),
                "x_square": self.x.square(), "gram_V": [list(r) for r in self.gram_V]}


# ---------------------------------------------------------------- -2 classes

def _fincke_pohst(gram: list[list[int]], radius: int) -> Iterator[tuple[int, ...]]:
    """Integer vectors v with v^T G v <= radius for a positive definite G."""
    k = len(gram)
    q = [[Fraction(x) for x in row] for row in gram]
    for i in range(k):
        for j in range(i + 1, k):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for a in range(i + 1, k):
            for b in range(a, k):
                q[a][b] -= q[a][i] * q[i][b]
    # q[i][i] are the pivots, q[i][j] (j > i) the multipliers
    x = [0] * k

    def rec(i: int, rest: Fraction) -> Iterator[tuple[int, ...]]:
        if i < 0:
            yield tuple(x)
            return
        c = -sum((q[i][j] * x[j] for j in range(i + 1, k)), Fraction(0))
        w = la.floor_sqrt(rest / q[i][i])
        base = int(c // 1)
        for v in range(base - w - 1, base + w + 2):
            t = q[i][i] * (v - c) ** 2
            if t <= rest:
                x[i] = v
                yield from rec(i - 1, rest - t)
        x[i] = 0

    yield from rec(k - 1, Fraction(radius))


def _minus_two_fp(lattice: SubLattice, bound: int) -> list[LatticeClass]:
    basis = [b.coords for b in lattice.basis]
    euclid = [[sum(a * b for a, b in zip(u, v)) for v in basis] for u in basis]
    out = []
    for coeffs in _fincke_pohst(euclid, 2 * bound * bound + 2):
        beta = lattice.element(coeffs)
        if beta.square() == -2 and abs(beta.degree) <= bound:
            out.append(beta)
    return out


def _minus_two_shell(lattice: SubLattice, bound: int) -> list[LatticeClass]:
    n = lattice.ambient_n
    perp = orthogonal_complement(n, lattice.basis).basis
    blocks = blocks_for(n, perp)
    k = canonical_class(n)
    k_perp = all(pairing(k, b) == 0 for b in lattice.basis)
    out = []
    for d in degree_order(bound):
        norm = d * d + 2
        sums = [-3 * d] if k_perp else range(-la.floor_sqrt(n * norm), la.floor_sqrt(n * norm) + 1)
        for t in sums:
            for c in shell(n, t, norm, blocks):
                rep = LatticeClass((d,) + c)
                if all(pairing(rep, p) == 0 for p in perp):
                    out.extend(expand_orbit(rep, blocks))
    return out


def minus_two_classes(lattice: SubLattice, bound: int, method: str = "auto") -> list[LatticeClass]:
    """All beta in the lattice with beta^2 = -2 and |beta.h| <= bound, sorted."""
    if lattice.rank == 0:
        return []
    if method == "auto":
        method = "fincke-pohst" if lattice.rank <= 6 else "shell"
    found = _minus_two_fp(lattice, bound) if method == "fincke-pohst" else _minus_two_shell(lattice, bound)
    return sorted(set(found), key=lambda c: c.coords)


# ---------------------------------------------------------------- orbits

@dataclass(frozen=True)
class OrbitResult:
    classes: tuple[LatticeClass, ...]
    stabilized: bool


def looijenga_orbit(basis: Sequence[LatticeClass], positivity: Sequence[int] | None,
                    bound: int) -> OrbitResult:
    """Closure of +-basis under reflections in the basis, kept within |degree| <= bound.

    Only orbit elements reachable through classes inside the bound are found;
    `stabilized` is false as soon as a reflection leaves the bound.
    """
    for b in basis:
        if b.square() != -2:
            raise ValueError(f"{b} does not have square -2")
    if positivity is not None:
        if len(positivity) != len(basis) or any(v <= 0 for v in positivity):
            raise ValueError("positivity vector must have one positive entry per basis element")
        w = LatticeClass((0,) * (basis[0].n + 1))
        for c, b in zip(positivity, basis):
            w = w + c * b
        if any(pairing(w, b) <= 0 for b in basis):
            raise ValueError("positivity condition fails for the supplied vector")
    seen: set[LatticeClass] = set()
    queue: deque[LatticeClass] = deque()
    for b in basis:
        for s in (b, -b):
            if abs(s.degree) <= bound and s not in seen:
                seen.add(s)
                queue.append(s)
    stabilized = True
    while queue:
        x = queue.popleft()
        for b in basis:
            y = reflect(x, b)
            if abs(y.degree) > bound:
                stabilized = False
                continue
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return OrbitResult(tuple(sorted(seen, key=lambda c: c.coords)), stabilized)


# ---------------------------------------------------------------- root tests

def _cycle_positive_class(pair: CyclePair) -> LatticeClass | None:
    """An integral p in the span of the cycle with p.D_i the same positive value for all i."""
    comps = pair.components
    gram = [[pairing(a, b) for b in comps] for a in comps]
    if la.det(gram) == 0:
        return None
    coeffs = la.solve(gram, [1] * len(comps))
    den = la.lcm_denominators(coeffs)
    out = LatticeClass((0,) * (pair.n + 1))
    for c, d in zip(coeffs, comps):
        out = out + int(c * den) * d
    return out


def _interior_candidates(pair: CyclePair, rule: EffectivenessRule, beta: LatticeClass):
    seeds = []
    p = _cycle_positive_class(pair)
    if p is not None:
        # y is orthogonal to the cycle and to beta, and p is positive on every component
        y0 = lambda_projection_of_h(pair)
        y = 2 * y0 + pairing(y0, beta) * beta
        t0 = la.ceil_sqrt(Fraction(-p.square(), y.square())) + 1 if p.square() < 0 else 1
        for t in (t0, 2 * t0, 4 * t0, 8 * t0):
            seeds.append(t * y + p)
    if rule.normal.square() > 0:
        seeds.append(rule.normal)
    seeds.append(lambda_projection_of_h(pair))
    h = hyperplane(pair.n)
    for t in (1, 2, 3, 5, 8):
        seeds.append(t * rule.normal + h)
        seeds.append(rule.normal + t * h)
    seen = []
    for y in seeds:
        x = y if pairing(y, beta) == 0 else 2 * y + pairing(y, beta) * beta
        if x not in seen:
            seen.append(x)
    return seen


def _interior_point(pair: CyclePair, rule: EffectivenessRule, beta: LatticeClass,
                    bound: int) -> LatticeClass | None:
    """A point x with x.beta = 0 strictly inside the generic ample cone, certified up to bound."""
    h = hyperplane(pair.n)
    for x in _interior_candidates(pair, rule, beta):
        if x.square() <= 0 or x.degree <= 0 or any(pairing(x, c) <= 0 for c in pair.components):
            continue
        deg = violator_degree_bound(h, rule.normal, rule.threshold, x, 0)
        if deg is None or deg > bound:
            continue
        alpha, undecided = find_violator(pair, rule, x, deg, c_max=0)
        if alpha is None and not undecided:
            return x
    return None


def _check_beta(pair: CyclePair, beta: LatticeClass) -> None:
    if beta.square() != -2:
        raise ValueError(f"{beta} does not have square -2")
    if not in_lambda(pair, beta):
        raise ValueError(f"{beta} is not orthogonal to the cycle")


def is_root(pair: CyclePair, beta: LatticeClass, bound: int, nef: LatticeClass | None = None) -> RootVerdict:
    _check_beta(pair, beta)
    regime = classify(pair).regime
    if regime is RegimeKind.NOT_NEGATIVE_DEFINITE:
        return RootVerdict(beta, RootStatus.IN_R, "not-negative-definite", bound)
    if regime is RegimeKind.K_SQUARE_MINUS_ONE:
        return RootVerdict(beta, RootStatus.IN_R, "k-square-minus-one", bound)
    known = known_roots(pair)
    if known and beta in looijenga_orbit(known, None, max(bound, abs(beta.degree))).classes:
        return RootVerdict(beta, RootStatus.IN_R, "asserted-orbit", bound)
    rule = effectiveness_rule(pair, nef)
    if rule is None:
        return RootVerdict(beta, RootStatus.UNDECIDED, "no-effectiveness-rule", bound)
    funcs = [rule.normal, beta] + (list(pair.components) if rule.excludes_span else [])
    # alpha effective, and r_beta(alpha).normal = alpha.(normal + (beta.normal) beta) below the threshold
    moved = rule.normal + pairing(beta, rule.normal) * beta
    cuts = [(rule.normal, rule.threshold), (-moved, 1 - rule.threshold)]
    for alpha in numexc_reps_cut(pair.n, bound, blocks_for(pair.n, funcs), cuts):
        if rule.decide(pair, alpha) is not Effectiveness.EFFECTIVE:
            continue
        image = reflect(alpha, beta)
        if rule.decide(pair, image) is Effectiveness.NOT_EFFECTIVE:
            return RootVerdict(beta, RootStatus.NOT_IN_R, "reflection-witness", bound, alpha, image)
    x = _interior_point(pair, rule, beta, bound)
    if x is not None:
        return RootVerdict(beta, RootStatus.IN_R, "interior-point", bound, certificate=x)
    return RootVerdict(beta, RootStatus.UNDECIDED, rule.name, bound)


def roots_up_to_bound(pair: CyclePair, bound: int, nef: LatticeClass | None = None) -> list[RootVerdict]:
    return [is_root(pair, b, bound, nef) for b in minus_two_classes(lambda_lattice(pair), bound)]


def _canonical_sign(b: LatticeClass) -> LatticeClass:
    first = next(c for c in b.coords if c)
    return b if first > 0 else -b


def find_R_distinguished(pair: CyclePair, verified_roots: Sequence[LatticeClass],
                         bound: int | None = None, cap: int = 10000) -> DistinguishedCertificate | None:
    """Search for a negative definite corank-one span of roots and its positive normal.

    `bound`, when given, discards roots of larger degree.
    """
    lam = lambda_lattice(pair)
    k = lam.rank
    if k == 0:
        return None
    roots: list[LatticeClass] = []
    for b in verified_roots:
        if bound is not None and abs(b.degree) > bound:
            continue
        s = _canonical_sign(b)
        if s not in roots and in_lambda(pair, s) and s.square() == -2:
            roots.append(s)
    roots.sort(key=lambda c: c.coords)
    for tried, subset in enumerate(combinations(roots, k - 1)):
        if tried >= cap:
            break
        gram = tuple(tuple(pairing(a, b) for b in subset) for a in subset)
        if subset and not is_negative_definite(gram):
            continue
        perp = orthogonal_complement(pair.n, list(pair.components) + list(subset))
        if perp.rank != 1:
            continue
        x = perp.basis[0]
        if x.degree < 0:
            x = -x
        if x.square() > 0 and x.degree > 0:
            return DistinguishedCertificate(tuple(subset), x, gram)
    return None


# ---------------------------------------------------------------- isometries

class ConeVerdict(enum.Enum):
    PRESERVED = "ConePreserved"
    NOT_PRESERVED = "ConeNotPreserved"
    UNDECIDED = "UndecidedUpToBound"
    NOT_ADMISSIBLE = "NotAdmissible"


@dataclass
class IsometryReport:
    components_fixed: bool
    positive_cone: bool
    lambda_mapped: bool
    verdict: ConeVerdict
    rule: str
    bound: int
    witness: LatticeClass | None = None
    witness_image: LatticeClass | None = None
    roots_mapped: bool | None = None
    probes: list[dict[str, Any]] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return _jsonable({
            "components_fixed": self.components_fixed,
            "positive_cone": self.positive_cone,
            "lambda_mapped": self.lambda_mapped,
            "verdict": self.verdict.value,
            "rule": self.rule,
            "bound": self.bound,
            "witness": self.witness,
            "witness_image": self.witness_image,
            "roots_mapped": self.roots_mapped,
            "probes": self.probes,
        })


def _disagreement(pair: CyclePair, rule: EffectivenessRule, pulled: LatticeClass, threshold: int,
                  limit: int) -> LatticeClass | None:
    """First alpha with alpha.normal >= rule.threshold and alpha.pulled < threshold."""
    alpha, _ = find_violator(pair, rule, pulled, limit, c_max=threshold - 1)
    return alpha


def check_isometry(pair: CyclePair, pair2: CyclePair, f: IntegerIsometry, bound: int,
                   probes: Sequence[LatticeClass] = (), nef: LatticeClass | None = None,
                   nef2: LatticeClass | None = None) -> IsometryReport:
    if f.n != pair.n or pair.n != pair2.n or pair.r != pair2.r:
        raise ValueError("pairs and isometry have mismatched shapes")
    fixed = all(f(a) == b for a, b in zip(pair.components, pair2.components))
    positive = preserves_positive_cone(f)
    lam2 = lambda_lattice(pair2)
    mapped = all(f(b) in lam2 for b in lambda_lattice(pair).basis)
    report = IsometryReport(fixed, positive, mapped, ConeVerdict.NOT_ADMISSIBLE, "admissibility", bound)
    if not (fixed and positive and mapped):
        return report
    finv = f.inverse()
    for z in probes:
        report.probes.append({
            "class": z,
            "target_membership": in_generic_ample_cone(pair2, z, bound, nef2).to_json(),
            "pullback": finv(z),
            "source_membership": in_generic_ample_cone(pair, finv(z), bound, nef).to_json(),
        })
    regime = classify(pair).regime
    if regime is RegimeKind.NOT_NEGATIVE_DEFINITE and classify(pair2).regime is regime:
        report.verdict, report.rule = ConeVerdict.PRESERVED, "not-negative-definite"
    elif regime is RegimeKind.K_SQUARE_MINUS_ONE and classify(pair2).regime is regime:
        report.verdict, report.rule = ConeVerdict.PRESERVED, "light-cone"
    else:
        _compare_rules(pair, pair2, f, bound, report, nef, nef2)
    report.roots_mapped = _roots_mapped(pair, pair2, f, bound, nef, nef2)
    return report


def _compare_rules(pair, pair2, f, bound, report, nef, nef2) -> None:
    rule = effectiveness_rule(pair, nef)
    rule2 = effectiveness_rule(pair2, nef2)
    if rule is None or rule2 is None:
        report.verdict, report.rule = ConeVerdict.UNDECIDED, "no-effectiveness-rule"
        return
    finv = f.inverse()
    pulled = finv(rule2.normal)
    h = hyperplane(pair.n)
    report.rule = "rule-comparison"
    if (rule.threshold == rule2.threshold and rule.excludes_span == rule2.excludes_span
            and la.rank([rule.normal.coords, pulled.coords]) == 1
            and _same_direction(rule.normal, pulled)):
        report.verdict = ConeVerdict.PRESERVED
        return
    # effective on the source, image not effective on the target
    b1 = violator_degree_bound(h, rule.normal, rule.threshold, pulled, rule2.threshold - 1)
    alpha = _disagreement(pair, rule, pulled, rule2.threshold, bound if b1 is None else min(bound, b1))
    if alpha is not None and rule2.decide(pair2, f(alpha)) is Effectiveness.NOT_EFFECTIVE:
        report.verdict, report.witness, report.witness_image = ConeVerdict.NOT_PRESERVED, alpha, f(alpha)
        return
    # not effective on the source, image effective on the target
    back = EffectivenessRule(rule2.name, pulled, rule2.threshold, rule2.excludes_span)
    b2 = violator_degree_bound(h, pulled, rule2.threshold, rule.normal, rule.threshold - 1)
    beta = _disagreement(pair, back, rule.normal, rule.threshold, bound if b2 is None else min(bound, b2))
    if beta is not None and rule.decide(pair, beta) is Effectiveness.NOT_EFFECTIVE:
        report.verdict, report.witness, report.witness_image = ConeVerdict.NOT_PRESERVED, beta, f(beta)
        return
    spans = rule.excludes_span or rule2.excludes_span
    if b1 is not None and b2 is not None and max(b1, b2) <= bound and not spans:
        report.verdict = ConeVerdict.PRESERVED
    else:
        report.verdict = ConeVerdict.UNDECIDED


def _same_direction(u: LatticeClass, v: LatticeClass) -> bool:
    i = next(k for k, c in enumerate(u.coords) if c)
    return (u.coords[i] > 0) == (v.coords[i] > 0)


def _roots_mapped(pair, pair2, f, bound, nef, nef2) -> bool | None:
    verdict = True
    for v in roots_up_to_bound(pair, bound, nef):
        if v.status is not RootStatus.IN_R:
            continue
        image = f(v.beta)
        w = is_root(pair2, image, max(bound, abs(image.degree)), nef2)
        if w.status is RootStatus.NOT_IN_R:
            return False
        if w.status is RootStatus.UNDECIDED:
            verdict = None
    return verdict
