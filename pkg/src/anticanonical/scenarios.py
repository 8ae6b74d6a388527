"""Named constructions and their golden-value batteries."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Any, Callable

from ._enum import expand_orbit, full_blocks, minus_two_reps
from .cones import (
    Wall,
    classify_effectiveness,
    duval_decompose,
    fiber_class,
    in_generic_ample_cone,
    noether_generators,
    noether_reduce,
    wall_equal,
)
from .lattice import (
    IntegralityFailure,
    LatticeClass,
    acts_trivially_on_discriminant,
    canonical_class,
    discriminant_group,
    exceptional,
    extend_isometry,
    pairing,
    plane_class,
)
from .pairs import (
    CyclePair,
    base_pair,
    classify,
    contract_exceptional,
    corner_blowup,
    interior_blowup,
    lambda_lattice,
    validate,
)
from .pell import pell_fundamental, pell_negative_solvable, represent, unit_action
from .roots import (
    RootStatus,
    check_isometry,
    find_R_distinguished,
    is_root,
    looijenga_orbit,
    minus_two_classes,
    roots_up_to_bound,
)


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    name: str
    params: dict[str, int]
    pair: CyclePair
    named: dict[str, LatticeClass] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        data = self.pair.to_json()
        data["scenario"] = {"name": self.name, "params": self.params}
        data["named_classes"] = {k: v.to_json() for k, v in self.named.items()}
        return data


def _e(i: int, n: int) -> LatticeClass:
    return exceptional(i, n)


def infinitely_near_cubic(steps: int) -> CyclePair:
    """Blow up the node of a nodal cubic and then, repeatedly, the corner
    between the first component and the newest exceptional curve."""
    pair = base_pair("nodal_cubic")
    for _ in range(steps):
        pair = corner_blowup(pair, pair.r - 1)
    return pair


def points_on_cubic(count: int) -> CyclePair:
    pair = base_pair("nodal_cubic")
    for _ in range(count):
        pair, _ = interior_blowup(pair, 0)
    return pair


def build_nodal_cubic(N: int) -> Scenario:
    if N < 10:
        raise ScenarioError("nodal_cubic_N needs N >= 10")
    pair = points_on_cubic(N)
    roots = tuple(_e(i, N) - _e(i + 1, N) for i in range(1, N))
    pair = CyclePair(pair.n, pair.components, history=pair.history, asserted_roots=roots)
    f = fiber_class(10)
    f = LatticeClass(f.coords + (0,) * (N - 10))
    alpha = -f + _e(10, N)
    named = {"f": f, "alpha": alpha, "e10": _e(10, N)}
    if N >= 11:
        named["beta"] = alpha - _e(11, N)
    return Scenario("nodal_cubic_N", {"N": N}, pair, named)


def build_duval10() -> Scenario:
    pair = points_on_cubic(10)
    named = {"f": fiber_class(10), "K": canonical_class(10)}
    for i, g in enumerate(noether_generators(10)):
        named[f"generator{i}"] = g
    return Scenario("duval_10", {}, pair, named)


def build_family(k: int, N: int) -> Scenario:
    if k < 2 or N < 1:
        raise ScenarioError("family_kN needs k >= 2 and N >= 1")
    pair = infinitely_near_cubic(k + 6)
    for _ in range(N):
        pair, _ = interior_blowup(pair, k + 6)
    n = pair.n
    roots = tuple(_e(k + 6 + j, n) - _e(k + 7 + j, n) for j in range(1, N))
    pair = CyclePair(n, pair.components, history=pair.history, asserted_roots=roots)
    named = {f"root{j}": r for j, r in enumerate(roots, start=1)}
    return Scenario("family_kN", {"k": k, "N": N}, pair, named)


def build_ex42() -> Scenario:
    pair, _ = interior_blowup(infinitely_near_cubic(9), 9)
    pair, _ = interior_blowup(pair, 4)
    n = 11
    g1 = plane_class(n, 5, [2] * 4 + [1] * 6 + [1])
    g2 = plane_class(n, 10, [5] * 4 + [1] * 6 + [4])
    return Scenario("ex42", {}, pair, {"G1": g1, "G2": g2, "G1_hat": 4 * g1 - g2, "e11": _e(11, n)})


def build_ex43() -> Scenario:
    pair, _ = interior_blowup(infinitely_near_cubic(9), 9)
    pair, _ = interior_blowup(pair, 0)
    n = 11
    g1 = plane_class(n, 10, [3] * 10)
    g2 = plane_class(n, 3, [1] * 10 + [-1])
    e_prime = plane_class(n, 5, [1] * 10 + [4])
    return Scenario("ex43", {}, pair, {"G1": g1, "G2": g2, "E_prime": e_prime, "beta": 4 * g1 - 9 * g2,
                                       "e11": _e(11, n)})


def build_remark45(m: int) -> Scenario:
    if m < 0:
        raise ScenarioError("remark45_n needs n >= 0")
    pair = points_on_cubic(2 * m + 1)
    a = plane_class(2 * m + 1, m, [m - 1] + [1] * (2 * m))
    return Scenario("remark45_n", {"n": m}, pair, {"A": a})


BUILDERS: dict[str, tuple[Callable[..., Scenario], dict[str, int]]] = {
    "nodal_cubic_N": (lambda N: build_nodal_cubic(N), {"N": 11}),
    "duval_10": (lambda: build_duval10(), {}),
    "family_kN": (lambda k, N: build_family(k, N), {"k": 6, "N": 3}),
    "ex42": (lambda: build_ex42(), {}),
    "ex43": (lambda: build_ex43(), {}),
    "remark45_n": (lambda n: build_remark45(n), {"n": 3}),
}


def build(name: str, params: dict[str, int] | None = None) -> Scenario:
    if name not in BUILDERS:
        raise ScenarioError(f"unknown scenario {name!r}; choose from {sorted(BUILDERS)}")
    fn, defaults = BUILDERS[name]
    merged = dict(defaults)
    for key, value in (params or {}).items():
        if key not in defaults:
            raise ScenarioError(f"scenario {name} has no parameter {key!r}")
        merged[key] = int(value)
    scenario = fn(**merged)
    problems = validate(scenario.pair)
    if problems:
        raise AssertionError(f"built pair is invalid: {problems}")
    return scenario


# ---------------------------------------------------------------- batteries

@dataclass
class Check:
    name: str
    expected: Any
    actual: Any
    source: str  # "reference" for quoted values, "oracle" for computed ones

    @property
    def passed(self) -> bool:
        return self.expected == self.actual

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark} [{self.source}] {self.name}: expected {self.expected!r}, got {self.actual!r}"

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "expected": repr(self.expected), "actual": repr(self.actual),
                "source": self.source, "passed": self.passed}


def _coeffs(lattice, x):
    c = lattice.integer_coordinates(x)
    return None if c is None else tuple(c)


def _battery_ex42(sc: Scenario, bound: int = 15) -> list[Check]:
    pair, g1, g2, gh, e11 = sc.pair, sc.named["G1"], sc.named["G2"], sc.named["G1_hat"], sc.named["e11"]
    out = [Check("pair validates", [], validate(pair), "reference"),
           Check("self-intersections", (-3, -2, -2, -2, -3, -2, -2, -2, -2, -2), pair.self_intersections,
                 "reference")]
    cls = classify(pair)
    out += [Check("negative definite", True, cls.negative_definite, "reference"),
            Check("K^2", -2, cls.k_square, "oracle")]
    lam = lambda_lattice(pair).rebased([g1, g2])
    out += [Check("Gram in (G1, G2)", ((2, 0), (0, -22)), lam.gram, "reference"),
            Check("G1.G2", 0, pairing(g1, g2), "reference")]
    disc = discriminant_group(lam)
    out += [Check("|disc|", 44, disc.order, "reference"),
            Check("invariant factors", (2, 22), disc.invariant_factors, "reference")]
    neg, cert = pell_negative_solvable(11)
    out += [Check("n^2 - 11 m^2 = -1 solvable", False, neg, "reference"),
            Check("obstruction", "mod4", cert["kind"], "reference")]
    fund = pell_fundamental(11)
    out.append(Check("fundamental unit of Z[sqrt 11]", (10, 3), (fund.a, fund.b), "reference"))
    gram = [list(r) for r in lam.gram]
    mu = unit_action(11, (10, 3), gram)
    mu2 = unit_action(11, fund.power(2), gram)
    out += [Check("unit action of mu", ((10, 33), (3, 10)), mu.matrix, "reference"),
            Check("mu^2", (199, 60), fund.power(2), "reference"),
            Check("mu trivial on discriminant", False,
                  acts_trivially_on_discriminant([list(r) for r in mu.matrix], lam), "oracle"),
            Check("mu^2 trivial on discriminant", True,
                  acts_trivially_on_discriminant([list(r) for r in mu2.matrix], lam), "reference")]
    f = extend_isometry([list(r) for r in mu2.matrix], lam, pair.components)
    out.append(Check("extension fixes every component", True, all(f(c) == c for c in pair.components),
                     "reference"))
    try:
        extend_isometry([list(r) for r in mu.matrix], lam, pair.components)
        mu_ext = "integral"
    except IntegralityFailure:
        mu_ext = "IntegralityFailure"
    out.append(Check("extension of mu", "IntegralityFailure", mu_ext, "oracle"))
    for (a, b) in ((10, 3), (199, 60)):
        image = lam.element(unit_action(11, (a, b), gram).apply(_coeffs(lam, gh)))
        out.append(Check(f"e11.A(G1_hat) at {(a, b)}", 5 * b, pairing(e11, image), "reference"))
    out.append(Check("A(G1_hat) for mu^2", (136, 41), mu2.apply(_coeffs(lam, gh)), "reference"))
    out.append(Check("G1_hat", plane_class(11, 10, [3] * 10), gh, "reference"))
    out.append(Check("-2 classes in the complement", [], minus_two_classes(lam, bound), "reference"))
    out.append(Check("G1_hat in the generic ample cone", "Proven",
                     in_generic_ample_cone(pair, gh, bound).status.value, "reference"))
    report = check_isometry(pair, pair, f, bound, probes=[gh])
    probe = report.probes[0]["source_membership"]
    out += [Check("isometry verdict", "ConeNotPreserved", report.verdict.value, "reference"),
            Check("pullback of G1_hat refuted", "Refuted", probe["status"], "reference"),
            Check("refuting witness", e11.to_json(), probe["certificate"].get("witness"), "reference"),
            Check("e11 . f^-1(G1_hat)", -300, probe["certificate"].get("pairing"), "oracle")]
    small = contract_exceptional(pair, 11)
    ref, _ = interior_blowup(infinitely_near_cubic(9), 9)
    out += [Check("contracting e11", ref.components, small.components, "reference"),
            Check("contracted complement generator", (LatticeClass(gh.coords[:-1]),),
                  tuple(b if b.degree > 0 else -b for b in lambda_lattice(small).basis), "reference")]
    return out


def _battery_ex43(sc: Scenario, bound: int = 15) -> list[Check]:
    pair = sc.pair
    g1, g2, ep, beta = sc.named["G1"], sc.named["G2"], sc.named["E_prime"], sc.named["beta"]
    out = [Check("pair validates", [], validate(pair), "reference"),
           Check("self-intersections", (-4,) + (-2,) * 9, pair.self_intersections, "reference")]
    lam = lambda_lattice(pair).rebased([g1, g2])
    out += [Check("Gram in (G1, G2)", ((10, 0), (0, -2)), lam.gram, "reference"),
            Check("|disc|", 20, discriminant_group(lam).order, "reference")]
    fund = pell_fundamental(5)
    out.append(Check("fundamental unit of Z[sqrt 5]", (9, 4), (fund.a, fund.b), "reference"))
    out.append(Check("unit action preserves the form", True,
                     unit_action(5, (9, 4), [list(r) for r in lam.gram]) is not None, "oracle"))
    classes = minus_two_classes(lam, bound)
    out.append(Check(f"-2 classes at bound {bound}", [(-4, 9), (0, -1), (0, 1), (4, -9)],
                     sorted(_coeffs(lam, b) for b in classes), "reference"))
    out.append(Check("represent 10n^2 - 2m^2 = -2",
                     [(-4, -9), (-4, 9), (0, -1), (0, 1), (4, -9), (4, 9)],
                     represent([list(r) for r in lam.gram], -2, 10), "reference"))
    out.append(Check("beta = 13h - 3(e1+..+e10) - 9e11", plane_class(11, 13, [3] * 10 + [9]), beta, "reference"))
    out.append(Check("wall of beta equals wall of E'", True,
                     wall_equal(Wall(beta), Wall(ep), within=lam), "reference"))
    for n, m in ((1, 0), (0, 1), (2, -3), (-1, 4), (3, 5)):
        out.append(Check(f"E'.({n} G1 + {m} G2)", 20 * n + 9 * m, pairing(ep, lam.element((n, m))), "reference"))
    verdicts = roots_up_to_bound(pair, bound)
    out.append(Check("root verdicts", ["NotInR"] * 4, [v.status.value for v in verdicts], "reference"))
    wit = {tuple(_coeffs(lam, v.beta)): (v.witness, v.image) for v in verdicts}
    out.append(Check("witness for G2", (sc.named["e11"], plane_class(11, -3, [-1] * 10)),
                     wit[(0, 1)], "reference"))
    out.append(Check("witness for beta", (ep, plane_class(11, -8, [-2] * 10 + [-5])),
                     wit[(4, -9)], "reference"))
    out.append(Check("distinguished point", None, find_R_distinguished(pair, [v.beta for v in verdicts
                                                                            if v.status is RootStatus.IN_R]),
                     "reference"))
    return out


def _battery_nodal(sc: Scenario, bound: int = 12) -> list[Check]:
    pair, N = sc.pair, sc.params["N"]
    f, e10 = sc.named["f"], sc.named["e10"]
    out = [Check("pair validates", [], validate(pair), "reference")]
    alpha = sc.named["alpha"]
    out.append(Check("-3h + e1 + .. + e10", "NotEffective", classify_effectiveness(pair, alpha).value, "reference"))
    for k in (1, 2, 3, -1, -2):
        want = "Effective" if k >= 0 else "NotEffective"
        out.append(Check(f"kf + e10 with k = {k}", want, classify_effectiveness(pair, k * f + e10).value,
                         "reference"))
    cls = classify(pair)
    if N == 10:
        out.append(Check("regime", "KSquareMinusOne", cls.regime.value, "oracle"))
    else:
        g = gcd(N, 3)
        x = plane_class(N, N // g, [3 // g] * N)
        out += [Check("regime", "Distinguished", cls.regime.value, "oracle"),
                Check("distinguished point", x, cls.point, "oracle")]
        v = is_root(pair, sc.named["beta"], bound)
        out += [Check("beta = alpha - e11", "NotInR", v.status.value, "reference"),
                Check("witness", _e(11, N), v.witness, "reference"),
                Check("image of witness", alpha, v.image, "reference")]
    return out


def _battery_duval(sc: Scenario, bound: int = 5) -> list[Check]:
    pair, f = sc.pair, sc.named["f"]
    out = [Check("pair validates", [], validate(pair), "reference"),
           Check("D + e10 = f", f, pair.boundary + _e(10, 10), "reference"),
           Check("Noether reduction of f", ([], f), noether_reduce(f), "oracle")]
    for k in range(0, 4):
        out.append(Check(f"decompose {k}f + e10", (k, _e(10, 10)), duval_decompose(pair, k * f + _e(10, 10)),
                         "reference"))
    out.append(Check("regime", "KSquareMinusOne", classify(pair).regime.value, "oracle"))
    orbit = looijenga_orbit(noether_generators(10), None, bound)
    out.append(Check(f"generator orbit stabilizes within {bound}", False, orbit.stabilized, "oracle"))
    # every -2 class orthogonal to K lies in one orbit, so the shell count is an independent oracle
    blocks = full_blocks(10)
    expected = sum(1 for x in minus_two_reps(10, bound, blocks) for _ in expand_orbit(x, blocks))
    out.append(Check(f"generator orbit size within {bound}", expected, len(orbit.classes), "oracle"))
    return out


def _battery_family(sc: Scenario, bound: int = 4) -> list[Check]:
    pair, k, N = sc.pair, sc.params["k"], sc.params["N"]
    out = [Check("pair validates", [], validate(pair), "reference"),
           Check("self-intersections", (-k,) + (-2,) * (k + 5) + (-1 - N,), pair.self_intersections, "reference"),
           Check("K^2", 3 - k - N, canonical_class(pair.n).square(), "reference"),
           Check("complement rank", N, lambda_lattice(pair).rank, "oracle")]
    cls = classify(pair)
    if k >= 3:
        out.append(Check("negative definite", True, cls.negative_definite, "reference"))
    if cls.negative_definite and cls.k_square != -1:
        cert = find_R_distinguished(pair, pair.asserted_roots)
        out.append(Check("distinguished point found", True, cert is not None, "reference"))
        if cert is not None:
            out.append(Check("roots used", tuple(sorted(pair.asserted_roots, key=lambda c: c.coords)),
                             cert.roots_used, "reference"))
        for j, r in enumerate(pair.asserted_roots, start=1):
            out.append(Check(f"root {j} in R", "InR", is_root(pair, r, bound).status.value, "reference"))
    return out


def _battery_remark45(sc: Scenario) -> list[Check]:
    a, n = sc.named["A"], sc.pair.n
    return [Check("pair validates", [], validate(sc.pair), "reference"),
            Check("A^2", -1, a.square(), "reference"),
            Check("A.K", -1, pairing(a, canonical_class(n)), "reference")]


BATTERIES = {
    "ex42": _battery_ex42,
    "ex43": _battery_ex43,
    "nodal_cubic_N": _battery_nodal,
    "duval_10": _battery_duval,
    "family_kN": _battery_family,
    "remark45_n": _battery_remark45,
}


def verify(scenario: Scenario) -> list[Check]:
    return BATTERIES[scenario.name](scenario)
