"""Acceptance suite: one PASS/FAIL line per criterion, exact equality throughout.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed even
under output capture) or directly with ``python tests/test_acceptance.py``.
"""

import contextlib
import io
import itertools
import random
import sys
from math import gcd
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import laplace_det, minus_two_count, negative_pell_scan, pell_scan  # noqa: E402

from anticanonical import _linalg as la  # noqa: E402
from anticanonical.cli import main  # noqa: E402
from anticanonical.cones import (  # noqa: E402
    Effectiveness,
    Status,
    Wall,
    apply_word,
    classify_effectiveness,
    construct_nef,
    duval_decompose,
    fiber_class,
    in_generic_ample_cone,
    noether_reduce,
    wall_equal,
)
from anticanonical.lattice import (  # noqa: E402
    IntegerIsometry,
    LatticeClass,
    acts_trivially_on_discriminant,
    discriminant_group,
    exceptional,
    extend_isometry,
    orthogonal_complement,
    pairing,
    plane_class,
    reflect,
    reflection_isometry,
)
from anticanonical.pairs import RegimeKind, classify, lambda_lattice  # noqa: E402
from anticanonical.pell import pell_fundamental, pell_negative_solvable, represent, unit_action  # noqa: E402
from anticanonical.roots import (  # noqa: E402
    ConeVerdict,
    RootStatus,
    check_isometry,
    find_R_distinguished,
    is_root,
    minus_two_classes,
    roots_up_to_bound,
)
from anticanonical.scenarios import build, points_on_cubic  # noqa: E402

CASES = 1000


class Criterion:
    def __init__(self, number, title):
        self.number, self.title, self.failures = number, title, []

    def check(self, label, expected, actual):
        if expected != actual:
            self.failures.append(f"{label}: expected {expected!r}, got {actual!r}")

    def line(self):
        mark = "PASS" if not self.failures else "FAIL"
        tail = "" if not self.failures else f" ({len(self.failures)} mismatches; first: {self.failures[0]})"
        return f"{mark} criterion {self.number}: {self.title}{tail}"


@pytest.fixture
def report(capsys):
    def finish(crit):
        with capsys.disabled():
            print("\n" + crit.line())
        assert not crit.failures, crit.failures
    return finish


def _verify_cli(name):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["scenario", "verify", name])
    return code, buf.getvalue()


def criterion_1():
    c = Criterion(1, "ex42 verification battery")
    code, _ = _verify_cli("ex42")
    c.check("verify exit code", 0, code)
    sc = build("ex42")
    pair, g1, g2, gh, e11 = sc.pair, sc.named["G1"], sc.named["G2"], sc.named["G1_hat"], sc.named["e11"]
    lam = lambda_lattice(pair).rebased([g1, g2])
    c.check("Gram", ((2, 0), (0, -22)), lam.gram)
    c.check("G1.G2", 0, pairing(g1, g2))
    disc = discriminant_group(lambda_lattice(pair))
    c.check("|disc|", 44, disc.order)
    c.check("invariant factors", (2, 22), disc.invariant_factors)
    solvable, cert = pell_negative_solvable(11)
    c.check("negative Pell", (False, "mod4"), (solvable, cert["kind"]))
    fund = pell_fundamental(11)
    c.check("fundamental unit", (10, 3), (fund.a, fund.b))
    c.check("mu^2", (199, 60), fund.power(2))
    gram = [list(r) for r in lam.gram]
    mu = unit_action(11, (10, 3), gram)
    a2 = [list(r) for r in unit_action(11, (199, 60), gram).matrix]
    c.check("mu^2 trivial on disc", True, acts_trivially_on_discriminant(a2, lam))
    f = extend_isometry(a2, lam, pair.components)
    c.check("extension fixes components", True, all(f(d) == d for d in pair.components))
    c.check("e11.A(G1_hat) at (10,3)", 15, pairing(e11, lam.element(list(mu.apply((4, -1))))))
    c.check("e11.A(G1_hat) at (199,60)", 300, pairing(e11, f(gh)))
    rep = check_isometry(pair, pair, f, 12, probes=[gh])
    c.check("isometry verdict", ConeVerdict.NOT_PRESERVED, rep.verdict)
    probe = rep.probes[0]
    c.check("probe target", "Proven", probe["target_membership"]["status"])
    c.check("probe source", "Refuted", probe["source_membership"]["status"])
    c.check("witness", e11.to_json(), probe["source_membership"]["certificate"]["witness"])
    return c


def criterion_2():
    c = Criterion(2, "ex43 verification battery")
    code, _ = _verify_cli("ex43")
    c.check("verify exit code", 0, code)
    sc = build("ex43")
    pair, g1, g2, ep, beta = sc.pair, sc.named["G1"], sc.named["G2"], sc.named["E_prime"], sc.named["beta"]
    lam = lambda_lattice(pair).rebased([g1, g2])
    c.check("Gram", ((10, 0), (0, -2)), lam.gram)
    c.check("|disc|", 20, discriminant_group(lam).order)
    fund = pell_fundamental(5)
    c.check("fundamental unit", (9, 4), (fund.a, fund.b))
    found = minus_two_classes(lam, 15)
    c.check("-2 classes", {g2, -g2, beta, -beta}, set(found))
    c.check("-2 count", 4, len(found))
    c.check("walls equal", True, wall_equal(Wall(beta), Wall(ep), within=lam))
    for n, m in [(1, 0), (0, 1), (2, -3), (-1, 4), (3, 5)]:
        c.check(f"E'.({n}G1+{m}G2)", 20 * n + 9 * m, pairing(ep, n * g1 + m * g2))
    verdicts = roots_up_to_bound(pair, 15)
    c.check("root verdicts", [RootStatus.NOT_IN_R] * 4, [v.status for v in verdicts])
    return c


def criterion_3():
    c = Criterion(3, "nodal cubic effectiveness and root rejection")
    ten = points_on_cubic(10)
    f, e10 = fiber_class(10), exceptional(10, 10)
    c.check("-3h + sum e_i", Effectiveness.NOT_EFFECTIVE, classify_effectiveness(ten, plane_class(10, -3, [-1] * 10)))
    for k in (1, 2, 3):
        c.check(f"k={k}", Effectiveness.EFFECTIVE, classify_effectiveness(ten, k * f + e10))
    for k in (-1, -2):
        c.check(f"k={k}", Effectiveness.NOT_EFFECTIVE, classify_effectiveness(ten, k * f + e10))
    sc = build("nodal_cubic_N", {"N": 11})
    v = is_root(sc.pair, sc.named["beta"], 12)
    c.check("beta verdict", RootStatus.NOT_IN_R, v.status)
    c.check("witness", exceptional(11, 11), v.witness)
    c.check("image", sc.named["alpha"], v.image)
    return c


def criterion_4():
    c = Criterion(4, "Noether reduction and decomposition round trips")
    rng = random.Random(217)
    ten = points_on_cubic(10)
    f, e10 = fiber_class(10), exceptional(10, 10)
    for i in range(50):
        word = [rng.randrange(10) for _ in range(rng.randint(0, 20))]
        c.check(f"word {i} reduce", f, noether_reduce(apply_word(word, f))[1])
        for k in (0, 1, 2):
            alpha = apply_word(word, k * f + e10)
            got_k, e = duval_decompose(ten, alpha)
            c.check(f"word {i} k={k}", alpha, got_k * (ten.boundary + e) + e)
            c.check(f"word {i} k={k} split", (k, apply_word(word, e10)), (got_k, e))
    return c


def criterion_5():
    c = Criterion(5, "regime properties of the root set")
    eight = points_on_cubic(8)
    c.check("E8 regime", RegimeKind.NOT_NEGATIVE_DEFINITE, classify(eight).regime)
    v8 = roots_up_to_bound(eight, 8)
    c.check("E8 root count", minus_two_count(8, 8), len(v8))
    c.check("E8 all InR", True, all(v.status is RootStatus.IN_R for v in v8))
    for label, pair in [("family(2,2)", build("family_kN", {"k": 2, "N": 2}).pair),
                        ("ten points", points_on_cubic(10))]:
        c.check(f"{label} regime", RegimeKind.K_SQUARE_MINUS_ONE, classify(pair).regime)
        vs = roots_up_to_bound(pair, 8)
        c.check(f"{label} has roots", True, len(vs) > 0)
        c.check(f"{label} all InR", True, all(v.status is RootStatus.IN_R for v in vs))
    sc = build("family_kN", {"k": 6, "N": 3})
    cert = find_R_distinguished(sc.pair, sc.pair.asserted_roots)
    c.check("distinguished point found", True, cert is not None)
    if cert is not None:
        c.check("roots used", set(sc.pair.asserted_roots), set(cert.roots_used))
        c.check("x^2 > 0", True, cert.x.square() > 0)
        c.check("x orthogonal", True, all(pairing(cert.x, b) == 0 for b in cert.roots_used + sc.pair.components))
    return c


def _random_minus_two(rng, n):
    beta = exceptional(1, n) - exceptional(2, n)
    pool = [exceptional(i, n) - exceptional(i + 1, n) for i in range(1, n)]
    pool.append(LatticeClass((1, -1, -1, -1) + (0,) * (n - 3)))
    for _ in range(rng.randint(0, 6)):
        beta = reflect(beta, rng.choice(pool))
    return -beta if rng.random() < 0.5 else beta


def _random_class(rng, n, lo=-6, hi=6):
    return LatticeClass(tuple(rng.randint(lo, hi) for _ in range(n + 1)))


def _gcd_of_minors(rows):
    r = len(rows)
    g = 0
    for cols in itertools.combinations(range(len(rows[0])), r):
        g = gcd(g, laplace_det([[row[j] for j in cols] for row in rows]))
    return g


def criterion_6():
    c = Criterion(6, f"randomized property suites ({CASES} cases each)")
    rng = random.Random(6)
    n = 6
    for i in range(CASES):
        x, y, beta = _random_class(rng, n), _random_class(rng, n), _random_minus_two(rng, n)
        c.check(f"involution {i}", x, reflect(reflect(x, beta), beta))
        c.check(f"isometry {i}", pairing(x, y), pairing(reflect(x, beta), reflect(y, beta)))
        w = IntegerIsometry.identity(n)
        for _ in range(rng.randint(1, 4)):
            w = reflection_isometry(_random_minus_two(rng, n)).compose(w)
        c.check(f"conjugation {i}", reflect(x, w(beta)), w(reflect(w.inverse()(x), beta)))

    done = 0
    while done < CASES:
        length = rng.randint(1, 5)
        config = [exceptional(j, n) - exceptional(j + 1, n) for j in range(1, length + 1)]
        seed = plane_class(n, rng.randint(4, 12), [rng.randint(0, 3) for _ in range(n)])
        if seed.square() <= 0 or any(pairing(seed, g) < 0 for g in config):
            continue
        done += 1
        res = construct_nef(seed, config)
        c.check(f"nef orthogonal {done}", True, all(pairing(res.cls, g) == 0 for g in config))
        c.check(f"nef square {done}", True, res.cls.square() > 0)
        c.check(f"nef multipliers {done}", True, all(r >= 0 for r in res.multipliers))
        gram = [[pairing(a, b) for b in config] for a in config]
        rhs = [-pairing(seed, g) for g in config]
        c.check(f"nef solve {done}", rhs, [sum(gram[j][k] * res.multipliers[k] for k in range(length))
                                           for j in range(length)])

    for i in range(CASES):
        cs = [_random_class(rng, 4, -3, 3) for _ in range(rng.randint(1, 3))]
        lam = orthogonal_complement(4, cs)
        c.check(f"complement orthogonal {i}", True, all(pairing(b, x) == 0 for b in lam.basis for x in cs))
        c.check(f"complement rank {i}", 5 - la.rank([x.coords for x in cs]), lam.rank)
        if lam.rank:
            c.check(f"complement saturated {i}", 1, _gcd_of_minors([list(b.coords) for b in lam.basis]))

    for i in range(CASES):
        m = [[rng.randint(-9, 9) for _ in range(4)] for _ in range(4)]
        d = laplace_det(m)
        c.check(f"det {i}", d, la.det(m))
        factors = la.invariant_factors(m)
        prod = 1
        for f in factors:
            prod *= f
        c.check(f"smith product {i}", abs(d), prod if len(factors) == 4 else 0)
        c.check(f"smith chain {i}", True, all(factors[j + 1] % factors[j] == 0 for j in range(len(factors) - 1)))
        s, u, v = la.smith(m)
        c.check(f"smith transform {i}", s, la.mat_mul(la.mat_mul(u, m), v))

    for i in range(CASES):
        d = rng.choice([2, 3, 5, 7, 11, 13])
        bound = rng.randint(1, 3000)
        fund = pell_fundamental(d)
        powers, k = [], 0
        while fund.power(k)[0] <= bound:
            powers.append(fund.power(k))
            k += 1
        scanned = [(a, b) for a, b in represent([[1, 0], [0, -d]], 1, bound) if a > 0 and b >= 0]
        c.check(f"pell powers D={d} B={bound}", powers, scanned)
    c.check("fundamental solutions agree with scan", [pell_scan(d, 200)[0] for d in (2, 3, 5, 7, 11, 13)],
            [(pell_fundamental(d).a, pell_fundamental(d).b) for d in (2, 3, 5, 7, 11, 13)])

    # D = 3 mod 4: -1 is not a sum of two squares mod 4
    squares = {(a * a + b * b) % 4 for a in range(4) for b in range(4)}
    c.check("3 is not a sum of two squares mod 4", False, 3 in squares)
    ds = [d for d in range(3, 4 * CASES + 4, 4) if int(d ** 0.5) ** 2 != d][:CASES]
    c.check("obstruction sample size", CASES, len(ds))
    for d in ds:
        solvable, cert = pell_negative_solvable(d)
        c.check(f"obstruction D={d}", (False, "mod4"), (solvable, cert["kind"]))
        if d <= 200:
            c.check(f"scan D={d}", None, negative_pell_scan(d, min(pell_fundamental(d).b, 20000)))
    return c


def criterion_7():
    from dataclasses import replace

    c = Criterion(7, "verdicts at bound 4 persist at bound 8")
    rng = random.Random(77)
    ex42 = build("ex42")
    family = build("family_kN", {"k": 6, "N": 3}).pair
    # (pair, degree range, largest multiplicity)
    targets = [(ex42.pair, (5, 12), 3), (points_on_cubic(10), (5, 12), 3), (family, (5, 12), 3),
               (points_on_cubic(5), (3, 6), 2), (points_on_cubic(7), (3, 6), 2)]
    for i in range(20):
        pair, (lo, hi), mult = rng.choice(targets)
        x = LatticeClass((rng.randint(lo, hi),) + tuple(-rng.randint(0, mult) for _ in range(pair.n)))
        small, large = in_generic_ample_cone(pair, x, 4), in_generic_ample_cone(pair, x, 8)
        if small.status is not Status.UNDECIDED:
            c.check(f"membership {i} {x}", small.status, large.status)
    bare = [replace(build("family_kN", p).pair, asserted_roots=()) for p in ({"k": 5, "N": 4}, {"k": 4, "N": 2})]
    pool = [(p, b) for p in bare for b in minus_two_classes(lambda_lattice(p), 4)]
    pool += [(family, b) for b in minus_two_classes(lambda_lattice(family), 4)]
    pool += [(build("ex43").pair, b) for b in minus_two_classes(lambda_lattice(build("ex43").pair), 4)]
    for i, (pair, beta) in enumerate(rng.sample(pool, 20)):
        small, large = is_root(pair, beta, 4), is_root(pair, beta, 8)
        if small.status is not RootStatus.UNDECIDED:
            c.check(f"root {i} {beta}", small.status, large.status)
    return c


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 8)])
def test_criterion(criterion, report):
    report(criterion())


if __name__ == "__main__":
    results = [crit() for crit in CRITERIA]
    for r in results:
        print(r.line())
    sys.exit(0 if all(not r.failures for r in results) else 1)
