"""Shell enumeration of classes with fixed coordinate sum and norm.

A numerical exceptional class d h + sum c_i e_i has sum c_i = 1 - 3d and
sum c_i^2 = d^2 + 1; a -2 class orthogonal to K has sum c_i = -3d and
sum c_i^2 = d^2 + 2.  Both are shells {sum = t, sum of squares = q}.

Searches only ever evaluate a few linear functionals.  Coordinates on which
all of them agree can be permuted freely, so we enumerate one representative
per such permutation orbit: the coordinate vector restricted to each block of
interchangeable positions is non-increasing.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterator, Sequence

from sympy.utilities.iterables import multiset_permutations

from ._linalg import ceil_sqrt, floor_sqrt
from .lattice import LatticeClass, pairing

Blocks = tuple[tuple[int, ...], ...]


def blocks_for(n: int, functionals: Sequence[LatticeClass]) -> Blocks:
    """Group positions 1..n on which every functional has the same coefficient."""
    groups: dict[tuple[int, ...], list[int]] = {}
    for i in range(1, n + 1):
        groups.setdefault(tuple(f.coords[i] for f in functionals), []).append(i)
    return tuple(tuple(g) for g in groups.values())


def full_blocks(n: int) -> Blocks:
    return (tuple(range(1, n + 1)),) if n else ()


@lru_cache(maxsize=4096)
def shell(n: int, total: int, norm: int, blocks: Blocks) -> tuple[tuple[int, ...], ...]:
    """Block-sorted vectors c in Z^n with sum c = total and sum c^2 = norm."""
    order = [p for b in blocks for p in b]
    starts = set()
    for b in blocks:
        if b:
            starts.add(b[0])
    out: list[tuple[int, ...]] = []
    vec = [0] * (n + 1)

    def rec(k: int, s: int, q: int, cap: int | None) -> None:
        left = n - k
        if left == 0:
            if s == 0 and q == 0:
                out.append(tuple(vec[1:]))
            return
        pos = order[k]
        if pos in starts:
            cap = None
        top = isqrt(q)
        hi = top if cap is None else min(top, cap)
        rest = left - 1
        for v in range(hi, -top - 1, -1):
            s2, q2 = s - v, q - v * v
            if q2 < 0:
                continue
            if rest == 0:
                if s2 != 0 or q2 != 0:
                    continue
            elif s2 * s2 > rest * q2 or (q2 - s2) & 1:
                continue
            vec[pos] = v
            rec(k + 1, s2, q2, v)
        vec[pos] = 0

    if (norm - total) & 1 == 0 and total * total <= max(n, 1) * norm:
        rec(0, total, norm, None)
    return tuple(out)


def shell_cut(n: int, total: int, norm: int, blocks: Blocks,
              cuts: Sequence[tuple[Sequence[int], int]]) -> Iterator[tuple[int, ...]]:
    """Like shell, restricted to sum_i c_i w_i <= limit for every (w, limit) in cuts.

    w is indexed by position 1..n (w[0] is ignored).  A branch is pruned when
    even the real minimum of the remaining part, over vectors with the
    remaining sum s and norm q, overshoots: on m positions with weight mean
    mu and centred square sum V that minimum is s*mu - sqrt((q - s^2/m) V).
    """
    order = [p for b in blocks for p in b]
    starts = {b[0] for b in blocks if b}
    # suffix sums of w and w^2 along the enumeration order
    suffix = []
    for w, _ in cuts:
        sw, sw2 = [0] * (n + 1), [0] * (n + 1)
        for k in range(n - 1, -1, -1):
            sw[k] = sw[k + 1] + w[order[k]]
            sw2[k] = sw2[k + 1] + w[order[k]] ** 2
        suffix.append((sw, sw2))
    vec = [0] * (n + 1)
    partial = [0] * len(cuts)

    def feasible(k: int, s: int, q: int) -> bool:
        m = n - k
        for j, (_, limit) in enumerate(cuts):
            if m == 0:
                low = 0.0
            else:
                sw, sw2 = suffix[j][0][k], suffix[j][1][k]
                var = max(sw2 - sw * sw / m, 0.0)
                slack = max(q - s * s / m, 0.0)
                low = s * sw / m - (slack * var) ** 0.5
            if partial[j] + low > limit + 1e-6 * (1 + abs(limit)):
                return False
        return True

    def rec(k: int, s: int, q: int, cap: int | None) -> Iterator[tuple[int, ...]]:
        left = n - k
        if left == 0:
            if s == 0 and q == 0 and all(p <= lim for p, (_, lim) in zip(partial, cuts)):
                yield tuple(vec[1:])
            return
        pos = order[k]
        if pos in starts:
            cap = None
        top = isqrt(q)
        hi = top if cap is None else min(top, cap)
        rest = left - 1
        for v in range(hi, -top - 1, -1):
            s2, q2 = s - v, q - v * v
            if q2 < 0:
                continue
            if rest == 0:
                if s2 != 0 or q2 != 0:
                    continue
            elif s2 * s2 > rest * q2 or (q2 - s2) & 1:
                continue
            for j, (w, _) in enumerate(cuts):
                partial[j] += w[pos] * v
            vec[pos] = v
            if feasible(k + 1, s2, q2):
                yield from rec(k + 1, s2, q2, v)
            for j, (w, _) in enumerate(cuts):
                partial[j] -= w[pos] * v
        vec[pos] = 0

    if (norm - total) & 1 == 0 and total * total <= max(n, 1) * norm and feasible(0, total, norm):
        yield from rec(0, total, norm, None)


def degree_order(limit: int) -> Iterator[int]:
    """0, 1, -1, 2, -2, ... up to |d| <= limit."""
    yield 0
    for d in range(1, limit + 1):
        yield d
        yield -d


def numexc_reps(n: int, limit: int, blocks: Blocks) -> Iterator[LatticeClass]:
    for d in degree_order(limit):
        for c in shell(n, 1 - 3 * d, d * d + 1, blocks):
            yield LatticeClass((d,) + c)


def numexc_reps_cut(n: int, limit: int, blocks: Blocks,
                    lower: Sequence[tuple[LatticeClass, int]]) -> Iterator[LatticeClass]:
    """Numerical exceptional representatives with alpha.w >= lo for every (w, lo) in lower."""
    for d in degree_order(limit):
        # alpha.w = d w_0 - sum c_i w_i >= lo  <=>  sum c_i w_i <= d w_0 - lo
        cuts = [(w.coords, d * w.coords[0] - lo) for w, lo in lower]
        for c in shell_cut(n, 1 - 3 * d, d * d + 1, blocks, cuts):
            yield LatticeClass((d,) + c)


def minus_two_reps(n: int, limit: int, blocks: Blocks) -> Iterator[LatticeClass]:
    for d in degree_order(limit):
        for c in shell(n, -3 * d, d * d + 2, blocks):
            yield LatticeClass((d,) + c)


def expand_orbit(x: LatticeClass, blocks: Blocks) -> Iterator[LatticeClass]:
    """All classes obtained from x by permuting positions inside each block."""
    coords = list(x.coords)
    per_block = [list(multiset_permutations([coords[p] for p in b])) for b in blocks]

    def rec(i: int, cur: list[int]) -> Iterator[LatticeClass]:
        if i == len(blocks):
            yield LatticeClass(tuple(cur))
            return
        for perm in per_block[i]:
            nxt = cur[:]
            for p, v in zip(blocks[i], perm):
                nxt[p] = v
            yield from rec(i + 1, nxt)

    yield from rec(0, coords)


def all_numexc(n: int, limit: int) -> list[LatticeClass]:
    """Every numerical exceptional class with |degree| <= limit, sorted by coordinates."""
    blocks = full_blocks(n)
    out = [y for x in numexc_reps(n, limit, blocks) for y in expand_orbit(x, blocks)]
    out.sort(key=lambda c: c.coords)
    return out


def violator_degree_bound(h: LatticeClass, normal: LatticeClass, a_min: int,
                          x: LatticeClass, c_max: int, s: int = 1) -> int | None:
    """Bound |alpha.h| over alpha^2 = -s, alpha.normal >= a_min, alpha.x <= c_max <= 0.

    Returns -1 when the set is provably empty and None when no bound follows
    (the normal and x must lie in the closed positive cone, x timelike).
    Writing a = alpha.normal and c = alpha.x, projecting alpha to the plane
    spanned by normal and x gives a^2 x^2 - 2ac (normal.x) + c^2 normal^2 <= s*disc,
    which bounds a and |c|; the orthogonal part is then controlled on the
    negative definite complement of v = normal + x.
    """
    if a_min < 0 or c_max > 0:
        return None
    n2, x2, nx = pairing(normal, normal), pairing(x, x), pairing(normal, x)
    if x2 <= 0 or n2 < 0 or nx <= 0:
        return None
    disc = nx * nx - n2 * x2
    a_hi = floor_sqrt(Fraction(s * disc, x2))
    if n2 > 0:
        c_hi = floor_sqrt(Fraction(s * disc, n2))
    elif a_min >= 1:
        c_hi = s * disc // (2 * a_min * nx)
    else:
        return None
    if a_hi < a_min or c_hi < -c_max:
        return -1
    t = a_hi + c_hi
    v = normal + x
    v2, hv = pairing(v, v), abs(pairing(h, v))
    first = Fraction(t * hv, v2)
    second = (s + Fraction(t * t, v2)) * (Fraction(hv * hv, v2) - pairing(h, h))
    return int(first) + (first.denominator != 1) + ceil_sqrt(second)
