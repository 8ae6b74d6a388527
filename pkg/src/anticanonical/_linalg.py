"""Small exact linear-algebra kernels over ZZ and QQ.

Matrices are lists of rows.  Everything here is exact; Fractions are used for
rational work and Python ints for integral work.  Smith forms come from sympy.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

IntMatrix = list[list[int]]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def ceil_sqrt(x: Fraction | int) -> int:
    """Smallest integer k >= 0 with k*k >= x (x >= 0)."""
    x = Fraction(x)
    if x <= 0:
        return 0
    k = isqrt(x.numerator // x.denominator)
    while k * k < x:
        k += 1
    return k


def floor_sqrt(x: Fraction | int) -> int:
    """Largest integer k >= 0 with k*k <= x (x >= 0)."""
    x = Fraction(x)
    if x <= 0:
        return 0
    k = isqrt(x.numerator // x.denominator)
    while (k + 1) * (k + 1) <= x:
        k += 1
    return k


def transpose(m: Sequence[Sequence[int]]) -> IntMatrix:
    return [list(r) for r in zip(*m)] if m else []


def mat_mul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def identity(k: int) -> IntMatrix:
    return [[int(i == j) for j in range(k)] for i in range(k)]


def det(m: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of an integer matrix."""
    a = [list(r) for r in m]
    k = len(a)
    if any(len(r) != k for r in a):
        raise ValueError("determinant of a non-square matrix")
    if k == 0:
        return 1
    sign, prev = 1, 1
    for i in range(k - 1):
        if a[i][i] == 0:
            for j in range(i + 1, k):
                if a[j][i] != 0:
                    a[i], a[j] = a[j], a[i]
                    sign = -sign
                    break
            else:
                return 0
        for j in range(i + 1, k):
            for c in range(i + 1, k):
                a[j][c] = (a[j][c] * a[i][i] - a[j][i] * a[i][c]) // prev
        prev = a[i][i]
    return sign * a[k - 1][k - 1]


def rank(rows: Sequence[Sequence]) -> int:
    return len(_rref(rows)[1])


def _rref(rows):
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return a, []
    ncols = len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a, pivots


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Unique solution of the square nonsingular system a x = b over QQ."""
    k = len(a)
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    red, piv = _rref(aug)
    if piv[:k] != list(range(k)) or (len(piv) > k):
        raise ValueError("singular system")
    return [red[i][k] for i in range(k)]


def inverse(a: Sequence[Sequence]) -> list[list[Fraction]]:
    k = len(a)
    aug = [list(row) + [int(i == j) for j in range(k)] for i, row in enumerate(a)]
    red, piv = _rref(aug)
    if piv[:k] != list(range(k)):
        raise ValueError("singular matrix")
    return [row[k:] for row in red[:k]]


def in_rational_span(rows: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    if not any(v):
        return True
    return rank(list(rows) + [list(v)]) == rank(rows)


def independent_subset(rows: Sequence[Sequence[int]]) -> list[int]:
    """Indices of a greedy maximal linearly independent subset, in order."""
    chosen: list[int] = []
    current = 0
    for i, r in enumerate(rows):
        if rank([rows[j] for j in chosen] + [r]) > current:
            chosen.append(i)
            current += 1
    return chosen


def integer_kernel(constraints: Sequence[Sequence[int]], width: int) -> IntMatrix:
    """Saturated basis (as rows) of {x in ZZ^width : c.x = 0 for every row c}.

    Column reduction of the constraint matrix with a tracked unimodular
    transform; transform rows that end up annihilated span the kernel.
    """
    m = len(constraints)
    rows = [[constraints[j][i] for j in range(m)] + [int(i == k) for k in range(width)]
            for i in range(width)]
    r = 0
    for c in range(m):
        for i in range(r + 1, width):
            if rows[i][c] == 0:
                continue
            a, b = rows[r][c], rows[i][c]
            g, s, t = xgcd(a, b)
            ag, bg = a // g, b // g
            ri, rr = rows[i], rows[r]
            rows[r] = [s * x + t * y for x, y in zip(rr, ri)]
            rows[i] = [bg * x - ag * y for x, y in zip(rr, ri)]
        if r < width and rows[r][c] != 0:
            r += 1
    kernel = [row[m:] for row in rows[r:]]
    return hermite_rows(kernel)


def hermite_rows(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Row Hermite normal form of a full-row-rank integer matrix.

    The row span is unchanged; pivots are positive and entries above each
    pivot are reduced into [0, pivot).  Zero rows are dropped.
    """
    a = [list(r) for r in rows]
    if not a:
        return []
    width = len(a[0])
    r = 0
    pivots = []
    for c in range(width):
        for i in range(r + 1, len(a)):
            if a[i][c] == 0:
                continue
            x, y = a[r][c], a[i][c]
            g, s, t = xgcd(x, y)
            xg, yg = x // g, y // g
            rr, ri = a[r], a[i]
            a[r] = [s * u + t * v for u, v in zip(rr, ri)]
            a[i] = [yg * u - xg * v for u, v in zip(rr, ri)]
        if r < len(a) and a[r][c] != 0:
            if a[r][c] < 0:
                a[r] = [-u for u in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [u - q * v for u, v in zip(a[i], a[r])]
            pivots.append(c)
            r += 1
            if r == len(a):
                break
    return [row for row in a if any(row)]


def smith(m: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (S, U, V) with U m V = S diagonal, via sympy."""
    s, u, v = smith_normal_decomp(Matrix(m), domain=ZZ)
    conv = lambda x: [[int(e) for e in x.row(i)] for i in range(x.rows)]
    return conv(s), conv(u), conv(v)


def invariant_factors(m: Sequence[Sequence[int]]) -> list[int]:
    s, _, _ = smith(m)
    k = min(len(s), len(s[0]) if s else 0)
    return [abs(s[i][i]) for i in range(k)]


def lcm_denominators(values) -> int:
    n = 1
    for v in values:
        d = Fraction(v).denominator
        n = n * d // gcd(n, d)
    return n
