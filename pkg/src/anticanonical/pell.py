"""Pell equations, units of Z[sqrt D] and their action on rank-2 lattices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Sequence

from ._linalg import mat_mul, transpose


def _check_d(d: int) -> None:
    if d < 2 or isqrt(d) ** 2 == d:
        raise ValueError(f"D = {d} must be a nonsquare integer >= 2")


def sqrt_continued_fraction(d: int) -> tuple[int, list[int]]:
    """(a0, period) of the continued fraction of sqrt(d).

    Uses the integer recurrence P' = a Q - P, Q' = (d - P'^2) / Q and stops
    when the state (P, Q) repeats.
    """
    _check_d(d)
    a0 = isqrt(d)
    p, q, a = 0, 1, a0
    first = None
    period: list[int] = []
    while True:
        p = a * q - p
        q = (d - p * p) // q
        if (p, q) == first:
            return a0, period
        if first is None:
            first = (p, q)
        a = (a0 + p) // q
        period.append(a)


def _convergents(a0: int, period: list[int], count: int):
    p2, p1 = 0, 1
    q2, q1 = 1, 0
    terms = [a0] + [period[i % len(period)] for i in range(count - 1)]
    for a in terms:
        p2, p1 = p1, a * p1 + p2
        q2, q1 = q1, a * q1 + q2
        yield p1, q1


@dataclass(frozen=True)
class PellSolution:
    D: int
    a: int
    b: int
    minimal: bool = True

    def __post_init__(self):
        if self.a * self.a - self.D * self.b * self.b != 1:
            raise ValueError("not a solution of a^2 - D b^2 = 1")

    def power(self, k: int) -> tuple[int, int]:
        x, y = 1, 0
        for _ in range(k):
            x, y = x * self.a + self.D * y * self.b, x * self.b + y * self.a
        return x, y


def pell_fundamental(d: int) -> PellSolution:
    a0, period = sqrt_continued_fraction(d)
    ell = len(period)
    *_, (p, q) = _convergents(a0, period, ell if ell % 2 == 0 else 2 * ell)
    return PellSolution(d, p, q)


def pell_negative_solvable(d: int) -> tuple[bool, dict]:
    """Whether a^2 - D b^2 = -1 has a solution, with a witness or an obstruction."""
    a0, period = sqrt_continued_fraction(d)
    ell = len(period)
    if ell % 2 == 1:
        *_, (p, q) = _convergents(a0, period, ell)
        return True, {"kind": "witness", "a": p, "b": q}
    if d % 4 == 3:
        return False, {"kind": "mod4",
                       "detail": "a^2 - D b^2 = a^2 + b^2 mod 4, and -1 = 3 is not a sum of two squares mod 4"}
    return False, {"kind": "period-parity", "period": ell}


@dataclass(frozen=True)
class UnitAction:
    D: int
    unit: tuple[int, int]
    matrix: tuple[tuple[int, int], tuple[int, int]]

    def apply(self, coeffs: Sequence[int]) -> tuple[int, int]:
        (p, q), (r, s) = self.matrix
        n, m = coeffs
        return p * n + q * m, r * n + s * m


def unit_action(d: int, unit: tuple[int, int], form: Sequence[Sequence[int]]) -> UnitAction:
    """Matrix (columns are images of G_1, G_2) of multiplication by a + b sqrt D.

    The form must be diag(g1, g2) with g1 > 0 > g2 and -g2/g1 = D t^2 for a
    rational t; then g1 n^2 + g2 m^2 = g1 N(n + t m sqrt D).
    """
    a, b = unit
    if a * a - d * b * b != 1:
        raise ValueError(f"{a} + {b} sqrt {d} is not a unit of norm 1")
    (g1, off1), (off2, g2) = form
    if off1 or off2 or not (g1 > 0 > g2):
        raise ValueError("form is not of Pell type diag(g1, g2) with g1 > 0 > g2")
    t2 = Fraction(-g2, g1 * d)
    num, den = isqrt(t2.numerator), isqrt(t2.denominator)
    if num * num != t2.numerator or den * den != t2.denominator:
        raise ValueError("form is not a rational rescaling of the Pell form for this D")
    t = Fraction(num, den)
    upper, lower = d * b * t, b / t
    if upper.denominator != 1 or lower.denominator != 1:
        raise ValueError("non-integral scaling for this unit")
    m = ((a, int(upper)), (int(lower), a))
    g = [list(r) for r in form]
    if mat_mul(mat_mul(transpose(m), g), m) != g:
        raise AssertionError("unit action does not preserve the form")
    return UnitAction(d, (a, b), m)


def represent(form: Sequence[Sequence[int]], c: int, bound: int) -> list[tuple[int, int]]:
    """All (n, m) with |n|, |m| <= bound and q(n, m) = c, sorted."""
    (fa, fb), (fb2, fc) = form
    if fb != fb2:
        raise ValueError("Gram matrix must be symmetric")
    if fa * fc - fb * fb == 0:
        raise ValueError("degenerate binary form")
    out = set()
    for n in range(-bound, bound + 1):
        const = fa * n * n - c
        if fc == 0:
            lin = 2 * fb * n
            if lin and const % lin == 0 and abs(-const // lin) <= bound:
                out.add((n, -const // lin))
            elif not lin and const == 0:
                out.update((n, m) for m in range(-bound, bound + 1))
            continue
        disc = fb * fb * n * n - fc * const
        if disc < 0:
            continue
        r = isqrt(disc)
        if r * r != disc:
            continue
        for root in {r, -r}:
            num = -fb * n + root
            if num % fc == 0 and abs(num // fc) <= bound:
                out.add((n, num // fc))
    return sorted(out)
