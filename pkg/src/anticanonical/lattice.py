"""Exact arithmetic on the odd unimodular lattice Z^{1,n}.

Classes are written in the basis (h, e_1, ..., e_n) with the diagonal form
(+1, -1, ..., -1).  Nothing in this module uses floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import _linalg as la


class DimensionMismatch(ValueError):
    pass


class IntegralityFailure(ValueError):
    pass


class DegenerateSpan(ValueError):
    pass


@dataclass(frozen=True, order=True)
class LatticeClass:
    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if not coords:
            raise ValueError("a class needs at least the h coordinate")
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    @property
    def degree(self) -> int:
        """Pairing with h."""
        return self.coords[0]

    def dot(self, other: "LatticeClass") -> int:
        return pairing(self, other)

    def square(self) -> int:
        return pairing(self, self)

    def __add__(self, other: "LatticeClass") -> "LatticeClass":
        _same_n(self, other)
        return LatticeClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "LatticeClass") -> "LatticeClass":
        _same_n(self, other)
        return LatticeClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "LatticeClass":
        return LatticeClass(tuple(-a for a in self.coords))

    def __mul__(self, k: int) -> "LatticeClass":
        return LatticeClass(tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def to_json(self) -> list[int]:
        return list(self.coords)

    def __str__(self) -> str:
        return format_class(self)

    @classmethod
    def parse(cls, text: str) -> "LatticeClass":
        """Parse a comma-separated coordinate list such as ``3,-1,-1``."""
        parts = [p for p in text.replace(" ", "").strip("[]").split(",") if p]
        return cls(tuple(int(p) for p in parts))


def _same_n(u: LatticeClass, v: LatticeClass) -> None:
    if len(u.coords) != len(v.coords):
        raise DimensionMismatch(f"classes live in Z^(1,{u.n}) and Z^(1,{v.n})")


def pairing(u: LatticeClass, v: LatticeClass) -> int:
    _same_n(u, v)
    a, b = u.coords, v.coords
    return a[0] * b[0] - sum(x * y for x, y in zip(a[1:], b[1:]))


def hyperplane(n: int) -> LatticeClass:
    return LatticeClass((1,) + (0,) * n)


def exceptional(i: int, n: int) -> LatticeClass:
    """The class e_i, 1 <= i <= n."""
    if not 1 <= i <= n:
        raise IndexError(f"e_{i} does not exist for n = {n}")
    c = [0] * (n + 1)
    c[i] = 1
    return LatticeClass(tuple(c))


def plane_class(n: int, d: int, mults: dict[int, int] | Sequence[int] = ()) -> LatticeClass:
    """d h - sum m_i e_i, with multiplicities given as a dict or a sequence."""
    c = [d] + [0] * n
    items = mults.items() if isinstance(mults, dict) else enumerate(mults, start=1)
    for i, m in items:
        c[i] -= m
    return LatticeClass(tuple(c))


def canonical_class(n: int) -> LatticeClass:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return LatticeClass((-3,) + (1,) * n)


def format_class(x: LatticeClass) -> str:
    terms = []
    for i, c in enumerate(x.coords):
        if c == 0:
            continue
        name = "h" if i == 0 else f"e{i}"
        terms.append((c, name))
    if not terms:
        return "0"
    out = ""
    for j, (c, name) in enumerate(terms):
        sign = "-" if c < 0 else ("+" if j else "")
        mag = abs(c)
        body = name if mag == 1 else f"{mag}{name}"
        out += (f" {sign} " if j else sign) + body
    return out.strip()


def reflect(x: LatticeClass, beta: LatticeClass) -> LatticeClass:
    """r_beta(x) = x + <x, beta> beta for a class of square -2."""
    if pairing(beta, beta) != -2:
        raise ValueError("reflection needs a class of square -2")
    return x + pairing(x, beta) * beta


def form_matrix(n: int) -> la.IntMatrix:
    return [[(1 if i == 0 else -1) if i == j else 0 for j in range(n + 1)] for i in range(n + 1)]


@dataclass(frozen=True)
class IntegerIsometry:
    """Integral isometry acting on coordinate columns: f(v) = M v."""

    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        k = len(m)
        if k == 0 or any(len(row) != k for row in m):
            raise ValueError("isometry matrix must be square and nonempty")
        j = form_matrix(k - 1)
        if la.mat_mul(la.mat_mul(la.transpose(m), j), m) != j:
            raise ValueError("matrix does not preserve the intersection form")
        if abs(la.det(m)) != 1:
            raise ValueError("isometry must have determinant +-1")

    @property
    def n(self) -> int:
        return len(self.matrix) - 1

    def __call__(self, x: LatticeClass) -> LatticeClass:
        if x.n != self.n:
            raise DimensionMismatch("isometry and class dimensions differ")
        return LatticeClass(tuple(la.mat_vec(self.matrix, x.coords)))

    def compose(self, other: "IntegerIsometry") -> "IntegerIsometry":
        """self after other."""
        return IntegerIsometry(tuple(map(tuple, la.mat_mul(self.matrix, other.matrix))))

    def inverse(self) -> "IntegerIsometry":
        # M^{-1} = J M^T J for an isometry of the diagonal form J
        j = form_matrix(self.n)
        inv = la.mat_mul(la.mat_mul(j, la.transpose(self.matrix)), j)
        return IntegerIsometry(tuple(map(tuple, inv)))

    @classmethod
    def identity(cls, n: int) -> "IntegerIsometry":
        return cls(tuple(map(tuple, la.identity(n + 1))))

    @classmethod
    def from_images(cls, images: Sequence[LatticeClass]) -> "IntegerIsometry":
        """Isometry sending the i-th basis vector to images[i]."""
        return cls(tuple(map(tuple, la.transpose([im.coords for im in images]))))

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.matrix]


def reflection_isometry(beta: LatticeClass) -> IntegerIsometry:
    n = beta.n
    basis = [LatticeClass(tuple(int(i == j) for j in range(n + 1))) for i in range(n + 1)]
    return IntegerIsometry.from_images([reflect(b, beta) for b in basis])


def preserves_positive_cone(f: IntegerIsometry) -> bool:
    h = hyperplane(f.n)
    return pairing(f(h), h) > 0


@dataclass(frozen=True)
class SubLattice:
    ambient_n: int
    basis: tuple[LatticeClass, ...]
    gram: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        basis = tuple(self.basis)
        object.__setattr__(self, "basis", basis)
        for b in basis:
            if b.n != self.ambient_n:
                raise DimensionMismatch("basis class outside the ambient lattice")
        if basis and la.rank([b.coords for b in basis]) != len(basis):
            raise ValueError("sublattice basis is linearly dependent")
        g = tuple(tuple(pairing(a, b) for b in basis) for a in basis)
        if self.gram and tuple(map(tuple, self.gram)) != g:
            raise ValueError("supplied Gram matrix disagrees with the basis")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def element(self, coeffs: Sequence[int]) -> LatticeClass:
        out = LatticeClass((0,) * (self.ambient_n + 1))
        for c, b in zip(coeffs, self.basis, strict=True):
            out = out + c * b
        return out

    def coordinates(self, x: LatticeClass) -> list[Fraction] | None:
        """Rational coordinates of x in the basis, or None if x is outside the span."""
        if not self.basis:
            return [] if x.is_zero() else None
        pivots = la._rref([b.coords for b in self.basis])[1]
        rows = [[b.coords[p] for b in self.basis] for p in pivots]
        coeffs = la.solve(rows, [x.coords[p] for p in pivots])
        recon = [sum(c * b.coords[i] for c, b in zip(coeffs, self.basis))
                 for i in range(self.ambient_n + 1)]
        return coeffs if recon == list(x.coords) else None

    def integer_coordinates(self, x: LatticeClass) -> list[int] | None:
        c = self.coordinates(x)
        if c is None or any(v.denominator != 1 for v in c):
            return None
        return [int(v) for v in c]

    def __contains__(self, x: LatticeClass) -> bool:
        return self.integer_coordinates(x) is not None

    def rebased(self, new_basis: Sequence[LatticeClass]) -> "SubLattice":
        """Same lattice in another basis; raises unless new_basis is a Z-basis of it."""
        change = []
        for b in new_basis:
            c = self.integer_coordinates(b)
            if c is None:
                raise ValueError(f"{b} is not in the lattice")
            change.append(c)
        if len(change) != self.rank or abs(la.det(change)) != 1:
            raise ValueError("classes do not form a basis of the lattice")
        return SubLattice(self.ambient_n, tuple(new_basis))

    def to_json(self) -> dict:
        return {"basis": [b.to_json() for b in self.basis], "gram": [list(r) for r in self.gram]}


def orthogonal_complement(ambient_n: int, classes: Iterable[LatticeClass]) -> SubLattice:
    """Saturated sublattice of classes orthogonal to every given class.

    The basis is the row Hermite normal form, so it is deterministic.
    """
    rows = []
    for c in classes:
        if c.n != ambient_n:
            raise DimensionMismatch("class outside the ambient lattice")
        rows.append([c.coords[0]] + [-x for x in c.coords[1:]])
    kernel = la.integer_kernel(rows, ambient_n + 1)
    return SubLattice(ambient_n, tuple(LatticeClass(tuple(r)) for r in kernel))


def leading_minors(gram: Sequence[Sequence[int]]) -> list[int]:
    k = len(gram)
    if any(len(r) != k for r in gram):
        raise ValueError("Gram matrix must be square")
    return [la.det([row[:j] for row in gram[:j]]) for j in range(1, k + 1)]


def is_negative_definite(gram: Sequence[Sequence[int]]) -> bool:
    neg = [[-x for x in row] for row in gram]
    return all(m > 0 for m in leading_minors(neg))


@dataclass(frozen=True)
class DiscriminantGroup:
    invariant_factors: tuple[int, ...]
    generator_lifts: tuple[tuple[Fraction, ...], ...]
    """Lifts in coordinates of the sublattice basis."""

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out


def discriminant_group(lattice: SubLattice) -> DiscriminantGroup:
    g = [list(r) for r in lattice.gram]
    if not g or la.det(g) == 0:
        raise DegenerateSpan("discriminant group of a degenerate lattice")
    s, _, v = la.smith(g)
    factors, lifts = [], []
    for i in range(len(g)):
        d = abs(s[i][i])
        if d == 1:
            continue
        factors.append(d)
        lifts.append(tuple(Fraction(v[r][i], d) for r in range(len(g))))
    return DiscriminantGroup(tuple(factors), tuple(lifts))


def _check_sublattice_isometry(a: Sequence[Sequence[int]], lattice: SubLattice) -> None:
    k = lattice.rank
    if len(a) != k or any(len(r) != k for r in a):
        raise ValueError("matrix size does not match the sublattice rank")
    g = [list(r) for r in lattice.gram]
    if la.mat_mul(la.mat_mul(la.transpose(a), g), a) != g:
        raise ValueError("matrix is not an isometry of the sublattice")


def acts_trivially_on_discriminant(a: Sequence[Sequence[int]], lattice: SubLattice) -> bool:
    """Whether A (columns = images of basis vectors) fixes the discriminant group."""
    _check_sublattice_isometry(a, lattice)
    disc = discriminant_group(lattice)
    for lift in disc.generator_lifts:
        moved = la.mat_vec(a, lift)
        if any((m - x).denominator != 1 for m, x in zip(moved, lift)):
            return False
    return True


def extend_isometry(a: Sequence[Sequence[int]], lattice: SubLattice,
                    fixed: Sequence[LatticeClass]) -> IntegerIsometry:
    """Extend A on the sublattice by the identity on the span of `fixed`."""
    _check_sublattice_isometry(a, lattice)
    n = lattice.ambient_n
    idx = la.independent_subset([c.coords for c in fixed])
    fixed_basis = [fixed[i] for i in idx]
    fixed_gram = [[pairing(x, y) for y in fixed_basis] for x in fixed_basis]
    if fixed_basis and la.det(fixed_gram) == 0:
        raise DegenerateSpan("the fixed classes span a degenerate sublattice")
    images = [lattice.element([a[r][c] for r in range(lattice.rank)]) for c in range(lattice.rank)]
    src = [b.coords for b in lattice.basis] + [c.coords for c in fixed_basis]
    dst = [im.coords for im in images] + [c.coords for c in fixed_basis]
    if len(src) != n + 1:
        raise DegenerateSpan("sublattice and fixed span do not fill the ambient space")
    p_inv = la.inverse(la.transpose(src))
    f = la.mat_mul(la.transpose(dst), p_inv)
    if any(x.denominator != 1 for row in f for x in row):
        raise IntegralityFailure("extension is not integral; A is not trivial on the discriminant group")
    return IntegerIsometry(tuple(tuple(int(x) for x in row) for row in f))
