"""Anticanonical cycles at lattice level, with blowup and blowdown builders."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Any, Sequence

from .lattice import (
    IntegerIsometry,
    LatticeClass,
    SubLattice,
    canonical_class,
    exceptional,
    is_negative_definite,
    orthogonal_complement,
    pairing,
)

BASES = {
    "nodal_cubic": (3,),
    "line_conic": (1, 2),
    "triangle": (1, 1, 1),
}


class InvalidPair(ValueError):
    pass


@dataclass(frozen=True)
class HistoryStep:
    op: str  # "corner" or "interior"
    index: int


@dataclass(frozen=True)
class CyclePair:
    n: int
    components: tuple[LatticeClass, ...]
    orientation: bool = True
    declared_minus_two: tuple[LatticeClass, ...] = ()
    history: tuple[HistoryStep, ...] | None = None
    base: str = "nodal_cubic"
    asserted_roots: tuple[LatticeClass, ...] = ()
    plane_marking: bool | None = None

    def __post_init__(self):
        for name in ("components", "declared_minus_two", "asserted_roots"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.history is not None:
            object.__setattr__(self, "history", tuple(self.history))

    @property
    def r(self) -> int:
        return len(self.components)

    @property
    def boundary(self) -> LatticeClass:
        """The class of the whole cycle, sum of the components."""
        total = LatticeClass((0,) * (self.n + 1))
        for c in self.components:
            total = total + c
        return total

    @property
    def canonical(self) -> LatticeClass:
        return canonical_class(self.n)

    @property
    def self_intersections(self) -> tuple[int, ...]:
        return tuple(c.square() for c in self.components)

    @property
    def has_plane_marking(self) -> bool:
        """Whether h is the pullback of a line, so h is nef.

        Defaults to true exactly when the pair carries a replayable history.
        """
        if self.plane_marking is not None:
            return self.plane_marking
        return self.history is not None

    def gram(self) -> list[list[int]]:
        return [[pairing(a, b) for b in self.components] for a in self.components]

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "n": self.n,
            "components": [c.to_json() for c in self.components],
            "orientation": self.orientation,
            "declared_minus_two": [c.to_json() for c in self.declared_minus_two],
        }
        if self.history is not None:
            out["history"] = [{"op": s.op, "index": s.index} for s in self.history]
            if self.base != "nodal_cubic":
                out["base"] = self.base
        if self.asserted_roots:
            out["asserted_roots"] = [c.to_json() for c in self.asserted_roots]
        if self.plane_marking is not None:
            out["plane_marking"] = self.plane_marking
        return out


def _pad(x: LatticeClass) -> LatticeClass:
    return LatticeClass(x.coords + (0,))


def base_pair(base: str = "nodal_cubic") -> CyclePair:
    """A plane cubic cycle on Z^{1,0}: a nodal cubic, a line plus conic, or three lines."""
    if base not in BASES:
        raise InvalidPair(f"unknown base configuration {base!r}")
    comps = tuple(LatticeClass((d,)) for d in BASES[base])
    return CyclePair(0, comps, history=(), base=base)


def validate(pair: CyclePair) -> list[str]:
    out: list[str] = []
    n = pair.n
    for name, classes in (("component", pair.components), ("declared", pair.declared_minus_two),
                          ("asserted root", pair.asserted_roots)):
        for i, c in enumerate(classes):
            if c.n != n:
                out.append(f"{name} {i}: lives in Z^(1,{c.n}), expected n = {n}")
    if out:
        return out
    r = pair.r
    if r == 0:
        return ["cycle has no components"]
    k = canonical_class(n)
    if pair.boundary != -k:
        out.append("anticanonical: sum of components differs from -K")
    comps = pair.components
    if r == 1:
        pass
    elif r == 2:
        if pairing(comps[0], comps[1]) != 2:
            out.append(f"adjacency: components 0,1 meet with multiplicity "
                       f"{pairing(comps[0], comps[1])}, expected 2")
    else:
        for i in range(r):
            for j in range(i + 1, r):
                adjacent = j == i + 1 or (i == 0 and j == r - 1)
                want = 1 if adjacent else 0
                got = pairing(comps[i], comps[j])
                if got != want:
                    out.append(f"adjacency: components {i},{j} pair to {got}, expected {want}")
    total = pair.boundary
    for i, d in enumerate(pair.declared_minus_two):
        if d.square() != -2:
            out.append(f"declared {i}: square {d.square()}, expected -2")
        if pairing(d, k) != 0:
            out.append(f"declared {i}: pairs {pairing(d, k)} with K, expected 0")
        if pairing(d, total) != 0:
            out.append(f"declared {i}: pairs {pairing(d, total)} with the cycle, expected 0")
    for i, b in enumerate(pair.asserted_roots):
        if b.square() != -2:
            out.append(f"asserted root {i}: square {b.square()}, expected -2")
        for j, c in enumerate(comps):
            if pairing(b, c) != 0:
                out.append(f"asserted root {i}: pairs {pairing(b, c)} with component {j}")
    if pair.history is not None:
        try:
            replayed = replay(pair.history, pair.base)
        except (InvalidPair, IndexError) as exc:
            out.append(f"history: replay failed ({exc})")
        else:
            if replayed.n != n or replayed.components != comps:
                out.append("history: replay does not reproduce the stored components")
    return out


def _require_valid(pair: CyclePair) -> None:
    problems = validate(pair)
    if problems:
        raise InvalidPair("; ".join(problems))


def replay(history: Sequence[HistoryStep], base: str = "nodal_cubic") -> CyclePair:
    pair = base_pair(base)
    for step in history:
        if step.op == "corner":
            pair = corner_blowup(pair, step.index)
        elif step.op == "interior":
            pair, _ = interior_blowup(pair, step.index)
        else:
            raise InvalidPair(f"unknown history op {step.op!r}")
    return pair


def _grown(pair: CyclePair, comps: list[LatticeClass], step: HistoryStep) -> CyclePair:
    history = None if pair.history is None else pair.history + (step,)
    return replace(
        pair,
        n=pair.n + 1,
        components=tuple(comps),
        declared_minus_two=tuple(_pad(d) for d in pair.declared_minus_two),
        asserted_roots=tuple(_pad(b) for b in pair.asserted_roots),
        history=history,
    )


def interior_blowup(pair: CyclePair, component_index: int) -> tuple[CyclePair, LatticeClass]:
    """Blow up a smooth point of one component; returns the pair and e_{n+1}."""
    if not 0 <= component_index < pair.r:
        raise IndexError(f"no component {component_index} in a cycle of length {pair.r}")
    n1 = pair.n + 1
    e = exceptional(n1, n1)
    comps = [_pad(c) for c in pair.components]
    comps[component_index] = comps[component_index] - e
    return _grown(pair, comps, HistoryStep("interior", component_index)), e


def corner_blowup(pair: CyclePair, edge_index: int) -> CyclePair:
    """Blow up the node between components i and i+1 (mod r).

    For r = 1 the node of the single nodal component is blown up and the
    cycle becomes [D - 2e, e].
    """
    r = pair.r
    n1 = pair.n + 1
    e = exceptional(n1, n1)
    comps = [_pad(c) for c in pair.components]
    if r == 1:
        if edge_index != 0:
            raise IndexError("a one-component cycle has a single node, edge 0")
        comps = [comps[0] - 2 * e, e]
    else:
        if not 0 <= edge_index < r:
            raise IndexError(f"no edge {edge_index} in a cycle of length {r}")
        i, j = edge_index, (edge_index + 1) % r
        comps[i] = comps[i] - e
        comps[j] = comps[j] - e
        comps.insert(edge_index + 1, e)
    return _grown(pair, comps, HistoryStep("corner", edge_index))


def _drop_last(x: LatticeClass) -> LatticeClass:
    return LatticeClass(x.coords[:-1])


def _drop(x: LatticeClass, j: int) -> LatticeClass:
    return LatticeClass(x.coords[:j] + x.coords[j + 1:])


def contract_minus_one_component(pair: CyclePair, component_index: int,
                                 witness: IntegerIsometry | str = "history") -> CyclePair:
    """Blow down a (-1)-component of the cycle.

    The witness is either an ambient isometry taking the component to e_n,
    or the string "history", accepted when the component is literally a
    basis class e_j (then e_j and e_n are swapped).
    """
    _require_valid(pair)
    if not 0 <= component_index < pair.r:
        raise IndexError(f"no component {component_index}")
    comp = pair.components[component_index]
    if comp.square() != -1:
        raise InvalidPair(f"component {component_index} has square {comp.square()}, not -1")
    if pair.r == 1:
        raise InvalidPair("cannot contract the only component of the cycle")
    n = pair.n
    if isinstance(witness, IntegerIsometry):
        g = witness
        if g.n != n or g(comp) != exceptional(n, n):
            raise InvalidPair("witness isometry does not send the component to e_n")
    elif witness == "history":
        nz = [i for i, c in enumerate(comp.coords) if c]
        if len(nz) != 1 or nz[0] == 0 or comp.coords[nz[0]] != 1:
            raise InvalidPair("no usable witness: the component is not a basis class e_j")
        j = nz[0]
        perm = list(range(n + 1))
        perm[j], perm[n] = perm[n], perm[j]
        g = IntegerIsometry(tuple(tuple(int(perm[c] == r) for c in range(n + 1))
                                  for r in range(n + 1)))
    else:
        raise InvalidPair("no usable witness supplied")

    comps = [_drop_last(g(c)) for i, c in enumerate(pair.components) if i != component_index]
    declared = tuple(_drop_last(g(d)) for d in pair.declared_minus_two)
    roots = tuple(_drop_last(g(b)) for b in pair.asserted_roots)
    history = None
    if pair.history and pair.history[-1].op == "corner" and comp == exceptional(n, n):
        candidate = pair.history[:-1]
        if replay(candidate, pair.base).components == tuple(comps):
            history = candidate
    out = replace(pair, n=n - 1, components=tuple(comps), declared_minus_two=declared,
                  asserted_roots=roots, history=history,
                  plane_marking=pair.plane_marking if history is None else None)
    _require_valid(out)
    return out


def contract_exceptional(pair: CyclePair, j: int) -> CyclePair:
    """Blow down e_j when it meets exactly one component once (inverse of interior_blowup)."""
    _require_valid(pair)
    n = pair.n
    e = exceptional(j, n)
    hits = [pairing(e, c) for c in pair.components]
    if sorted(hits) != [0] * (pair.r - 1) + [1]:
        raise InvalidPair(f"e_{j} does not meet exactly one component transversally")
    if any(pairing(e, d) for d in pair.declared_minus_two):
        raise InvalidPair(f"e_{j} meets a declared -2 class")
    comps = tuple(_drop(c, j) for c in pair.components)
    history = None
    if j == n and pair.history and pair.history[-1].op == "interior":
        candidate = pair.history[:-1]
        if replay(candidate, pair.base).components == comps:
            history = candidate
    out = replace(pair, n=n - 1, components=comps,
                  declared_minus_two=tuple(_drop(d, j) for d in pair.declared_minus_two),
                  asserted_roots=tuple(_drop(b, j) for b in pair.asserted_roots),
                  history=history,
                  plane_marking=pair.plane_marking if history is None else None)
    _require_valid(out)
    return out


@lru_cache(maxsize=256)
def lambda_lattice(pair: CyclePair) -> SubLattice:
    """The orthogonal complement of the cycle components."""
    return orthogonal_complement(pair.n, pair.components)


def in_lambda(pair: CyclePair, x: LatticeClass) -> bool:
    return x.n == pair.n and all(pairing(x, c) == 0 for c in pair.components)


class RegimeKind(enum.Enum):
    NOT_NEGATIVE_DEFINITE = "NotNegativeDefinite"
    K_SQUARE_MINUS_ONE = "KSquareMinusOne"
    DISTINGUISHED = "Distinguished"
    BOUNDED_ONLY = "BoundedOnly"


@dataclass(frozen=True)
class PairClassification:
    negative_definite: bool
    k_square: int
    has_minus_one_component: bool
    regime: RegimeKind
    distinguished: Any = None  # DistinguishedCertificate when regime is DISTINGUISHED

    @property
    def point(self) -> LatticeClass | None:
        return None if self.distinguished is None else self.distinguished.x

    def to_json(self) -> dict[str, Any]:
        out = {
            "negative_definite": self.negative_definite,
            "k_square": self.k_square,
            "has_minus_one_component": self.has_minus_one_component,
            "regime": self.regime.value,
        }
        if self.distinguished is not None:
            out["distinguished"] = self.distinguished.to_json()
        return out


def known_roots(pair: CyclePair) -> list[LatticeClass]:
    """Asserted roots plus declared -2 curves lying in the complement lattice."""
    seen: list[LatticeClass] = []
    for b in pair.asserted_roots + pair.declared_minus_two:
        if in_lambda(pair, b) and b.square() == -2 and b not in seen:
            seen.append(b)
    return seen


@lru_cache(maxsize=256)
def classify(pair: CyclePair) -> PairClassification:
    _require_valid(pair)
    negdef = is_negative_definite(pair.gram())
    k2 = 9 - pair.n
    minus_one = any(d == -1 for d in pair.self_intersections)
    cert = None
    if not negdef:
        regime = RegimeKind.NOT_NEGATIVE_DEFINITE
    elif k2 == -1:
        regime = RegimeKind.K_SQUARE_MINUS_ONE
    else:
        from .roots import find_R_distinguished

        cert = find_R_distinguished(pair, known_roots(pair))
        regime = RegimeKind.DISTINGUISHED if cert is not None else RegimeKind.BOUNDED_ONLY
    return PairClassification(negdef, k2, minus_one, regime, cert)


def pair_from_json(data: dict[str, Any]) -> CyclePair:
    n = int(data["n"])

    def classes(key):
        return tuple(LatticeClass(tuple(c)) for c in data.get(key, []))

    history = data.get("history")
    if history is not None:
        history = tuple(HistoryStep(str(s["op"]), int(s["index"])) for s in history)
    pair = CyclePair(
        n=n,
        components=classes("components"),
        orientation=bool(data.get("orientation", True)),
        declared_minus_two=classes("declared_minus_two"),
        history=history,
        base=str(data.get("base", "nodal_cubic")),
        asserted_roots=classes("asserted_roots"),
        plane_marking=data.get("plane_marking"),
    )
    _require_valid(pair)
    return pair


def load_pair(path: str | Path) -> CyclePair:
    with open(path, encoding="utf-8") as fh:
        return pair_from_json(json.load(fh))


def dump_pair(pair: CyclePair, path: str | Path, extra: dict[str, Any] | None = None) -> None:
    data = pair.to_json()
    if extra:
        data.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
