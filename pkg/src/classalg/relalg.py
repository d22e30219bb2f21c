"""Finite relation algebra over a fixed object universe.

Composition is the existential (monoid) product: x(R.S)y iff some z has
xRz and zSy. Matrices are immutable; every operation returns a new one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import UniverseMismatch, UnknownProperty


@dataclass(frozen=True, eq=False)
class RelationMatrix:
    universe: tuple[str, ...]
    bits: np.ndarray

    def __post_init__(self):
        b = np.array(self.bits, dtype=bool)
        n = len(self.universe)
        if b.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @classmethod
    def from_pairs(cls, universe: Iterable[str], pairs: Iterable[tuple[str, str]]):
        universe = tuple(universe)
        idx = {o: i for i, o in enumerate(universe)}
        b = np.zeros((len(universe), len(universe)), dtype=bool)
        for x, y in pairs:
            try:
                b[idx[x], idx[y]] = True
            except KeyError as exc:
                raise UniverseMismatch(f"{exc.args[0]!r} is not in the universe") from None
        return cls(universe, b)

    @property
    def n(self) -> int:
        return len(self.universe)

    def pairs(self) -> list[tuple[str, str]]:
        u = self.universe
        return [(u[i], u[j]) for i, j in zip(*np.nonzero(self.bits))]

    def image(self, i: int) -> np.ndarray:
        return self.bits[i]

    def __eq__(self, other):
        if not isinstance(other, RelationMatrix):
            return NotImplemented
        return self.universe == other.universe and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.universe, self.bits.tobytes()))

    def __le__(self, other: "RelationMatrix") -> bool:
        _same(self, other)
        return not np.any(self.bits & ~other.bits)

    def grid(self) -> str:
        """0/1 grid with a header row of object names."""
        width = max((len(o) for o in self.universe), default=0)
        lines = [" " * width + " " + " ".join(self.universe)]
        for name, row in zip(self.universe, self.bits):
            cells = " ".join(str(int(v)).rjust(len(c)) for v, c in zip(row, self.universe))
            lines.append(name.ljust(width) + " " + cells)
        return "\n".join(lines)


def _same(*rels: RelationMatrix) -> tuple[str, ...]:
    u = rels[0].universe
    for r in rels[1:]:
        if r.universe != u:
            raise UniverseMismatch("relations are over different universes")
    return u


def identity(universe: Iterable[str]) -> RelationMatrix:
    universe = tuple(universe)
    return RelationMatrix(universe, np.eye(len(universe), dtype=bool))


def full(universe: Iterable[str]) -> RelationMatrix:
    universe = tuple(universe)
    return RelationMatrix(universe, np.ones((len(universe),) * 2, dtype=bool))


def empty(universe: Iterable[str]) -> RelationMatrix:
    universe = tuple(universe)
    return RelationMatrix(universe, np.zeros((len(universe),) * 2, dtype=bool))


def union(r: RelationMatrix, s: RelationMatrix) -> RelationMatrix:
    return RelationMatrix(_same(r, s), r.bits | s.bits)


def inter(r: RelationMatrix, s: RelationMatrix) -> RelationMatrix:
    return RelationMatrix(_same(r, s), r.bits & s.bits)


def complement(r: RelationMatrix) -> RelationMatrix:
    return RelationMatrix(r.universe, ~r.bits)


def _product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.uint8) @ b.astype(np.uint8)) > 0


def compose(r: RelationMatrix, s: RelationMatrix) -> RelationMatrix:
    return RelationMatrix(_same(r, s), _product(r.bits, s.bits))


def inverse(r: RelationMatrix) -> RelationMatrix:
    return RelationMatrix(r.universe, r.bits.T)


def right_residual(r: RelationMatrix, s: RelationMatrix) -> RelationMatrix:
    """R\\S: x(R\\S)y iff every z with zRx has zSy."""
    return RelationMatrix(_same(r, s), ~_product(r.bits.T, ~s.bits))


def left_residual(s: RelationMatrix, r: RelationMatrix) -> RelationMatrix:
    """S/R: y(S/R)x iff every z with xRz has ySz."""
    return RelationMatrix(_same(r, s), ~_product(~s.bits, r.bits.T))


def triangle_right(x: RelationMatrix, z: RelationMatrix) -> RelationMatrix:
    """x |> z = ~(x \\ ~z)."""
    return complement(right_residual(x, complement(z)))


def triangle_left(z: RelationMatrix, y: RelationMatrix) -> RelationMatrix:
    """z <| y = ~(~z / y)."""
    return complement(left_residual(complement(z), y))


def kleene_star(r: RelationMatrix) -> RelationMatrix:
    """Reflexive-transitive closure, the least fixpoint of X = I | R.X."""
    x = np.eye(r.n, dtype=bool)
    while True:
        nxt = x | _product(r.bits, x)
        if np.array_equal(nxt, x):
            return RelationMatrix(r.universe, x)
        x = nxt


# --- Table of relation properties -------------------------------------------

def _props(r: RelationMatrix) -> dict[str, bool]:
    R = r.bits
    Rt = R.T
    n = r.n
    I = np.eye(n, dtype=bool)
    ONE = np.ones((n, n), dtype=bool)

    def le(a, b):
        return not np.any(a & ~b)

    def eq(a, b):
        return np.array_equal(a, b)

    def zero(a):
        return not np.any(a)

    rr = _product(R, R)
    p = {
        "functional": le(_product(Rt, R), I),
        "left-total": le(I, _product(R, Rt)),
        "injective": le(_product(R, Rt), I),
        "surjective": le(I, _product(Rt, R)),
        "bijection": eq(_product(Rt, R), I) and eq(_product(R, Rt), I),
        "transitive": le(rr, R),
        "reflexive": le(I, R),
        "coreflexive": le(R, I),
        "irreflexive": zero(R & I),
        "symmetric": eq(Rt, R),
        "antisymmetric": le(R & Rt, I),
        "asymmetric": zero(R & Rt),
        "total": eq(R | Rt, ONE),
        "connex": eq(I | R | Rt, ONE),
        "idempotent": eq(rr, R),
    }
    off = R & ~I
    p["dense"] = le(off, _product(off, off))
    p["function"] = p["functional"] and p["left-total"]
    p["preorder"] = p["transitive"] and p["reflexive"]
    p["equivalence"] = p["preorder"] and p["symmetric"]
    p["partial order"] = p["preorder"] and p["antisymmetric"]
    p["total order"] = p["partial order"] and p["total"]
    p["strict partial order"] = p["transitive"] and p["irreflexive"]
    p["strict total order"] = p["strict partial order"] and p["connex"]
    return p


PROPERTIES: tuple[str, ...] = (
    "functional", "left-total", "function", "injective", "surjective",
    "bijection", "transitive", "reflexive", "coreflexive", "irreflexive",
    "symmetric", "antisymmetric", "asymmetric", "total", "connex",
    "idempotent", "preorder", "equivalence", "partial order", "total order",
    "strict partial order", "strict total order", "dense",
)


def check_property(r: RelationMatrix, prop: str) -> bool:
    if prop not in PROPERTIES:
        raise UnknownProperty(prop)
    return _props(r)[prop]


def all_properties(r: RelationMatrix) -> dict[str, bool]:
    p = _props(r)
    return {name: p[name] for name in PROPERTIES}


# --- maximal bicliques ------------------------------------------------------

@dataclass(frozen=True)
class Biclique:
    dom: tuple[str, ...]
    rng: tuple[str, ...]

    def __str__(self):
        return "{" + ",".join(self.dom) + "} x {" + ",".join(self.rng) + "}"


def _concepts(rows: list[int], m: int) -> list[tuple[int, int]]:
    """All formal concepts (extent mask, intent mask) by close-by-one."""
    n = len(rows)
    all_cols = (1 << m) - 1
    cols = [sum(1 << i for i in range(n) if rows[i] >> j & 1) for j in range(m)]

    def intent(ext: int) -> int:
        b = all_cols
        i = 0
        while ext:
            if ext & 1:
                b &= rows[i]
            ext >>= 1
            i += 1
        return b

    out: list[tuple[int, int]] = []

    def cbo(ext: int, itt: int, start: int):
        out.append((ext, itt))
        for j in range(start, m):
            if itt >> j & 1:
                continue
            new_ext = ext & cols[j]
            new_int = intent(new_ext)
            low = (1 << j) - 1
            if new_int & low == itt & low:
                cbo(new_ext, new_int, j + 1)

    top = (1 << n) - 1
    cbo(top, intent(top), 0)
    return out


def max_bicliques(r: RelationMatrix) -> list[Biclique]:
    """Every inclusion-maximal biclique D x E of ``r`` (D, E nonempty).

    Sorted by descending |D|, then D and E lexicographically by universe position.
    """
    n = r.n
    rows = [sum(1 << j for j in range(n) if r.bits[i, j]) for i in range(n)]
    found = []
    for ext, itt in _concepts(rows, n):
        if ext and itt:
            d = tuple(i for i in range(n) if ext >> i & 1)
            e = tuple(j for j in range(n) if itt >> j & 1)
            found.append((-len(d), d, e))
    found.sort()
    u = r.universe
    return [Biclique(tuple(u[i] for i in d), tuple(u[j] for j in e)) for _, d, e in found]


def biclique_union(universe: tuple[str, ...], bicliques: Iterable[Biclique]) -> RelationMatrix:
    return RelationMatrix.from_pairs(universe, [(x, y) for b in bicliques for x in b.dom for y in b.rng])
