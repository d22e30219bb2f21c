"""Finite evidence worlds and the two-bit evaluation of class formulas.

Every (object, atom) pair carries a positive and a negative evidence bit.
A formula evaluates, per object, to a pair of bits:

    atom p      pos = pos_p             neg = neg_p
    ~f          pos = not pos(f)        neg = not neg(f)
    -f          pos = neg(f)            neg = pos(f)
    f | g       pos = pos f or pos g    neg = neg f and neg g
    f & g       pos = pos f and pos g   neg = neg f or neg g
    U           pos = 1                 neg = 0
    0           pos = 0                 neg = 1
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from . import expr as E
from .errors import UnknownAtom, UnknownObject, UnsupportedOperator
from .relalg import RelationMatrix

Bits = tuple[np.ndarray, np.ndarray]


def atom_key(leaf: E.Formula) -> str:
    """Name of the evidence atom a leaf refers to (``p`` and ``@p`` coincide)."""
    if isinstance(leaf, (E.Ref, E.ClassRef)):
        return leaf.name
    raise TypeError(leaf)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=bool)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class EvidenceWorld:
    objects: tuple[str, ...]
    atoms: tuple[str, ...]
    pos: np.ndarray                   # shape (len(objects), len(atoms))
    neg: np.ndarray
    relations: Mapping[str, RelationMatrix] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "atoms", tuple(self.atoms))
        shape = (len(self.objects), len(self.atoms))
        for name in ("pos", "neg"):
            table = _frozen(getattr(self, name)).reshape(shape)
            object.__setattr__(self, name, table)
        object.__setattr__(self, "relations", dict(self.relations))
        object.__setattr__(self, "_obj_index", {o: i for i, o in enumerate(self.objects)})
        object.__setattr__(self, "_atom_index", {a: i for i, a in enumerate(self.atoms)})

    @classmethod
    def build(cls, objects: Iterable[str], atoms: Iterable[str],
              pos: Mapping[str, Iterable[str]] | None = None,
              neg: Mapping[str, Iterable[str]] | None = None,
              relations: Mapping[str, Iterable[tuple[str, str]]] | None = None):
        """Build from per-atom object lists and per-relation edge lists."""
        objects, atoms = tuple(objects), tuple(atoms)
        oi = {o: i for i, o in enumerate(objects)}
        ai = {a: i for i, a in enumerate(atoms)}
        tables = []
        for spec in (pos or {}, neg or {}):
            t = np.zeros((len(objects), len(atoms)), dtype=bool)
            for atom, objs in spec.items():
                if atom not in ai:
                    raise UnknownAtom(atom)
                for o in objs:
                    if o not in oi:
                        raise UnknownObject(o)
                    t[oi[o], ai[atom]] = True
            tables.append(t)
        rels = {name: RelationMatrix.from_pairs(objects, pairs)
                for name, pairs in (relations or {}).items()}
        return cls(objects, atoms, tables[0], tables[1], rels)

    @property
    def n(self) -> int:
        return len(self.objects)

    def object_index(self, o: str) -> int:
        try:
            return self._obj_index[o]
        except KeyError:
            raise UnknownObject(o) from None

    def atom_index(self, a: str) -> int:
        try:
            return self._atom_index[a]
        except KeyError:
            raise UnknownAtom(a) from None

    def atom_bits(self, a: str) -> Bits:
        j = self.atom_index(a)
        return self.pos[:, j], self.neg[:, j]

    def objects_of(self, mask: np.ndarray) -> frozenset[str]:
        return frozenset(o for o, m in zip(self.objects, mask) if m)

    def mask_of(self, objs: Iterable[str]) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        for o in objs:
            m[self.object_index(o)] = True
        return m

    def with_evidence(self, obj: str, atom: str, axis: str, value: bool = True) -> "EvidenceWorld":
        """Copy with one evidence bit changed; ``axis`` is ``"pos"`` or ``"neg"``."""
        if axis not in ("pos", "neg"):
            raise ValueError(f"axis must be 'pos' or 'neg', not {axis!r}")
        i, j = self.object_index(obj), self.atom_index(atom)
        pos, neg = self.pos.copy(), self.neg.copy()
        (pos if axis == "pos" else neg)[i, j] = value
        return EvidenceWorld(self.objects, self.atoms, pos, neg, self.relations)

    def with_atom(self, atom: str) -> "EvidenceWorld":
        """Copy with an extra atom carrying no evidence."""
        if atom in self._atom_index:
            return self
        z = np.zeros((self.n, 1), dtype=bool)
        return EvidenceWorld(self.objects, self.atoms + (atom,),
                             np.hstack([self.pos, z]), np.hstack([self.neg, z]),
                             self.relations)

    def __eq__(self, other):
        if not isinstance(other, EvidenceWorld):
            return NotImplemented
        return (self.objects == other.objects and self.atoms == other.atoms
                and np.array_equal(self.pos, other.pos)
                and np.array_equal(self.neg, other.neg)
                and self.relations == other.relations)

    def __hash__(self):
        return hash((self.objects, self.atoms, self.pos.tobytes(), self.neg.tobytes()))


LeafResolver = Callable[[E.Formula], Bits]


def evidence_bits(world: EvidenceWorld, f: E.Formula, *,
                  base: np.ndarray | None = None,
                  resolve: LeafResolver | None = None) -> Bits:
    """Positive and negative evidence vectors of ``f`` over all objects.

    ``base`` scopes the pseudo-complement: ``-f`` is then read as ``-_C f``
    with C the given object mask. ``resolve`` supplies bits for leaves the
    world cannot answer itself (subset atoms, ontology classes).
    """
    n = world.n
    ones, zeros = np.ones(n, dtype=bool), np.zeros(n, dtype=bool)

    def go(g) -> Bits:
        if isinstance(g, E.Univ):
            return ones, zeros
        if isinstance(g, E.Empty):
            return zeros, ones
        if isinstance(g, (E.Ref, E.ClassRef, E.SubsetAtom)):
            if resolve is not None:
                return resolve(g)
            if isinstance(g, E.SubsetAtom):
                raise UnknownAtom(E.to_text(g))
            return world.atom_bits(atom_key(g))
        if isinstance(g, E.BoolComp):
            p, q = go(g.arg)
            return ~p, ~q
        if isinstance(g, E.PseudoComp):
            p, q = go(g.arg)
            if base is None:
                return q, p
            return q & base, p | ~base
        if isinstance(g, E.Union):
            (p1, q1), (p2, q2) = go(g.left), go(g.right)
            return p1 | p2, q1 & q2
        if isinstance(g, E.Inter):
            (p1, q1), (p2, q2) = go(g.left), go(g.right)
            return p1 & p2, q1 | q2
        if isinstance(g, E.Selector):
            return go(E.Inter(g.base, g.cond))
        raise UnsupportedOperator(f"{type(g).__name__} has no evidence semantics on classes")

    return go(f)
