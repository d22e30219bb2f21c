"""Rough intervals, status partitions and type-2 fuzzy frequencies.

``lb(f)`` holds the objects with positive evidence for f and ``ub(f)`` the
objects without negative evidence, so ``ub(f)`` is the complement of
``lb(-f)``. Nothing forces ``lb <= ub``: contradictory evidence puts an
object in lb but not in ub.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import expr as E
from .errors import EmptyUniverse, UniverseMismatch
from .logic4 import Status
from .world import EvidenceWorld, evidence_bits

__all__ = [
    "EvidenceWorld", "RoughInterval", "FuzzyInterval", "Partition",
    "rough_of_formula", "rough_meet", "rough_join", "status_partition",
    "fuzzy_interval", "fuzzy_meet", "fuzzy_join", "prob_of", "conditional",
]


@dataclass(frozen=True)
class RoughInterval:
    universe: tuple[str, ...]
    lb: frozenset[str]
    ub: frozenset[str]

    def _check(self, other: "RoughInterval"):
        if self.universe != other.universe:
            raise UniverseMismatch("rough intervals over different universes")

    def __str__(self):
        order = {o: i for i, o in enumerate(self.universe)}

        def fmt(s):
            return "{" + ",".join(sorted(s, key=order.__getitem__)) + "}"
        return f"[{fmt(self.lb)}, {fmt(self.ub)}]"


def rough_of_formula(w: EvidenceWorld, f: E.Formula, base: np.ndarray | None = None,
                     resolve=None) -> RoughInterval:
    """[lb, ub] of ``f``. A ``base`` mask restricts both bounds to that class."""
    pos, neg = evidence_bits(w, f, base=base, resolve=resolve)
    ub = ~neg
    if base is not None:
        pos, ub = pos & base, ub & base
    return RoughInterval(w.objects, w.objects_of(pos), w.objects_of(ub))


def rough_meet(a: RoughInterval, b: RoughInterval) -> RoughInterval:
    """Intersects the lower bounds and unions the upper bounds."""
    a._check(b)
    return RoughInterval(a.universe, a.lb & b.lb, a.ub | b.ub)


def rough_join(a: RoughInterval, b: RoughInterval) -> RoughInterval:
    """Unions the lower bounds and intersects the upper bounds."""
    a._check(b)
    return RoughInterval(a.universe, a.lb | b.lb, a.ub & b.ub)


class Partition(NamedTuple):
    true: frozenset[str]
    false: frozenset[str]
    both: frozenset[str]
    neither: frozenset[str]

    def by_status(self) -> dict[Status, frozenset[str]]:
        return {Status.PLUS: self.true, Status.MINUS: self.false,
                Status.BOTH: self.both, Status.NEITHER: self.neither}


def status_partition(w: EvidenceWorld, p: str | E.Formula, resolve=None) -> Partition:
    """Split the objects by the status of atom (or formula) ``p``."""
    if isinstance(p, str):
        pos, neg = w.atom_bits(p)
    else:
        pos, neg = evidence_bits(w, p, resolve=resolve)
    return Partition(w.objects_of(pos & ~neg), w.objects_of(~pos & neg),
                     w.objects_of(pos & neg), w.objects_of(~pos & ~neg))


@dataclass(frozen=True)
class FuzzyInterval:
    """Relative frequencies ``lo_count/n`` and ``hi_count/n`` kept unreduced."""
    lo_count: int
    hi_count: int
    n: int

    @property
    def lo(self) -> Fraction:
        return Fraction(self.lo_count, self.n)

    @property
    def hi(self) -> Fraction:
        return Fraction(self.hi_count, self.n)

    def __str__(self):
        return f"{self.lo_count}/{self.n} {self.hi_count}/{self.n}"


def _need_objects(w: EvidenceWorld):
    if w.n == 0:
        raise EmptyUniverse("the world has no objects")


def fuzzy_interval(w: EvidenceWorld, f: E.Formula, resolve=None) -> FuzzyInterval:
    """[|lb(f)|/n, (n - |lb(-f)|)/n]; the upper end may sit below the lower."""
    _need_objects(w)
    pos, _ = evidence_bits(w, f, resolve=resolve)
    neg_lb, _ = evidence_bits(w, E.PseudoComp(f), resolve=resolve)
    return FuzzyInterval(int(pos.sum()), w.n - int(neg_lb.sum()), w.n)


def fuzzy_meet(a: FuzzyInterval, b: FuzzyInterval) -> FuzzyInterval:
    if a.n != b.n:
        raise UniverseMismatch("fuzzy intervals over different universes")
    return FuzzyInterval(min(a.lo_count, b.lo_count), min(a.hi_count, b.hi_count), a.n)


def fuzzy_join(a: FuzzyInterval, b: FuzzyInterval) -> FuzzyInterval:
    if a.n != b.n:
        raise UniverseMismatch("fuzzy intervals over different universes")
    return FuzzyInterval(max(a.lo_count, b.lo_count), max(a.hi_count, b.hi_count), a.n)


def prob_of(w: EvidenceWorld, f: E.Formula, resolve=None) -> Fraction:
    _need_objects(w)
    pos, _ = evidence_bits(w, f, resolve=resolve)
    return Fraction(int(pos.sum()), w.n)


def prob_of_set(w: EvidenceWorld, objs: frozenset[str]) -> Fraction:
    _need_objects(w)
    return Fraction(len(objs), w.n)


def conditional(x: E.Formula, y: E.Formula) -> E.Formula:
    """x -> y built as ``~x | (x & y)``.

    Its minimal models are (x unprovable) and (x, y both provable). Over all
    evidence-bit models it has the same positive extent as ``~x | y``.
    """
    return E.Union(E.BoolComp(x), E.Inter(x, y))
