"""IS-A hierarchies of named classes with intents, extents and classification.

A *primitive* class is an evidence atom: its definition is ``@C`` conjoined
with the definitions of its declared superclasses. A *defined* class carries
a user intent instead of the atom. Every disjunction inside an intent is also
registered as a hidden class ``_h<k>``.

Classification decides entailment between the normal forms of all definitions
(plus the builtins ``U`` and ``0``), merges equivalent classes under one
canonical name, and stores every strict ancestor as a parent so the hierarchy
is transitively closed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable

import numpy as np

from . import expr as E
from . import logic4 as L
from . import relalg as RA
from .errors import (CyclicDefinition, DuplicateName, LoadError, SortError,
                     UnknownObject, UnknownReference, UnsupportedOperator)
from .world import EvidenceWorld, evidence_bits

__all__ = ["ClassNode", "Ontology", "load_world", "canonical_ac"]

BUILTINS = ("U", "0")


@dataclass(frozen=True)
class _Decl:
    name: str
    parents: tuple[str, ...] = ()
    intent: E.Formula | None = None   # None for a primitive class
    hidden: bool = False


@dataclass(frozen=True)
class ClassNode:
    name: str
    definition: E.Formula
    intent: L.DNF
    extent: frozenset
    parents: frozenset
    children: frozenset
    hidden: bool = False
    aliases: tuple[str, ...] = ()
    source: E.Formula | None = None


def _fold(cls, items: list[E.Formula]) -> E.Formula:
    out = items[-1]
    for it in reversed(items[:-1]):
        out = cls(it, out)
    return out


def _leaves_as_classes(f: E.Formula, rel: bool = False) -> E.Formula:
    """Bare names in class position become ``@Name``; ``@U``/``@0`` become U/0."""
    if isinstance(f, E.Ref):
        return f if rel else _leaves_as_classes(E.ClassRef(f.name))
    if isinstance(f, E.ClassRef):
        if f.name == "U":
            return E.Univ()
        if f.name == "0":
            return E.Empty()
        return f
    if isinstance(f, E.SubsetAtom):
        return E.SubsetAtom(_leaves_as_classes(f.path, True), _leaves_as_classes(f.rhs))
    if isinstance(f, E.Selector):
        return E.Selector(_leaves_as_classes(f.base), _leaves_as_classes(f.cond))
    if isinstance(f, E.Compose):
        return E.Compose(_leaves_as_classes(f.left, True), _leaves_as_classes(f.right, True))
    if isinstance(f, (E.Inverse, E.Star)):
        return type(f)(_leaves_as_classes(f.arg, True))
    if isinstance(f, (E.Union, E.Inter)):
        return type(f)(_leaves_as_classes(f.left, rel), _leaves_as_classes(f.right, rel))
    if isinstance(f, (E.BoolComp, E.PseudoComp)):
        return type(f)(_leaves_as_classes(f.arg, rel))
    return f


def canonical_ac(f: E.Formula) -> E.Formula:
    """Flatten ``|``/``&`` chains, sort operands by text, and rebuild right-nested."""
    if isinstance(f, (E.Union, E.Inter)):
        op = type(f)
        items: list[E.Formula] = []

        def flat(g):
            if isinstance(g, op):
                flat(g.left)
                flat(g.right)
            else:
                items.append(canonical_ac(g))
        flat(f)
        items.sort(key=E.to_text)
        return _fold(op, items)
    if isinstance(f, (E.BoolComp, E.PseudoComp)):
        return type(f)(canonical_ac(f.arg))
    return f


@dataclass(frozen=True, eq=False)
class Ontology:
    """Immutable snapshot; every update returns a new ontology."""
    world: EvidenceWorld
    decls: tuple[_Decl, ...] = ()
    upper: bool = False
    next_hidden: int = 1
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {d.name: d for d in self.decls})

    @classmethod
    def over(cls, objects: Iterable[str], relations=None) -> "Ontology":
        return cls(EvidenceWorld.build(objects, (), relations=relations))

    # --- declarations ---------------------------------------------------------

    def __contains__(self, name: str) -> bool:
        return name in self._index or name in BUILTINS

    @property
    def names(self) -> list[str]:
        return [d.name for d in self.decls]

    def _prepare(self, intent: str | E.Formula) -> E.Formula:
        f = E.parse(intent) if isinstance(intent, str) else intent
        f = _leaves_as_classes(f)
        if E.sort_of(f) is E.Sort.RELATION:
            raise SortError("an intent must denote a class", 0)
        self._check_refs(f)
        return f

    def _check_refs(self, f: E.Formula, rel: bool = False):
        if isinstance(f, E.ClassRef):
            if f.name not in self._index:
                raise UnknownReference(f"unknown class @{f.name}")
        elif isinstance(f, E.Ref):
            if f.name not in self.world.relations:
                raise UnknownReference(f"unknown relation {f.name}")
        else:
            for c in E.children(f):
                self._check_refs(c)

    def add_class(self, name: str, intent: str | E.Formula | None = None,
                  parents: Iterable[str] = ()) -> "Ontology":
        """New ontology with class ``name``; without ``intent`` it is primitive."""
        if name in self or name.startswith("_"):
            raise DuplicateName(name) if name in self else ValueError(
                f"{name!r}: names starting with '_' are reserved for hidden classes")
        parents = tuple(parents)
        for p in parents:
            if p not in self._index:
                raise UnknownReference(f"unknown class @{p}")
        world = self.world
        if intent is None:
            return replace(self, world=world.with_atom(name),
                           decls=self.decls + (_Decl(name, parents),))
        f = self._prepare(intent)
        decls, nxt = self._hidden_for(f)
        return replace(self, decls=self.decls + decls + (_Decl(name, parents, f),),
                       next_hidden=nxt)

    def _hidden_for(self, f: E.Formula) -> tuple[tuple[_Decl, ...], int]:
        t = L.tseytin(f)
        decls, k = [], self.next_hidden
        for h, (op, _) in t.definitions.items():
            if op == "or":
                decls.append(_Decl(f"_h{k}", (), _leaves_as_classes(t.expand(h)), True))
                k += 1
        return tuple(decls), k

    def set_intent(self, name: str, intent: str | E.Formula) -> "Ontology":
        """Turn primitive class ``name`` into a defined one (intents are add-only)."""
        d = self._decl(name)
        if d.intent is not None:
            raise DuplicateName(f"{name} already has an intent")
        f = self._prepare(intent)
        hidden, nxt = self._hidden_for(f)
        decls = tuple(replace(x, intent=f) if x.name == name else x for x in self.decls)
        out = replace(self, decls=decls + hidden, next_hidden=nxt)
        out.definition(name)           # rejects self-reference
        return out

    def add_isa(self, sub: str, sup: str) -> "Ontology":
        d = self._decl(sub)
        self._decl(sup)
        if sup in d.parents:
            return self
        decls = tuple(replace(x, parents=x.parents + (sup,)) if x.name == sub else x
                      for x in self.decls)
        out = replace(self, decls=decls)
        out.definition(sub)
        return out

    def with_upper(self, upper: bool = True) -> "Ontology":
        return replace(self, upper=upper)

    def assert_evidence(self, obj: str, cls: str, axis: str) -> "Ontology":
        """Set one evidence bit; ``axis`` is ``pos``/``+`` or ``neg``/``-``."""
        self._decl(cls)
        ax = {"+": "pos", "-": "neg"}.get(axis, axis)
        try:
            world = self.world.with_atom(cls).with_evidence(obj, cls, ax)
        except UnknownObject:
            raise UnknownReference(f"unknown object {obj}") from None
        return replace(self, world=world)

    def _decl(self, name: str) -> _Decl:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownReference(f"unknown class @{name}") from None

    # --- definitions and extents ------------------------------------------------

    def definition(self, name: str) -> E.Formula:
        """Definition of ``name`` with every class reference expanded."""
        return self._definition(name, ())

    def _definition(self, name: str, stack: tuple[str, ...]) -> E.Formula:
        if name == "U":
            return E.Univ()
        if name == "0":
            return E.Empty()
        if name in stack:
            raise CyclicDefinition(" -> ".join(stack + (name,)))
        d = self._decl(name)
        stack = stack + (name,)
        head = E.ClassRef(name) if d.intent is None else self._expand(d.intent, stack)
        parts = [head] + [self._definition(p, stack) for p in d.parents]
        return _fold(E.Inter, parts)

    def _expand(self, f: E.Formula, stack: tuple[str, ...]) -> E.Formula:
        if isinstance(f, E.ClassRef):
            return self._definition(f.name, stack)
        if isinstance(f, E.SubsetAtom):
            return f                       # opaque for entailment
        if isinstance(f, (E.Union, E.Inter)):
            return type(f)(self._expand(f.left, stack), self._expand(f.right, stack))
        if isinstance(f, (E.BoolComp, E.PseudoComp)):
            return type(f)(self._expand(f.arg, stack))
        if isinstance(f, E.Selector):
            return E.Inter(self._expand(f.base, stack), self._expand(f.cond, stack))
        return f

    def expand(self, f: str | E.Formula) -> E.Formula:
        """A user expression with every class reference replaced by its definition."""
        return self._expand(self._prepare(f), ())

    def _relation(self, f: E.Formula) -> RA.RelationMatrix:
        u = self.world.objects
        if isinstance(f, E.Ref):
            try:
                return self.world.relations[f.name]
            except KeyError:
                raise UnknownReference(f"unknown relation {f.name}") from None
        if isinstance(f, E.Ident):
            return RA.identity(u)
        if isinstance(f, E.Univ):
            return RA.full(u)
        if isinstance(f, E.Empty):
            return RA.empty(u)
        if isinstance(f, E.Compose):
            return RA.compose(self._relation(f.left), self._relation(f.right))
        if isinstance(f, E.Union):
            return RA.union(self._relation(f.left), self._relation(f.right))
        if isinstance(f, E.Inter):
            return RA.inter(self._relation(f.left), self._relation(f.right))
        if isinstance(f, E.BoolComp):
            return RA.complement(self._relation(f.arg))
        if isinstance(f, E.Inverse):
            return RA.inverse(self._relation(f.arg))
        if isinstance(f, E.Star):
            return RA.kleene_star(self._relation(f.arg))
        raise UnsupportedOperator(f"{type(f).__name__} has no meaning on relations")

    @cached_property
    def _primitive_below(self) -> dict[str, set[str]]:
        """Primitive class -> itself plus every primitive class declared under it."""
        below = {d.name: {d.name} for d in self.decls if d.intent is None}
        changed = True
        while changed:
            changed = False
            for d in self.decls:
                if d.intent is not None:
                    continue
                for p in d.parents:
                    if p in below and not below[d.name] <= below[p]:
                        below[p] |= below[d.name]
                        changed = True
        return below

    def _atom_bits(self, name: str):
        # positive evidence for a subclass is positive evidence for its superclasses;
        # negative evidence flows down through the conjoined parent definitions
        pos, neg = self.world.atom_bits(name)
        for sub in self._primitive_below.get(name, ()):
            pos = pos | self.world.atom_bits(sub)[0]
        return pos, neg

    def _resolve(self, leaf: E.Formula):
        if isinstance(leaf, E.SubsetAtom):
            img = self._relation(leaf.path).bits.astype(np.uint8)
            rp, rn = self._bits(self._expand(leaf.rhs, ()))
            some = img.sum(axis=1) > 0
            inside = (img @ (~rp).astype(np.uint8)) == 0
            pos = some & inside
            neg = (img @ rn.astype(np.uint8)) > 0
            return pos, neg
        if isinstance(leaf, E.ClassRef):
            return self._atom_bits(leaf.name)
        raise UnknownReference(f"unknown class {E.to_text(leaf)}")

    def resolve(self, leaf: E.Formula):
        """Evidence bits of a class atom or subset atom (leaf resolver for ``world``)."""
        return self._resolve(leaf)

    def relation(self, text: str | E.Formula) -> RA.RelationMatrix:
        """Matrix of a relation expression such as ``hasPart'*.color``."""
        f = E.parse(text) if isinstance(text, str) else text
        return self._relation(_leaves_as_classes(f, rel=True))

    def _bits(self, f: E.Formula, base: np.ndarray | None = None):
        return evidence_bits(self.world, f, base=base, resolve=self._resolve)

    def _extent_mask(self, f: E.Formula, base: np.ndarray | None = None) -> np.ndarray:
        pos, neg = self._bits(f, base)
        return ~neg if self.upper else pos

    def eval_intent(self, intent: str | E.Formula) -> frozenset:
        """Objects satisfying ``intent`` (lower bound, or upper bound if so configured)."""
        return self.world.objects_of(self._extent_mask(self.expand(intent)))

    def extent(self, name: str) -> frozenset:
        return self.world.objects_of(self._extent_mask(self.definition(name)))

    def select(self, selector: str | E.Formula) -> frozenset:
        """Objects of the selector's base class that satisfy its condition.

        A pseudo-complement inside the condition is taken relative to the base.
        """
        f = self._prepare(selector)
        if not isinstance(f, E.Selector):
            raise SortError("select expects base{condition}", 0)
        base = self._extent_mask(self._expand(f.base, ()))
        cond = self._extent_mask(self._expand(f.cond, ()), base=base)
        return self.world.objects_of(base & cond)

    # --- classification ---------------------------------------------------------

    def classify(self) -> "Ontology":
        """Ontology with its hierarchy computed (``classes``); idempotent."""
        self.classes
        return self

    @cached_property
    def classes(self) -> dict[str, ClassNode]:
        names = list(BUILTINS) + self.names
        defs = {n: self.definition(n) for n in names}
        forms = {n: L.normal_form(defs[n]) for n in names}

        def rank(n: str):
            if n in BUILTINS:
                return (0, n)
            return (2 if self._index[n].hidden else 1, n)

        groups: dict[L.DNF, list[str]] = {}
        for n in names:
            groups.setdefault(forms[n], []).append(n)
        canon = {}
        for members in groups.values():
            members.sort(key=rank)
            canon[members[0]] = tuple(members[1:])

        above: dict[str, set[str]] = {n: set() for n in canon}
        for a, b in itertools.permutations(canon, 2):
            if L.dnf_entails(forms[a], forms[b]):
                above[a].add(b)
        below: dict[str, set[str]] = {n: set() for n in canon}
        for a, ups in above.items():
            for b in ups:
                below[b].add(a)

        out = {}
        for n in sorted(canon, key=rank):
            d = self._index.get(n)
            out[n] = ClassNode(
                name=n, definition=defs[n], intent=forms[n],
                extent=self.world.objects_of(self._extent_mask(defs[n])),
                parents=frozenset(above[n]), children=frozenset(below[n]),
                hidden=bool(d and d.hidden), aliases=canon[n],
                source=d.intent if d else None)
        return out

    def canonical(self, name: str) -> str:
        """Canonical name of the class ``name`` was merged into."""
        for node in self.classes.values():
            if node.name == name or name in node.aliases:
                return node.name
        raise UnknownReference(f"unknown class @{name}")

    def hierarchy_lines(self) -> list[str]:
        lines = []
        for node in self.classes.values():
            ps = " ".join(sorted(node.parents)) or "-"
            line = f"{node.name} < {ps}"
            if node.aliases:
                line += f"  = {' '.join(node.aliases)}"
            lines.append(line)
        return lines

    # --- extent -> intent -------------------------------------------------------

    def describe_extent(self, objects: Iterable[str], budget: int = 6) -> list[E.Formula]:
        """Every ``|``/``&`` formula over visible class names with the fewest
        operators whose extent is exactly ``objects``; ``[]`` past ``budget``.

        Subformulas of a minimal formula are minimal for their own extents, so
        the search keeps, per extent, only the formulas at its first level.
        """
        target = self.world.mask_of(objects)
        key = _mask_int(target)
        leaves = [n for n, node in self.classes.items()
                  if not node.hidden and n not in BUILTINS]
        levels: list[dict[int, list[E.Formula]]] = [{}]
        reached: set[int] = set()
        for n in leaves:
            m = _mask_int(self._extent_mask(self.definition(n)))
            levels[0].setdefault(m, []).append(E.ClassRef(n))
        reached.update(levels[0])
        for k in range(budget + 1):
            if k > 0:
                level: dict[int, dict[str, E.Formula]] = {}
                for i in range(k):
                    for ma, fa in levels[i].items():
                        for mb, fb in levels[k - 1 - i].items():
                            for op, m in ((E.Union, ma | mb), (E.Inter, ma & mb)):
                                if m in reached:
                                    continue
                                slot = level.setdefault(m, {})
                                for a in fa:
                                    for b in fb:
                                        g = canonical_ac(op(a, b))
                                        slot.setdefault(E.to_text(g), g)
                levels.append({m: list(v.values()) for m, v in level.items()})
                reached.update(level)
            if key in levels[k]:
                return sorted(levels[k][key], key=E.to_text)
        return []


def _mask_int(mask: np.ndarray) -> int:
    return sum(1 << i for i, v in enumerate(mask) if v)


# --- world files ---------------------------------------------------------------

def load_world(text: str, *, upper: bool = False) -> Ontology:
    """Build an ontology from ``object``/``class``/``relation``/``isa``/``intent``/
    ``evidence``/``edge`` directives, one per line; ``#`` starts a comment."""
    objects: list[str] = []
    relations: dict[str, list[tuple[str, str]]] = {}
    steps: list[tuple[int, str, list[str], str]] = []
    declared: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, *args = line.split()
        rest = line[len(word):].strip()

        def need(n):
            if len(args) != n:
                raise LoadError(f"{word} expects {n} argument(s)", lineno)

        if word == "object":
            need(1)
            if args[0] in objects:
                raise LoadError(f"object {args[0]} declared twice", lineno)
            objects.append(args[0])
        elif word == "relation":
            need(1)
            if args[0] in relations:
                raise LoadError(f"relation {args[0]} declared twice", lineno)
            relations[args[0]] = []
        elif word == "edge":
            need(3)
            rel, a, b = args
            if rel not in relations:
                raise LoadError(f"undeclared relation {rel}", lineno)
            for o in (a, b):
                if o not in objects:
                    raise LoadError(f"undeclared object {o}", lineno)
            relations[rel].append((a, b))
        elif word == "class":
            need(1)
            declared.add(args[0])
            steps.append((lineno, "class", args, ""))
        elif word == "isa":
            need(2)
            for c in args:
                if c not in declared:
                    raise LoadError(f"undeclared class {c}", lineno)
            steps.append((lineno, "isa", args, ""))
        elif word == "intent":
            if len(args) < 2:
                raise LoadError("intent expects a class name and an expression", lineno)
            declared.add(args[0])
            steps.append((lineno, "intent", args[:1], rest[len(args[0]):].strip()))
        elif word == "evidence":
            need(3)
            if args[0] not in ("+", "-"):
                raise LoadError("evidence expects + or -, an object and a class", lineno)
            if args[1] not in objects:
                raise LoadError(f"undeclared object {args[1]}", lineno)
            if args[2] not in declared:
                raise LoadError(f"undeclared class {args[2]}", lineno)
            steps.append((lineno, "evidence", args, ""))
        else:
            raise LoadError(f"unknown directive {word!r}", lineno)

    ont = Ontology(EvidenceWorld.build(objects, (), relations=relations), upper=upper)
    for lineno, kind, args, body in steps:
        try:
            if kind == "class":
                ont = ont.add_class(args[0])
            elif kind == "isa":
                ont = ont.add_isa(args[0], args[1])
            elif kind == "intent":
                if args[0] in ont:
                    ont = ont.set_intent(args[0], body)
                else:
                    ont = ont.add_class(args[0], body)
            else:
                ont = ont.assert_evidence(args[1], args[2], args[0])
        except LoadError:
            raise
        except Exception as exc:   # noqa: BLE001 - re-raised with the line number
            raise LoadError(f"{type(exc).__name__}: {exc}", lineno) from exc
    return ont
