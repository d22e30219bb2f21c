"""Four-valued evidence logic: literals, Tseytin encoding, Blake normal forms.

A literal is one of ``p``, ``-p``, ``~p`` or ``~-p``. Under the evidence
semantics (see :mod:`classalg.world`) these denote pos, neg, not-pos and
not-neg of atom p, so a formula over k atoms is a classical Boolean function
of 2k bits. Consensus only ever resolves a literal against its Boolean
complement on the same evidence axis: ``p`` with ``~p``, ``-p`` with ``~-p``.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from . import expr as E
from .errors import TooManyAtoms, UnsupportedOperator
from .world import EvidenceWorld, evidence_bits

# --- statuses and the 16-element value lattice ------------------------------


class Status(enum.Enum):
    PLUS = "+"
    MINUS = "-"
    NEITHER = "n"
    BOTH = "b"

    @classmethod
    def from_bits(cls, pos: bool, neg: bool) -> "Status":
        if pos:
            return cls.BOTH if neg else cls.PLUS
        return cls.MINUS if neg else cls.NEITHER

    @property
    def designated(self) -> bool:
        return self is Status.PLUS


LogicValue = frozenset  # of Status

ALL_VALUES: tuple[frozenset, ...] = tuple(
    frozenset(c) for r in range(5) for c in itertools.combinations(Status, r))


def value_join(a: frozenset, b: frozenset) -> frozenset:
    return a | b


def value_meet(a: frozenset, b: frozenset) -> frozenset:
    return a & b


# --- literals and DNFs ------------------------------------------------------


@dataclass(frozen=True, order=True)
class Literal:
    """``atom`` is the printed leaf (``p``, ``@Dog``, ``hasPart.color <= @Red``)."""
    atom: str
    pseudo: bool = False
    comp: bool = False

    @property
    def axis(self) -> tuple[str, bool]:
        return (self.atom, self.pseudo)

    def negated(self) -> "Literal":
        return Literal(self.atom, self.pseudo, not self.comp)

    def to_formula(self) -> E.Formula:
        f = E.parse(self.atom) if not self.atom.startswith("_") else E.Ref(self.atom)
        if self.pseudo:
            f = E.PseudoComp(f)
        if self.comp:
            f = E.BoolComp(f)
        return f

    def __str__(self):
        return E.to_text(self.to_formula())


Conjunct = tuple  # sorted tuple of Literal


def _clashes(lits: Iterable[Literal]) -> bool:
    seen: dict[tuple[str, bool], bool] = {}
    for lit in lits:
        if seen.setdefault(lit.axis, lit.comp) != lit.comp:
            return True
    return False


def _absorb(terms: Iterable[frozenset]) -> set[frozenset]:
    kept: list[frozenset] = []
    for t in sorted(set(terms), key=len):
        if not any(k <= t for k in kept):
            kept.append(t)
    return set(kept)


@dataclass(frozen=True)
class DNF:
    """Sorted, absorbed disjunction of clash-free conjuncts.

    ``DNF(())`` is bottom; ``DNF(((),))`` (one empty conjunct) is top.
    """
    conjuncts: tuple[Conjunct, ...]

    @classmethod
    def of(cls, terms: Iterable[Iterable[Literal]]) -> "DNF":
        sets = [frozenset(t) for t in terms]
        sets = [t for t in sets if not _clashes(t)]
        return cls(tuple(sorted(tuple(sorted(t)) for t in _absorb(sets))))

    @property
    def is_top(self) -> bool:
        return self.conjuncts == ((),)

    @property
    def is_bottom(self) -> bool:
        return not self.conjuncts

    def atoms(self) -> set[str]:
        return {lit.atom for c in self.conjuncts for lit in c}

    def to_formula(self) -> E.Formula:
        if self.is_bottom:
            return E.Empty()
        terms = []
        for c in self.conjuncts:
            if not c:
                return E.Univ()
            lits = [lit.to_formula() for lit in c]
            terms.append(_right_fold(E.Inter, lits))
        return _right_fold(E.Union, terms)

    def __str__(self):
        return E.to_text(self.to_formula())


TOP = DNF(((),))
BOTTOM = DNF(())


def _right_fold(cls, items: list) -> E.Formula:
    out = items[-1]
    for it in reversed(items[:-1]):
        out = cls(it, out)
    return out


def leaf_key(leaf: E.Formula) -> str:
    return E.to_text(leaf)


def formula_atoms(f: E.Formula) -> list[str]:
    """Sorted atom keys of a logical formula."""
    keys = set()

    def go(g):
        if isinstance(g, (E.Ref, E.ClassRef, E.SubsetAtom)):
            keys.add(leaf_key(g))
        elif isinstance(g, (E.Union, E.Inter)):
            go(g.left)
            go(g.right)
        elif isinstance(g, (E.BoolComp, E.PseudoComp)):
            go(g.arg)
        elif not isinstance(g, (E.Univ, E.Empty)):
            raise UnsupportedOperator(f"{type(g).__name__} inside a logical intent")

    go(f)
    return sorted(keys)


# --- negation normal form ---------------------------------------------------
# Nodes: ("lit", Literal) | ("and", [nodes]) | ("or", [nodes]) | ("top",) | ("bot",)


def _nnf(f: E.Formula, comp: bool = False, pseudo: bool = False):
    if isinstance(f, (E.Ref, E.ClassRef, E.SubsetAtom)):
        return ("lit", Literal(leaf_key(f), pseudo, comp))
    if isinstance(f, E.BoolComp):
        return _nnf(f.arg, not comp, pseudo)
    if isinstance(f, E.PseudoComp):
        return _nnf(f.arg, comp, not pseudo)
    flip = comp != pseudo
    if isinstance(f, E.Univ):
        return ("bot",) if flip else ("top",)
    if isinstance(f, E.Empty):
        return ("top",) if flip else ("bot",)
    if isinstance(f, (E.Union, E.Inter)):
        is_or = isinstance(f, E.Union) != flip
        kids = [_nnf(f.left, comp, pseudo), _nnf(f.right, comp, pseudo)]
        return _simplify("or" if is_or else "and", kids)
    raise UnsupportedOperator(f"{type(f).__name__} inside a logical intent")


def _simplify(op: str, kids: list):
    absorbing, neutral = (("top",), ("bot",)) if op == "or" else (("bot",), ("top",))
    flat: list = []
    for k in kids:
        if k == absorbing:
            return absorbing
        if k == neutral:
            continue
        for item in (k[1] if k[0] == op else [k]):
            if item not in flat:
                flat.append(item)
    if not flat:
        return neutral
    if len(flat) == 1:
        return flat[0]
    return (op, flat)


def nnf(f: E.Formula):
    return _nnf(f)


# --- Tseytin encoding -------------------------------------------------------


def counter(prefix: str = "_h") -> Callable[[], str]:
    it = itertools.count(1)
    return lambda: f"{prefix}{next(it)}"


@dataclass(frozen=True)
class Tseytin:
    """Clauses plus the definitions of the hidden atoms they introduce.

    ``definitions`` maps each hidden atom to ``("or"|"and", terms)``, where a
    term is a Literal over the original atoms or an earlier hidden atom;
    ``roots`` are the terms asserted by unit clauses.
    """
    clauses: tuple[tuple[Literal, ...], ...]
    definitions: dict[str, tuple[str, tuple[Literal, ...]]]
    roots: tuple[Literal, ...]

    @property
    def hidden(self) -> dict[str, E.Formula]:
        """Hidden atom -> the subexpression it abbreviates (fully expanded)."""
        return {h: self.expand(h) for h in self.definitions}

    def expand(self, h: str) -> E.Formula:
        op, terms = self.definitions[h]
        parts = [self._term(t) for t in terms]
        return _right_fold(E.Union if op == "or" else E.Inter, parts)

    def _term(self, lit: Literal) -> E.Formula:
        if lit.atom in self.definitions:
            f = self.expand(lit.atom)
            return E.BoolComp(f) if lit.comp else f
        return lit.to_formula()


def tseytin(f: E.Formula, fresh: Callable[[], str] | None = None) -> Tseytin:
    """Linear-size CNF with one hidden atom per disjunction.

    Conjunctions nested under a disjunction also get a hidden atom, which keeps
    the clause count within 4 * operators + 2.
    """
    fresh = fresh or counter()
    clauses: list[tuple[Literal, ...]] = []
    defs: dict[str, tuple[str, tuple[Literal, ...]]] = {}

    def term(node) -> Literal:
        if node[0] == "lit":
            return node[1]
        op, kids = node
        terms = tuple(term(k) for k in kids)
        h = Literal(fresh())
        defs[h.atom] = (op, terms)
        if op == "or":
            clauses.append((h.negated(),) + terms)
            clauses.extend((t.negated(), h) for t in terms)
        else:
            clauses.extend((h.negated(), t) for t in terms)
            clauses.append(tuple(t.negated() for t in terms) + (h,))
        return h

    root = nnf(f)
    if root == ("top",):
        return Tseytin((), {}, ())
    if root == ("bot",):
        return Tseytin(((),), {}, ())
    tops = root[1] if root[0] == "and" else [root]
    roots = tuple(term(k) for k in tops)
    clauses.extend((r,) for r in roots)
    return Tseytin(tuple(clauses), defs, roots)


# --- Blake canonical form ---------------------------------------------------


def _consensus(a: frozenset, b: frozenset) -> frozenset | None:
    clash = None
    for lit in a:
        if lit.negated() in b:
            if clash is not None:
                return None
            clash = lit
    if clash is None:
        return None
    out = (a - {clash}) | (b - {clash.negated()})
    return None if _clashes(out) else frozenset(out)


def blake_normal_form(d: DNF, rng: random.Random | None = None) -> DNF:
    """Close ``d`` under consensus and absorption: the set of all prime implicants.

    With ``rng`` the consensus pairs are visited in shuffled order; the result
    does not depend on it.
    """
    terms = _absorb(frozenset(c) for c in d.conjuncts)
    changed = True
    while changed:
        changed = False
        pairs = list(itertools.combinations(sorted(terms, key=lambda t: sorted(t)), 2))
        if rng is not None:
            rng.shuffle(pairs)
        for a, b in pairs:
            if a not in terms or b not in terms:
                continue
            c = _consensus(a, b)
            if c is None or any(t <= c for t in terms):
                continue
            terms = {t for t in terms if not c <= t}
            terms.add(c)
            changed = True
    return DNF.of(terms)


def _product(a: DNF, b: DNF) -> DNF:
    return DNF.of(x + y for x in a.conjuncts for y in b.conjuncts)


def normal_form(f: E.Formula) -> DNF:
    """Canonical DNF of the positive evidence of ``f``.

    The Tseytin subroutines are normalised bottom-up and the hidden atoms
    dropped: prime implicants of an existential projection are exactly those
    of the unprojected form that avoid the projected atom.
    """
    t = tseytin(f)
    if t.clauses == ((),):
        return BOTTOM
    forms: dict[str, DNF] = {}

    def of(lit: Literal) -> DNF:
        if lit.atom in forms:
            return forms[lit.atom]
        return DNF(((lit,),))

    for h, (op, terms) in t.definitions.items():
        if op == "or":
            forms[h] = blake_normal_form(DNF.of(c for tm in terms for c in of(tm).conjuncts))
        else:
            acc = TOP
            for tm in terms:
                acc = _product(acc, of(tm))
            forms[h] = acc
    acc = TOP
    for r in t.roots:
        acc = _product(acc, of(r))
    return blake_normal_form(acc)


def complement_form(f: E.Formula) -> DNF:
    return normal_form(E.BoolComp(f))


# --- entailment -------------------------------------------------------------


class Relation(enum.Enum):
    EQUIVALENT = "equivalent"
    IMPLIES = "implies"
    IMPLIED_BY = "implied_by"
    UNRELATED = "unrelated"


def dnf_entails(a: DNF, b: DNF) -> bool:
    """a <= b, with ``b`` in Blake form: every term of ``a`` lies under a prime of ``b``."""
    primes = [frozenset(c) for c in b.conjuncts]
    return all(any(p <= frozenset(t) for p in primes) for t in a.conjuncts)


def relation_of(a: DNF, b: DNF) -> Relation:
    ab, ba = dnf_entails(a, b), dnf_entails(b, a)
    if ab and ba:
        return Relation.EQUIVALENT
    if ab:
        return Relation.IMPLIES
    if ba:
        return Relation.IMPLIED_BY
    return Relation.UNRELATED


def decide_relation(a: E.Formula, b: E.Formula) -> Relation:
    return relation_of(normal_form(a), normal_form(b))


# --- semantics --------------------------------------------------------------


def eval_status(world: EvidenceWorld, f: E.Formula, o: str) -> Status:
    i = world.object_index(o)
    pos, neg = evidence_bits(world, f)
    return Status.from_bits(bool(pos[i]), bool(neg[i]))


def _bits(f: E.Formula, env: dict[str, tuple[bool, bool]]) -> tuple[bool, bool]:
    if isinstance(f, (E.Ref, E.ClassRef, E.SubsetAtom)):
        return env[leaf_key(f)]
    if isinstance(f, E.Univ):
        return True, False
    if isinstance(f, E.Empty):
        return False, True
    if isinstance(f, E.BoolComp):
        p, n = _bits(f.arg, env)
        return not p, not n
    if isinstance(f, E.PseudoComp):
        p, n = _bits(f.arg, env)
        return n, p
    if isinstance(f, E.Union):
        (p1, n1), (p2, n2) = _bits(f.left, env), _bits(f.right, env)
        return p1 or p2, n1 and n2
    if isinstance(f, E.Inter):
        (p1, n1), (p2, n2) = _bits(f.left, env), _bits(f.right, env)
        return p1 and p2, n1 or n2
    raise UnsupportedOperator(f"{type(f).__name__} inside a logical intent")


MAX_ORACLE_ATOMS = 12


def assignments(atoms: list[str]) -> Iterator[dict[str, tuple[bool, bool]]]:
    for bits in itertools.product((False, True), repeat=2 * len(atoms)):
        yield {a: (bits[2 * i], bits[2 * i + 1]) for i, a in enumerate(atoms)}


def truth_oracle(f: E.Formula, atoms: Iterable[str] | None = None) -> frozenset:
    """Every (pos, neg)-bit assignment under which ``f`` has positive evidence.

    An assignment is a tuple of ``(pos, neg)`` pairs in sorted atom order.
    """
    names = sorted(set(atoms) if atoms is not None else formula_atoms(f))
    if len(names) > MAX_ORACLE_ATOMS:
        raise TooManyAtoms(f"{len(names)} atoms; the oracle enumerates at most {MAX_ORACLE_ATOMS}")
    return frozenset(tuple(env[a] for a in names)
                     for env in assignments(names) if _bits(f, env)[0])


def dnf_holds(d: DNF, env: dict[str, tuple[bool, bool]]) -> bool:
    def lit(l: Literal) -> bool:
        p, n = env[l.atom]
        v = n if l.pseudo else p
        return v != l.comp
    return any(all(lit(l) for l in c) for c in d.conjuncts)


def status_vector(world: EvidenceWorld, f: E.Formula) -> list[Status]:
    pos, neg = evidence_bits(world, f)
    return [Status.from_bits(bool(p), bool(n)) for p, n in zip(pos, neg)]


__all__ = [
    "Status", "ALL_VALUES", "value_join", "value_meet", "Literal", "DNF", "TOP",
    "BOTTOM", "Tseytin", "tseytin", "blake_normal_form", "normal_form",
    "complement_form", "Relation", "decide_relation", "relation_of", "dnf_entails",
    "eval_status", "truth_oracle", "formula_atoms", "counter", "nnf", "dnf_holds",
]
