"""Independent reference implementations used by the tests.

Nothing here imports the package's algorithms; only the AST classes are shared
so formulas can be handed to both sides. Each oracle is the most literal
reading of its definition (quantifiers, brute-force enumeration), traded for
speed.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter

import numpy as np

from classalg import expr as E

# --- evidence-bit semantics, vectorized over every assignment ----------------


def leaf_name(f) -> str:
    return ("@" if isinstance(f, E.ClassRef) else "") + f.name


def atoms_of(f) -> list[str]:
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (E.Ref, E.ClassRef)):
            out.add(leaf_name(g))
        else:
            stack.extend(E.children(g))
    return sorted(out)


def assignment_table(atoms: list[str]) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Column per evidence bit; row r is the r-th of the 4**k assignments."""
    k = len(atoms)
    rows = np.arange(1 << (2 * k))
    return {a: (((rows >> (2 * i)) & 1).astype(bool), ((rows >> (2 * i + 1)) & 1).astype(bool))
            for i, a in enumerate(atoms)}


def bits(f, table, n):
    """(pos, neg) of ``f`` for every assignment; ``n`` rows."""
    if isinstance(f, (E.Ref, E.ClassRef)):
        return table[leaf_name(f)]
    if isinstance(f, E.Univ):
        return np.ones(n, bool), np.zeros(n, bool)
    if isinstance(f, E.Empty):
        return np.zeros(n, bool), np.ones(n, bool)
    if isinstance(f, E.BoolComp):
        p, q = bits(f.arg, table, n)
        return ~p, ~q
    if isinstance(f, E.PseudoComp):
        p, q = bits(f.arg, table, n)
        return q, p
    (p1, q1), (p2, q2) = bits(f.left, table, n), bits(f.right, table, n)
    if isinstance(f, E.Union):
        return p1 | p2, q1 & q2
    if isinstance(f, E.Inter):
        return p1 & p2, q1 | q2
    raise TypeError(f)


def models(f, atoms: list[str]) -> np.ndarray:
    """Boolean vector: does ``f`` carry positive evidence under each assignment."""
    table = assignment_table(atoms)
    return bits(f, table, 1 << (2 * len(atoms)))[0]


def oracle_relation(a, b) -> str:
    atoms = sorted(set(atoms_of(a)) | set(atoms_of(b)))
    ma, mb = models(a, atoms), models(b, atoms)
    ab = not np.any(ma & ~mb)
    ba = not np.any(mb & ~ma)
    return {(True, True): "equivalent", (True, False): "implies",
            (False, True): "implied_by", (False, False): "unrelated"}[(ab, ba)]


def random_formula(rng: random.Random, atoms: list[str], depth: int,
                   pseudo: bool = True):
    """Random logical formula over ``atoms`` with at most ``depth`` nesting."""
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.04:
            return E.Univ()
        if r < 0.08:
            return E.Empty()
        return E.Ref(rng.choice(atoms))
    kinds = ["or", "and", "comp"] + (["pseudo"] if pseudo else [])
    k = rng.choice(kinds)
    if k == "comp":
        return E.BoolComp(random_formula(rng, atoms, depth - 1, pseudo))
    if k == "pseudo":
        return E.PseudoComp(random_formula(rng, atoms, depth - 1, pseudo))
    cls = E.Union if k == "or" else E.Inter
    return cls(random_formula(rng, atoms, depth - 1, pseudo),
               random_formula(rng, atoms, depth - 1, pseudo))


# --- CNF model projection ----------------------------------------------------


def cnf_projection(clauses, atoms: list[str]) -> np.ndarray:
    """For each assignment of the original atoms: is some extension to the
    remaining (hidden) atoms a model of every clause?

    A clause is a sequence of ``(atom, pseudo, comp)`` triples.
    """
    hidden = sorted({a for c in clauses for a, _, _ in c} - set(atoms))
    k, h = len(atoms), len(hidden)
    rows = np.arange(1 << (2 * k + h))
    col = {}
    for i, a in enumerate(atoms):
        col[(a, False)] = ((rows >> (2 * i)) & 1).astype(bool)
        col[(a, True)] = ((rows >> (2 * i + 1)) & 1).astype(bool)
    for j, a in enumerate(hidden):
        col[(a, False)] = ((rows >> (2 * k + j)) & 1).astype(bool)
    ok = np.ones(len(rows), bool)
    for c in clauses:
        sat = np.zeros(len(rows), bool)
        for a, pseudo, comp in c:
            v = col[(a, pseudo)]
            sat |= ~v if comp else v
        ok &= sat
    return ok.reshape(1 << h, 1 << (2 * k)).any(axis=0)


# --- relations as sets of pairs --------------------------------------------------


def all_relations(n: int):
    pairs = [(i, j) for i in range(n) for j in range(n)]
    for mask in range(1 << (n * n)):
        yield frozenset(p for b, p in enumerate(pairs) if mask >> b & 1)


def to_matrix(rel, n: int) -> np.ndarray:
    m = np.zeros((n, n), bool)
    for i, j in rel:
        m[i, j] = True
    return m


def property_oracle(rel, n: int) -> dict[str, bool]:
    """Every property from its first-order definition."""
    U = range(n)

    def R(x, y):
        return (x, y) in rel

    p = {}
    p["functional"] = all(not (R(x, y) and R(x, z)) or y == z for x in U for y in U for z in U)
    p["left-total"] = all(any(R(x, y) for y in U) for x in U)
    p["injective"] = all(not (R(x, z) and R(y, z)) or x == y for x in U for y in U for z in U)
    p["surjective"] = all(any(R(x, y) for x in U) for y in U)
    p["function"] = p["functional"] and p["left-total"]
    p["bijection"] = p["function"] and p["injective"] and p["surjective"]
    p["transitive"] = all(not (R(x, y) and R(y, z)) or R(x, z) for x in U for y in U for z in U)
    p["reflexive"] = all(R(x, x) for x in U)
    p["coreflexive"] = all(not R(x, y) or x == y for x in U for y in U)
    p["irreflexive"] = not any(R(x, x) for x in U)
    p["symmetric"] = all(R(x, y) == R(y, x) for x in U for y in U)
    p["antisymmetric"] = all(not (R(x, y) and R(y, x)) or x == y for x in U for y in U)
    p["asymmetric"] = all(not (R(x, y) and R(y, x)) for x in U for y in U)
    p["total"] = all(R(x, y) or R(y, x) for x in U for y in U)
    p["connex"] = all(x == y or R(x, y) or R(y, x) for x in U for y in U)
    p["idempotent"] = all(R(x, y) == any(R(x, z) and R(z, y) for z in U) for x in U for y in U)
    p["preorder"] = p["reflexive"] and p["transitive"]
    p["equivalence"] = p["preorder"] and p["symmetric"]
    p["partial order"] = p["preorder"] and p["antisymmetric"]
    p["total order"] = p["partial order"] and p["total"]
    p["strict partial order"] = p["irreflexive"] and p["transitive"]
    p["strict total order"] = p["strict partial order"] and p["connex"]
    p["dense"] = all(not R(x, y) or x == y
                     or any(z != x and z != y and R(x, z) and R(z, y) for z in U)
                     for x in U for y in U)
    return p


def compose_pairs(r, s):
    return frozenset((x, y) for x, z in r for z2, y in s if z == z2)


def right_residual_pairs(r, s, n):
    """x (R\\S) y iff every z with zRx has zSy."""
    return frozenset((x, y) for x in range(n) for y in range(n)
                     if all((z, y) in s for z in range(n) if (z, x) in r))


def left_residual_pairs(s, r, n):
    """y (S/R) x iff every z with xRz has ySz."""
    return frozenset((y, x) for y in range(n) for x in range(n)
                     if all((y, z) in s for z in range(n) if (x, z) in r))


def max_bicliques_bruteforce(rel, n: int) -> set[tuple[frozenset, frozenset]]:
    subsets = [frozenset(c) for k in range(1, n + 1) for c in itertools.combinations(range(n), k)]
    full = [(d, e) for d in subsets for e in subsets
            if all((x, y) in rel for x in d for y in e)]
    return {(d, e) for d, e in full
            if not any((d <= d2 and e <= e2) and (d, e) != (d2, e2) for d2, e2 in full)}


# --- minimal monotone formulas ------------------------------------------------


def ac_shape(f):
    """Structure of a |/& formula modulo associativity and commutativity."""
    if isinstance(f, (E.Union, E.Inter)):
        op = type(f)
        parts = []
        stack = [f]
        while stack:
            g = stack.pop()
            if isinstance(g, op):
                stack.extend((g.left, g.right))
            else:
                parts.append(ac_shape(g))
        return (op.__name__, frozenset(Counter(parts).items()))
    return ("leaf", f.name)


def trees(leaves: list[str], ops: int):
    """Every |/& formula with exactly ``ops`` binary operators."""
    if ops == 0:
        for name in leaves:
            yield E.ClassRef(name)
        return
    for left_ops in range(ops):
        for a in trees(leaves, left_ops):
            for b in trees(leaves, ops - 1 - left_ops):
                yield E.Union(a, b)
                yield E.Inter(a, b)


def truth_of(f, env: dict[str, bool]) -> bool:
    if isinstance(f, E.ClassRef):
        return env[f.name]
    if isinstance(f, E.Union):
        return truth_of(f.left, env) or truth_of(f.right, env)
    return truth_of(f.left, env) and truth_of(f.right, env)


def minimal_forms(leaves: list[str], target, max_ops: int):
    """Shapes of all minimum-operator formulas whose truth table is ``target``
    (a function of a dict env)."""
    envs = [dict(zip(leaves, bits_)) for bits_ in itertools.product((False, True), repeat=len(leaves))]
    want = tuple(target(e) for e in envs)
    for ops in range(max_ops + 1):
        found = {ac_shape(f) for f in trees(leaves, ops)
                 if tuple(truth_of(f, e) for e in envs) == want}
        if found:
            return ops, found
    return None, set()


# --- conditional attribute implications, explicitly -------------------------------


def subsets(items):
    items = sorted(items)
    return [frozenset(c) for k in range(len(items) + 1) for c in itertools.combinations(items, k)]


def caisl_saturate(omega, gamma, sigma, nonconstraint="empty"):
    """Naive fixpoint over explicit (X, C, Y) triples with every rule instance."""
    A, G = subsets(omega), subsets(gamma)
    gam = frozenset(gamma)
    known = set(sigma)
    known |= {(x, gam, x) for x in A}
    if nonconstraint == "full":
        known.add((frozenset(), frozenset(), frozenset(omega)))
    else:
        known |= {(frozenset(), c, frozenset()) for c in G}
    while True:
        new = set()
        for x, c, y in known:
            for c1 in subsets(c):
                for y1 in subsets(y):
                    new.add((x, c1, y1))
        for (x1, c1, y1), (x2, c2, y2) in itertools.product(known, repeat=2):
            new.add((x1 | x2, c1 & c2, y1 | y2))
            new.add((x1 | x2, c1 | c2, y1 & y2))
            if not (x1 & y1) and x1 <= x2:
                new.add((x2 - y1, c1 & c2, y2 - y1))
        if new <= known:
            return known
        known |= new


# --- naive DNF by distribution ------------------------------------------------------


def raw_dnf(f, comp=False, pseudo=False):
    """Unabsorbed DNF of ``f`` as lists of ``(atom, pseudo, comp)`` triples,
    obtained by pushing both negations to the leaves and distributing."""
    if isinstance(f, E.BoolComp):
        return raw_dnf(f.arg, not comp, pseudo)
    if isinstance(f, E.PseudoComp):
        # -~x keeps the Boolean flip outside the swap: ~-x
        return raw_dnf(f.arg, comp, not pseudo)
    if isinstance(f, (E.Univ, E.Empty)):
        true = isinstance(f, E.Univ) != pseudo
        return [[]] if true != comp else []
    if isinstance(f, (E.Ref, E.ClassRef)):
        return [[(leaf_name(f), pseudo, comp)]]
    a, b = raw_dnf(f.left, comp, pseudo), raw_dnf(f.right, comp, pseudo)
    # ~ turns | into &; - also swaps them; both together cancel
    disj = isinstance(f, E.Union) != (comp != pseudo)
    if disj:
        return a + b
    return [x + y for x in a for y in b]
