import itertools
import random

import numpy as np
import pytest

from classalg import relalg as RA
from classalg.errors import UniverseMismatch, UnknownProperty

import oracles as O

U3 = ("a", "b", "c")

# Counts over all 512 relations on three objects, computed by the quantifier
# oracle and frozen. Several are textbook sequences (171 transitive relations,
# 29 preorders, 19 partial orders, 5 equivalences, 6 total orders).
PROPERTY_COUNTS = {
    "antisymmetric": 216, "asymmetric": 27, "bijection": 6, "connex": 216,
    "coreflexive": 8, "dense": 16, "equivalence": 5, "function": 27,
    "functional": 64, "idempotent": 123, "injective": 64, "irreflexive": 64,
    "left-total": 343, "partial order": 19, "preorder": 29, "reflexive": 64,
    "strict partial order": 19, "strict total order": 6, "surjective": 343,
    "symmetric": 64, "total": 27, "total order": 6, "transitive": 171,
}
TOTAL_MAX_BICLIQUES = 1291


def rel(pairs, universe=U3):
    return RA.RelationMatrix.from_pairs(universe, pairs)


def as_matrix(r, n=3):
    return RA.RelationMatrix(tuple("abcde"[:n]), O.to_matrix(r, n))


def test_boolean_ops():
    rng = np.random.default_rng(0)
    r = RA.RelationMatrix(U3, rng.random((3, 3)) < .5)
    s = RA.RelationMatrix(U3, rng.random((3, 3)) < .5)
    assert RA.complement(RA.complement(r)) == r
    assert RA.union(r, RA.complement(r)) == RA.full(U3)
    assert np.array_equal(RA.inter(r, s).bits, r.bits & s.bits)


def test_universe_mismatch():
    with pytest.raises(UniverseMismatch):
        RA.union(RA.identity("ab"), RA.identity("abc"))
    with pytest.raises(UniverseMismatch):
        rel([("a", "z")])


def test_compose_and_inverse():
    r, s = rel([("a", "b")]), rel([("b", "c")])
    assert RA.compose(r, s).pairs() == [("a", "c")]
    assert RA.compose(r, RA.identity(U3)) == r


def test_group_style_laws_exhaustive_n2():
    rels = [as_matrix(r, 2) for r in O.all_relations(2)]
    for r, s in itertools.product(rels, repeat=2):
        assert RA.inverse(RA.compose(r, s)) == RA.compose(RA.inverse(s), RA.inverse(r))
    for r in rels:
        assert RA.inverse(RA.inverse(r)) == r


def test_residuals_match_quantifier_definitions():
    rels = list(O.all_relations(3))
    rng = random.Random(1)
    for _ in range(400):
        r, s = rng.choice(rels), rng.choice(rels)
        rm, sm = as_matrix(r), as_matrix(s)
        assert RA.right_residual(rm, sm) == as_matrix(O.right_residual_pairs(r, s, 3))
        assert RA.left_residual(sm, rm) == as_matrix(O.left_residual_pairs(s, r, 3))


def test_residual_examples():
    r = rel([("a", "b"), ("b", "c")])
    assert RA.identity(U3) <= RA.right_residual(r, r)
    assert RA.right_residual(RA.empty(U3), r) == RA.full(U3)


def test_adjunction_random_n5():
    rng = np.random.default_rng(5)
    u = tuple("abcde")
    for _ in range(300):
        r, x, s = (RA.RelationMatrix(u, rng.random((5, 5)) < .35) for _ in range(3))
        a = RA.compose(r, x) <= s
        assert a == (x <= RA.right_residual(r, s))
        assert a == (r <= RA.left_residual(s, x))


def test_triangles_are_products_with_an_inverse():
    rng = np.random.default_rng(6)
    for _ in range(100):
        x, z = (RA.RelationMatrix(U3, rng.random((3, 3)) < .5) for _ in range(2))
        assert RA.triangle_right(x, z) == RA.compose(RA.inverse(x), z)
        assert RA.triangle_left(z, x) == RA.compose(z, RA.inverse(x))
    zero = RA.empty(U3)
    assert RA.triangle_right(zero, RA.full(U3)) == zero


def test_property_examples():
    assert RA.check_property(RA.identity(U3), "equivalence")
    one = rel([("a", "b")])
    assert RA.check_property(one, "functional")
    assert not RA.check_property(one, "left-total")
    assert RA.check_property(one, "asymmetric")
    full = RA.full(U3)
    assert RA.check_property(full, "total")
    assert RA.check_property(full, "preorder")
    assert not RA.check_property(full, "antisymmetric")
    with pytest.raises(UnknownProperty):
        RA.check_property(full, "wobbly")
    assert len(RA.PROPERTIES) == 23


def test_property_counts_are_frozen():
    counts = dict.fromkeys(RA.PROPERTIES, 0)
    for r in O.all_relations(3):
        for name, v in RA.all_properties(as_matrix(r)).items():
            counts[name] += v
    assert counts == PROPERTY_COUNTS


def test_kleene_star():
    assert RA.kleene_star(RA.empty(U3)) == RA.identity(U3)
    chain = rel([("a", "b"), ("b", "c")])
    star = RA.kleene_star(chain)
    assert set(star.pairs()) == {("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c"), ("a", "c")}
    assert RA.kleene_star(star) == star


def test_bicliques_examples():
    assert RA.max_bicliques(RA.full(U3)) == [RA.Biclique(U3, U3)]
    u = ("a", "b", "x", "y")
    r = RA.RelationMatrix.from_pairs(u, [("a", "x"), ("a", "y"), ("b", "y")])
    assert [str(b) for b in RA.max_bicliques(r)] == ["{a,b} x {y}", "{a} x {x,y}"]
    assert RA.max_bicliques(RA.empty(U3)) == []


def test_biclique_count_is_frozen():
    assert sum(len(RA.max_bicliques(as_matrix(r))) for r in O.all_relations(3)) == TOTAL_MAX_BICLIQUES


def test_single_biclique_identities():
    u = tuple("abcd")
    for d in ["a", "ab", "abc"]:
        for e in ["b", "cd", "abcd"]:
            r = RA.RelationMatrix.from_pairs(u, [(x, y) for x in d for y in e])
            rr = RA.compose(r, RA.inverse(r))
            assert set(rr.pairs()) == {(x, y) for x in d for y in d}
            assert RA.compose(rr, r) == r


def test_grid_output():
    assert RA.identity("ab").grid() == "  a b\na 1 0\nb 0 1"
