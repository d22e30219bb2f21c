from pathlib import Path

import pytest

from classalg import expr as E
from classalg.errors import (CyclicDefinition, DuplicateName, LoadError, SortError,
                             UnknownReference)
from classalg.ontology import Ontology, canonical_ac, load_world

import oracles as O

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def parts():
    return load_world((DATA / "parts.world").read_text())


def pqr_world():
    """Eight objects, one for every membership pattern of p, q, r."""
    ont = Ontology.over([f"o{i}" for i in range(8)])
    for c in "pqr":
        ont = ont.add_class(c)
    for i in range(8):
        for j, c in enumerate("pqr"):
            if i >> j & 1:
                ont = ont.assert_evidence(f"o{i}", c, "+")
    return ont


def test_path_selector(parts):
    assert parts.extent("RedThing") == {"car1", "wheel1", "wheel2"}
    assert parts.select("@U{hasPart*.color <= (@Red | @Green)}") == {"car1", "wheel1", "wheel2"}


def test_mixed_colours_are_excluded(parts):
    assert "car2" not in parts.eval_intent("hasPart*.color <= @Red")
    assert "car2" in parts.eval_intent("hasPart*.color <= (@Red | @Blue)")


def test_partless_objects_do_not_qualify(parts):
    assert "red1" not in parts.eval_intent("color <= @Red")
    assert parts.eval_intent("color <= @Red") == {"wheel1", "wheel2"}


def test_universe_and_empty(parts):
    assert parts.eval_intent("U") == set(parts.world.objects)
    assert parts.eval_intent("0") == set()


def test_subclass_evidence_counts_for_superclass(parts):
    assert parts.extent("Color") == {"red1", "blue1"}


def test_selector_base_scopes_the_result(parts):
    assert parts.select("@Color{@Red}") == {"red1"}
    assert parts.select("@Green{U}") == set()
    with pytest.raises(SortError):
        parts.select("@Red")


def test_add_class_places_under_parent():
    ont = Ontology.over(["rex", "tom"]).add_class("Animal").add_class("Dog", parents=["Animal"])
    ont = ont.assert_evidence("rex", "Dog", "+")
    assert ont.classes["Dog"].parents == {"Animal", "U"}
    assert ont.extent("Animal") == {"rex"}


def test_defined_class_referencing_parent():
    ont = Ontology.over(["a"]).add_class("Animal").add_class("Pet").add_class("Dog", "@Animal & @Pet")
    assert "Animal" in ont.classes["Dog"].parents


def test_unsatisfiable_class_merges_into_bottom():
    ont = Ontology.over(["a"]).add_class("p").add_class("Never", "p & ~p")
    assert ont.extent("Never") == set()
    assert "Never" in ont.classes["0"].aliases
    assert ont.canonical("Never") == "0"


def test_equivalent_intents_merge():
    ont = pqr_world().add_class("M1", "p&q|p&r|q&r").add_class("M2", "p&(q|r)|q&r")
    assert ont.canonical("M2") == "M1"
    assert "M2" in ont.classes["M1"].aliases


def test_unrelated_intents_have_no_edge():
    ont = pqr_world()
    assert "q" not in ont.classes["p"].parents
    assert "p" not in ont.classes["q"].parents


def test_transitive_closure():
    ont = Ontology.over(["x"]).add_class("C").add_class("B", parents=["C"]).add_class("A", parents=["B"])
    assert {"B", "C", "U"} <= ont.classes["A"].parents
    assert "A" in ont.classes["C"].children


def test_hidden_classes_for_disjunctions():
    ont = pqr_world().add_class("M", "p & (q | r)")
    hidden = [n for n, node in ont.classes.items() if node.hidden]
    assert hidden == ["_h1"]
    assert E.to_text(ont.definition("_h1")) == "@q | @r"
    assert "_h1" in ont.classes["M"].parents


def test_hidden_names_are_deterministic():
    text = (DATA / "prelude.world").read_text()
    a, b = load_world(text), load_world(text)
    assert a.hierarchy_lines() == b.hierarchy_lines()
    assert [d.name for d in a.decls] == [d.name for d in b.decls]


def test_classify_is_idempotent(parts):
    assert parts.classify().classify().classes == parts.classes


def test_galois_pair_and_monotonicity():
    ont = load_world((DATA / "prelude.world").read_text())
    for upper in (False, True):
        o = ont.with_upper(upper)
        nodes = o.classes
        for node in nodes.values():
            assert node.extent == o.eval_intent(node.definition)
            for p in node.parents:
                assert node.extent <= nodes[p].extent


def test_describe_class_extent_is_the_class(parts):
    assert [E.to_text(f) for f in parts.describe_extent(parts.extent("Red"))] == ["@Red"]


def test_describe_majority_returns_every_minimal_form():
    ont = pqr_world()
    found = ont.describe_extent(ont.eval_intent("p&q|p&r|q&r"), 6)
    ops, shapes = O.minimal_forms(["p", "q", "r"], lambda e: (e["p"] + e["q"] + e["r"]) >= 2, 6)
    assert ops == 4 and {E.op_count(f) for f in found} == {4}
    assert {O.ac_shape(f) for f in found} == shapes
    texts = {E.to_text(f) for f in found}
    for known_form in ("p&(q|r)|q&r", "p&q|(p|q)&r"):
        assert E.to_text(canonical_ac(ont._prepare(known_form))) in texts
    for f in found:
        assert ont.eval_intent(f) == ont.eval_intent("p&q|p&r|q&r")


def test_describe_unreachable():
    ont = pqr_world()
    assert ont.describe_extent(["o0"], 6) == []
    assert ont.describe_extent(["o3", "o5"], 1) == []


def test_assert_evidence():
    ont = Ontology.over(["alice"]).add_class("Dog")
    ont = ont.assert_evidence("alice", "Dog", "pos")
    assert ont.extent("Dog") == {"alice"}
    ont = ont.assert_evidence("alice", "Dog", "neg")
    pos, neg = ont.world.atom_bits("Dog")
    assert pos[0] and neg[0]
    with pytest.raises(UnknownReference):
        ont.assert_evidence("bob", "Dog", "pos")


def test_upper_extents():
    ont = Ontology.over(["a", "b"]).add_class("p").assert_evidence("a", "p", "-")
    assert ont.extent("p") == set()
    assert ont.with_upper().extent("p") == {"b"}


def test_errors():
    ont = Ontology.over(["a"]).add_class("p")
    with pytest.raises(DuplicateName):
        ont.add_class("p")
    with pytest.raises(UnknownReference):
        ont.add_class("q", "@nope")
    with pytest.raises(UnknownReference):
        ont.add_class("q", "missingRel <= @p")
    ont = ont.add_class("A").add_class("B", parents=["A"])
    with pytest.raises(CyclicDefinition):
        ont.add_isa("A", "B")


def test_load_errors_report_lines():
    with pytest.raises(LoadError) as info:
        load_world("object a\nclass p\nevidence + b p\n")
    assert info.value.line == 3
    with pytest.raises(LoadError) as info:
        load_world("object a\nfrobnicate\n")
    assert info.value.line == 2
    with pytest.raises(LoadError) as info:
        load_world("class p\nintent q p &\n")
    assert info.value.line == 2
