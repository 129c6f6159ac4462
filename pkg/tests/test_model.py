import pytest

from conftest import const, edge, edges, var
from src.model import (
    CQ,
    TOP,
    UCQ,
    Atom,
    FreshNames,
    FreshPredicates,
    Instance,
    Predicate,
    Rule,
    RuleSet,
    Term,
    apply_substitution,
    disjoint_union,
    is_specialization,
    set_partitions,
    specializations,
    term_key,
)


def test_instance_always_contains_true():
    assert Instance().is_trivial
    assert TOP in Instance()
    instance = edges("ab")
    assert TOP in instance
    assert len(instance) == 2
    assert not instance.is_trivial


def test_instance_signature_and_adom():
    instance = edges("ab", "bc")
    assert instance.adom == {const("a"), const("b"), const("c")}
    assert instance.signature == {Predicate("E", 2)}


def test_instance_restrict_keeps_true():
    instance = Instance.of(edge("a", "b"), Atom.of("A", const("a")))
    restricted = instance.restrict({Predicate("A", 1)})
    assert restricted.atoms == {TOP, Atom.of("A", const("a"))}


def test_thawed_turns_constants_into_nulls():
    thawed = edges("ab").thawed()
    assert all(t.is_null for t in thawed.adom)
    assert {t.label for t in thawed.adom} == {"a", "b"}


def test_terms_of_different_kinds_differ():
    assert Term.constant("a") != Term.null("a")
    assert Term.null("_n1", birth=3) == Term.null("_n1", birth=5)


def test_term_order_by_kind_then_natural_label():
    terms = [var("x"), Term.null("_n10"), const("b"), Term.null("_n2"), const("a")]
    ordered = sorted(terms, key=term_key)
    assert [t.label for t in ordered] == ["a", "b", "_n2", "_n10", "x"]


def test_atom_arity_is_checked():
    with pytest.raises(ValueError):
        Atom(Predicate("E", 2), (const("a"),))


def test_rule_frontier_and_existentials():
    x, y, z = var("x"), var("y"), var("z")
    rule = Rule("r1", (Atom.of("E", x, y),), (Atom.of("E", y, z),))
    assert rule.frontier == {y}
    assert rule.existentials == {z}
    assert not rule.is_datalog
    assert str(rule) == "E(x,y) -> ? z : E(y,z) ."


def test_rule_rejects_constants_and_empty_parts():
    x = var("x")
    with pytest.raises(ValueError):
        Rule("r1", (Atom.of("A", const("a")),), (Atom.of("B", x),))
    with pytest.raises(ValueError):
        Rule("r1", (), (Atom.of("B", x),))


def test_ruleset_rejects_duplicate_ids():
    x = var("x")
    rule = Rule("r1", (Atom.of("A", x),), (Atom.of("B", x),))
    with pytest.raises(ValueError):
        RuleSet((rule, rule))


def test_ruleset_splits_datalog_and_existential(ex1_rules):
    assert [r.id for r in ex1_rules.existential_rules] == ["r1"]
    assert [r.id for r in ex1_rules.datalog_rules] == ["r2"]


def test_cq_answer_variables_must_occur():
    x, y = var("x"), var("y")
    with pytest.raises(ValueError):
        CQ((Atom.of("A", x),), (y,))
    q = CQ((Atom.of("E", x, y),), (x, y))
    assert q.arity == 2
    assert str(q) == "?(x,y) <- E(x,y)."


def test_ucq_requires_specialized_answer_tuples():
    x, y = var("x"), var("y")
    general = CQ((Atom.of("E", x, y),), (x, y))
    merged = CQ((Atom.of("E", x, x),), (x, x))
    assert len(UCQ((general, merged), (x, y))) == 2
    swapped_only = CQ((Atom.of("E", y, x),), (y, y))
    with pytest.raises(ValueError):
        UCQ((swapped_only,), (x, x))


def test_apply_substitution_fixes_constants():
    x = var("x")
    atom = Atom.of("E", x, const("a"))
    image = apply_substitution(atom, {x: const("b"), const("a"): const("c")})
    assert image == edge("b", "a")


def test_set_partitions_counts_bell_numbers():
    assert [len(list(set_partitions(list(range(n))))) for n in range(5)] == [1, 1, 2, 5, 15]
    assert next(iter(set_partitions([1, 2, 3]))) == [[1], [2], [3]]


def test_specializations_start_with_the_tuple_itself():
    x, y = var("x"), var("y")
    assert specializations((x, y)) == [(x, y), (x, x), (y, y)]
    assert specializations((x, x)) == [(x, x)]
    assert all(is_specialization(s, (x, y)) for s in specializations((x, y)))
    assert not is_specialization((y, x), (x, y))


def test_fresh_names_skip_used_labels():
    fresh = FreshNames(["_n1", "_n3"])
    assert [fresh(), fresh(), fresh()] == ["_n2", "_n4", "_n5"]


def test_fresh_predicates_avoid_signature():
    fresh = FreshPredicates({Predicate("Q", 2)})
    assert fresh("Q", 2) == Predicate("Q_2", 2)
    assert fresh("P", 1) == Predicate("P", 1)


def test_disjoint_union_renames_second_operand():
    instance = edges("ab")
    union = disjoint_union(instance, instance)
    assert len(union) == 3
    renamed = union.adom - instance.adom
    assert len(renamed) == 2
    assert all(t.is_null for t in renamed)
