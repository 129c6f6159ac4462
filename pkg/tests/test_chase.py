import pytest

from conftest import const, edge, edges
from src.analysis import has_loop
from src.errors import UnknownTermError
from src.model import Atom, Instance, Term
from src.ruleEngine import (
    ChaseStatus,
    bounded_hom_equivalent,
    chase,
    chase_order,
    datalog_saturate,
    is_dag,
    trigger_output,
    triggers,
)
from src.scanners import parse_rules


def E(s, t):
    return Atom.of("E", s, t)


def test_depth_zero_is_the_input(ab_facts, ex1_rules):
    trace = chase(ab_facts, ex1_rules, 0)
    assert trace.depth == 0
    assert trace.final == ab_facts


def test_first_null_and_its_provenance(ab_facts, ex1_rules):
    trace = chase(ab_facts, ex1_rules, 2)
    n1 = Term.null("_n1")
    assert E(const("b"), n1) in trace.steps[1]
    assert trace.timestamp(const("a")) == 0
    assert trace.timestamp(n1) == 1
    assert trace.trigger_of(n1).rule.id == "r1"
    assert trace.trigger_of(const("a")) is None
    assert trace.term_meta[n1].frontier == {const("b")}


def test_steps_grow_monotonically(ab_facts, ex1_rules):
    trace = chase(ab_facts, ex1_rules, 4)
    for earlier, later in zip(trace.steps, trace.steps[1:]):
        assert earlier.atoms <= later.atoms
    assert edge("a", "b") in trace.steps[0]
    assert E(const("a"), Term.null("_n1")) in trace.steps[2]


def test_unknown_term_has_no_timestamp(ab_facts, ex1_rules):
    trace = chase(ab_facts, ex1_rules, 1)
    with pytest.raises(UnknownTermError):
        trace.timestamp(const("zzz"))


def test_example_without_loop_stays_acyclic(ab_facts, ex1_rules):
    trace = chase(ab_facts, ex1_rules, 6)
    assert trace.completed
    assert has_loop(trace.final) is None
    assert is_dag(trace.final)


def test_pair_rule_derives_a_loop(ab_facts, pair_rules):
    trace = chase(ab_facts, pair_rules, 3)
    assert edge("b", "b") in trace.steps[2]
    assert has_loop(trace.final) == const("b")


def test_guard_stops_the_run(ab_facts, ex1_rules):
    trace = chase(ab_facts, ex1_rules, 20, max_atoms=30)
    assert trace.status is ChaseStatus.GUARD_EXCEEDED
    assert not trace.completed
    assert trace.depth < 20


def test_triggers_are_enumerated_in_rule_order(ab_facts, ex1_rules):
    found = triggers(ab_facts, ex1_rules)
    assert [t.rule.id for t in found] == ["r1"]
    found = triggers(edges("ab", "bc"), ex1_rules)
    assert [t.rule.id for t in found] == ["r1", "r1", "r2"]


def test_trigger_output_is_deterministic(ab_facts, ex1_rules):
    trigger = triggers(ab_facts, ex1_rules)[0]
    first = trigger_output(trigger)
    assert first == trigger_output(trigger)
    assert E(const("b"), Term.null("_n1")) in first
    avoided = trigger_output(trigger, avoid=["_n1"])
    assert E(const("b"), Term.null("_n2")) in avoided


def test_datalog_saturation_reaches_a_fixpoint(ex1_rules):
    _, transitivity = ex1_rules.rules
    trace = datalog_saturate(edges("ab", "bc", "cd"), [transitivity])
    assert trace.completed
    assert trace.saturated_at is not None
    assert {edge("a", "c"), edge("a", "d"), edge("b", "d")} <= trace.final.atoms
    assert edge("c", "a") not in trace.final


def test_datalog_saturation_refuses_existentials(ex1_rules):
    with pytest.raises(ValueError):
        datalog_saturate(Instance(), ex1_rules)


def test_saturated_run_pads_to_the_requested_depth():
    rules = parse_rules("A(x) -> B(x) .")
    trace = chase(Instance.of(Atom.of("A", const("a"))), rules, 4)
    assert trace.depth == 4
    assert trace.saturated_at == 2
    assert trace.final == trace.steps[1]


def test_chase_order_follows_edges(ab_facts, ex1_rules):
    trace = chase(ab_facts, ex1_rules, 2)
    order = chase_order(trace)
    n1 = Term.null("_n1")
    assert order.reaches(const("a"), n1)
    assert not order.reaches(n1, const("a"))
    assert order.leq(n1, n1)


def test_bounded_equivalence_of_chase_prefixes(ab_facts, pair_rules):
    shallow = chase(ab_facts, pair_rules, 3)
    deep = chase(ab_facts, pair_rules, 4)
    forward, backward = bounded_hom_equivalent(shallow, deep)
    assert forward
    assert backward
