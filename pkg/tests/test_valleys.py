import pytest

from conftest import const, edges, var
from src.analysis import (
    TimestampMultiset,
    below,
    color_tournament,
    derive_valley,
    find_tournament,
    is_valley_query,
    maximal_variables,
    minimal_witness,
    peak_removal_step,
    query_graph,
    valley_witness,
    witnesses,
)
from src.errors import AlreadyValleyError, PreconditionError, SignatureError, SoundnessError
from src.model import UCQ, Instance, RuleSet, Term
from src.ruleEngine import chase, injectivize
from src.scanners import parse_facts, parse_query, parse_rules

x, y, z = var("x"), var("y"), var("z")

PEAK_RULES = """
true -> ? s, t : A(s), B(t) .
A(s), B(t) -> ? p : P(s,p), P(t,p) .
"""

PEAKED = parse_query("?(x,y) <- P(x,z), P(y,z).")
FLAT = parse_query("?(x,y) <- A(x), B(y).")


@pytest.fixture
def peak_trace():
    return chase(Instance(), parse_rules(PEAK_RULES), 2)


@pytest.fixture
def peak_query():
    return UCQ((PEAKED, FLAT), (x, y))


def test_valley_queries():
    assert is_valley_query(parse_query("?(x,y) <- E(x,y)."))
    assert is_valley_query(parse_query("?(x,y) <- E(x,z), E(z,y)."))
    assert is_valley_query(parse_query("?(x,y) <- C(x), C(y)."))
    assert not is_valley_query(PEAKED)
    assert not is_valley_query(parse_query("?(x,y) <- E(x,y), E(y,x)."))


def test_maximal_and_lower_variables():
    path = parse_query("?(x,y) <- E(x,z), E(z,y).")
    assert maximal_variables(path) == [y]
    assert below(path, y) == {x, z}
    assert below(path, x) == frozenset()
    assert maximal_variables(PEAKED) == [z]


def test_query_graph_needs_binary_atoms():
    with pytest.raises(SignatureError):
        query_graph(parse_query("?(x) <- T(x,y,z)."))


def test_witnesses_are_ordered_by_disjunct(peak_trace, peak_query):
    s, t = Term.null("_n1"), Term.null("_n2")
    found = witnesses(s, t, peak_query, peak_trace.final)
    assert [w.index for w in found] == [0, 1]
    assert found[0].hom(z) == Term.null("_n3")
    assert found[0].timestamps(peak_trace) == TimestampMultiset.of(1, 1, 2)
    assert minimal_witness(found, peak_trace) is found[1]
    assert [w.index for w in witnesses(t, s, peak_query, peak_trace.final)] == [0]


def test_witnesses_need_a_binary_query(peak_trace):
    with pytest.raises(PreconditionError):
        witnesses(Term.null("_n1"), Term.null("_n2"), UCQ.single(parse_query("?(x) <- A(x).")), peak_trace.final)


def test_peak_removal_descends_to_a_valley(peak_trace, peak_query):
    s, t = Term.null("_n1"), Term.null("_n2")
    peaked = witnesses(s, t, peak_query, peak_trace.final)[0]
    derivation = derive_valley(s, t, peak_query, peak_trace, start=peaked)
    assert derivation.iterations == 1
    assert derivation.final.disjunct == FLAT
    assert list(derivation.multisets) == [TimestampMultiset.of(2, 1, 1), TimestampMultiset.of(1, 1)]
    assert derivation.multisets[1] < derivation.multisets[0]
    assert derivation.to_dict()["valley"]["valley"] is True


def test_valley_witness_starts_from_a_minimal_witness(peak_trace, peak_query):
    s, t = Term.null("_n1"), Term.null("_n2")
    witness = valley_witness(s, t, peak_query, peak_trace)
    assert is_valley_query(witness.disjunct)
    assert derive_valley(s, t, peak_query, peak_trace).iterations == 0


def test_peak_removal_refuses_valleys(peak_trace, peak_query):
    s, t = Term.null("_n1"), Term.null("_n2")
    flat = witnesses(s, t, peak_query, peak_trace.final)[1]
    with pytest.raises(AlreadyValleyError):
        peak_removal_step(flat, peak_trace, peak_query)


def test_peak_removal_can_be_restricted_to_rules(peak_trace, peak_query):
    s, t = Term.null("_n1"), Term.null("_n2")
    peaked = witnesses(s, t, peak_query, peak_trace.final)[0]
    first_rule = RuleSet((peak_trace.rules.get("r1"),))
    with pytest.raises(PreconditionError):
        peak_removal_step(peaked, peak_trace, peak_query, first_rule)


def test_peak_removal_needs_chase_created_peaks(peak_query):
    trace = chase(parse_facts("P(a,c). P(b,c)."), RuleSet(), 0)
    peaked = witnesses(const("a"), const("b"), peak_query, trace.final)[0]
    with pytest.raises(PreconditionError):
        peak_removal_step(peaked, trace, peak_query)


def test_missing_witness_is_a_precondition_failure(peak_trace, peak_query):
    with pytest.raises(PreconditionError):
        derive_valley(Term.null("_n1"), Term.null("_n3"), peak_query, peak_trace)


def test_colouring_uses_least_valley_disjunct():
    instance = edges("ab", "bc", "ac")
    tournament = find_tournament(instance, 3)
    q_inj = injectivize(UCQ.single(parse_query("?(x,y) <- E(x,y).")))
    found = {arc: witnesses(arc[0], arc[1], q_inj, instance) for arc in tournament.arcs}
    coloring = color_tournament(tournament, found)
    assert len(coloring) == 3
    assert {c.color for c in coloring.values()} == {0}
    ab = coloring[(const("a"), const("b"))]
    assert (ab.source, ab.target) == (const("a"), const("b"))


def test_colouring_without_witness_is_unsound():
    tournament = find_tournament(edges("ab"), 2)
    with pytest.raises(SoundnessError):
        color_tournament(tournament, {})
