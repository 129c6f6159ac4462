import pytest

from conftest import CORPUS, FIXTURES, const, var
from src.config import RewritingBudget
from src.errors import RewritingBudgetExceeded, SignatureError, SurgeryError
from src.model import TOP, Atom, Instance, Predicate, RuleSet, Term
from src.ruleEngine import chase
from src.sampling import random_instances
from src.scanners import load_rules, parse_facts, parse_rules
from src.surgery import (
    ObligationStatus,
    body_rewrite,
    body_rewrite_obligation,
    check_forward_existential,
    check_head_preservation,
    check_predicate_unique,
    check_quick_empirical,
    check_signature_tripartition,
    encode_db,
    regalize,
    reification_projection_rules,
    reify,
    reify_signature,
    rewrite_bodies,
    split_datalog,
    streamline,
    streamline_role,
    unique_rule_id,
)


def test_encode_db_turns_facts_into_a_rule(ab_facts):
    rule = encode_db(ab_facts)
    assert rule.id == "r_db"
    assert rule.body == (TOP,)
    assert rule.head == (Atom.of("E", var("v1"), var("v2")),)
    assert rule.existentials == {var("v1"), var("v2")}


def test_encode_db_rejects_the_trivial_instance():
    with pytest.raises(SurgeryError):
        encode_db(Instance())


def test_encoded_rule_recreates_the_instance(ab_facts):
    encoded = RuleSet((encode_db(ab_facts),))
    final = chase(Instance(), encoded, 1).final
    assert len(final) == len(ab_facts)
    assert all(t.is_null for t in final.adom)


def test_reify_single_atom():
    atom = Atom.of("T", var("x"), var("y"), var("z"))
    assert reify(atom) == (
        Atom.of("T_1", var("x"), var("w1")),
        Atom.of("T_2", var("y"), var("w1")),
        Atom.of("T_3", var("z"), var("w1")),
    )


def test_reify_instance_uses_fresh_nulls():
    reified = reify(parse_facts("T(a,b,c). E(a,b)."))
    identifier = Term.null("_r1")
    assert Atom.of("T_1", const("a"), identifier) in reified
    assert Atom.of("T_3", const("c"), identifier) in reified
    assert Atom.of("E", const("a"), const("b")) in reified
    assert all(p.arity <= 2 for p in reified.signature)


def test_reify_rule_makes_head_identifier_existential():
    rules = load_rules(FIXTURES / "corpus" / "ternary.rules")
    reified = reify(rules).get("r1")
    assert len(reified.body) == 3
    assert len(reified.head) == 3
    assert len(reified.existentials) == 2
    assert reify_signature(rules.signature) == {Predicate(f"T_{i}", 2) for i in (1, 2, 3)}


def test_reify_refuses_name_clashes():
    rules = parse_rules("T(x,y,z), T_1(x,y) -> A(x) .")
    with pytest.raises(SurgeryError):
        reify(rules)


def test_projection_rules_only_for_wide_predicates():
    projection = reification_projection_rules({Predicate("T", 3), Predicate("E", 2)})
    assert [r.id for r in projection] == ["proj_T"]


def test_streamline_splits_existential_rules(ex1_rules):
    streamlined = streamline(ex1_rules)
    assert [r.id for r in streamlined] == ["r1_init", "r1_ex", "r1_dl", "r2"]
    init, ex, dl = streamlined.rules[:3]
    assert [str(a) for a in init.head] == ["A0_r1(w1)", "A_r1_1(y,w1)"]
    assert [str(a) for a in ex.head] == ["B_r1_1_1(y,z)", "B_r1_2_1(w1,z)"]
    assert dl.is_datalog
    assert dl.head == ex1_rules.get("r1").head
    assert [streamline_role(r.id) for r in streamlined] == ["init", "ex", "dl", None]
    assert check_signature_tripartition(ex1_rules, streamlined)


def test_streamline_requires_binary_signature():
    with pytest.raises(SignatureError):
        streamline(parse_rules("T(x,y,z) -> ? w : T(y,z,w) ."))


def test_streamlined_rules_are_regal_shaped(pair_rules):
    streamlined = streamline(pair_rules)
    assert check_forward_existential(streamlined)
    assert check_predicate_unique(streamlined)


def test_forward_existential_violation_names_the_rule():
    result = check_forward_existential(parse_rules("A(x) -> ? y : E(y,x) ."))
    assert not result
    assert result.rule_id == "r1"


def test_predicate_unique_violation():
    result = check_predicate_unique(parse_rules("A(x) -> ? y, z : E(x,y), E(x,z) ."))
    assert not result


def test_quickness_fails_on_two_step_derivations():
    rules = parse_rules("A(x), E(x,y) -> B(y) .\nB(x) -> C(x) .")
    samples = [parse_facts("A(a). E(a,b).")]
    result = check_quick_empirical(rules, samples, depth=3)
    assert not result
    assert result.atom == "C(b)"
    assert result.instance_index == 0


def test_body_rewriting_restores_quickness():
    rules = parse_rules("A(x), E(x,y) -> B(y) .\nB(x) -> C(x) .")
    rewritten = body_rewrite(rules)
    assert len(rewritten) > len(rules)
    assert check_quick_empirical(rewritten, [parse_facts("A(a). E(a,b).")], depth=3)
    assert check_head_preservation(rules, rewritten)


def test_body_rewrite_obligation_depths():
    rules = parse_rules("A(x), E(x,y) -> B(y) .\nB(x) -> C(x) .")
    rewritten = body_rewrite(rules)
    sample = [parse_facts("A(a). E(a,b).")]
    (result,) = body_rewrite_obligation(rules, rewritten, rewriting_depth=1, depth=1).run(sample)
    assert result.passed
    assert result.detail == "depth 1 vs 2"
    (equal_depth,) = body_rewrite_obligation(rules, rewritten, rewriting_depth=0, depth=1).run(sample)
    assert equal_depth.forward
    assert not equal_depth.backward

NULL_PARTNER = "A(x) -> ? y : N(x,y) .\nN(x,y) -> D(x), M(y) ."


def test_quickness_checks_atoms_from_triggers_that_bind_nulls():
    result = check_quick_empirical(parse_rules(NULL_PARTNER), [parse_facts("A(a).")], depth=3)
    assert not result
    assert result.atom == "D(a)"
    assert result.rule_id == "r2"


def test_quickness_on_a_two_step_chain_and_on_no_rules():
    sample = [parse_facts("A(a,b).")]
    chained = check_quick_empirical(parse_rules("A(x,y) -> B(x,y) .\nB(x,y) -> C(x,y) ."), sample, depth=2)
    assert chained.atom == "C(a,b)"
    assert check_quick_empirical(RuleSet(), sample, depth=2)


def test_body_rewriting_splits_heads_that_drop_frontier_variables():
    rules = parse_rules(NULL_PARTNER)
    rewriting = rewrite_bodies(rules)
    (derived,) = rewriting.added["r2"]
    assert derived.id == "r2_h1_rw1"
    assert [a.predicate.name for a in derived.body] == ["A"]
    assert [a.predicate.name for a in derived.head] == ["D"]
    assert set(rewriting.runs) == {"r1", "r2", "r2_h1", "r2_h2"}
    assert check_quick_empirical(rewriting.rules, [parse_facts("A(a).")], depth=3)
    assert check_head_preservation(rules, rewriting.rules)


def test_body_rewriting_of_transitivity_exceeds_budget(ex1_rules):
    with pytest.raises(RewritingBudgetExceeded) as excinfo:
        rewrite_bodies(streamline(ex1_rules), RewritingBudget(max_generations=3))
    assert excinfo.value.rule_id == "r2"
    assert not excinfo.value.run.converged


def test_split_datalog(ex1_rules):
    datalog, existential = split_datalog(ex1_rules)
    assert [r.id for r in datalog] == ["r2"]
    assert [r.id for r in existential] == ["r1"]


def test_unique_rule_id_avoids_taken_ids():
    rules = parse_rules("A(x) -> B(x) .")
    assert unique_rule_id(rules, "r_db") == "r_db"
    assert unique_rule_id(rules, "r1") == "r1_1"


def test_regalize_pair_rules_is_regal(pair_rules, ab_facts):
    output, report = regalize(ab_facts, pair_rules, samples=5)
    assert output.name == "pair_regal"
    assert report.is_regal
    assert [s.name for s in report.stages] == ["encode-db", "reify", "streamline", "body-rewrite"]
    assert report.fresh_predicates
    assert not report.results
    assert report.to_dict()["flags"]["pu"]["holds"]


def test_regalize_example_one_exceeds_budget(ex1_rules, ab_facts):
    with pytest.raises(RewritingBudgetExceeded):
        regalize(ab_facts, ex1_rules, RewritingBudget(max_generations=3), samples=2)


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_regalized_corpus_keeps_its_flags(path):
    rules = load_rules(path)
    output, report = regalize(Instance(), rules, samples=5)
    assert check_forward_existential(output)
    assert check_predicate_unique(output)
    samples = random_instances(reify_signature(report.input_signature), 5, seed=3)
    assert check_quick_empirical(output, samples, depth=3)


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_surgery_obligations_hold_on_corpus(path):
    rules = load_rules(path)
    _, report = regalize(Instance(), rules, samples=2, obligation_depth=2, obligation_samples=2, max_atoms=5000)
    results = report.run_obligations()
    assert results
    assert report.obligations_passed
    assert {r.name for r in results} >= {"reify", "streamline", "body-rewrite", "skeleton"}


def test_encode_db_obligation_runs_with_an_instance(pair_rules, ab_facts):
    _, report = regalize(ab_facts, pair_rules, samples=2, obligation_depth=2, obligation_samples=2)
    assert report.obligations[0].name == "encode-db"
    results = report.obligations[0].run(report.obligation_samples)
    assert all(r.status is not ObligationStatus.FAILED for r in results)
