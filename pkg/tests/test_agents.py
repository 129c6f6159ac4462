import asyncio

import pytest

from agents import ReportAgent, StageOutcome, ValleyAgent, Verdict
from conftest import edges
from src.analysis import TWO_MAXIMAL, find_tournament
from src.config import RunConfig
from src.errors import SoundnessError
from src.model import Instance, RuleSet
from src.ruleEngine import chase, datalog_saturate
from src.scanners import parse_rules
from src.surgery import split_datalog

SHARED_PARENT = """
true -> ? o, a, b, c, d : L(o,a), L(o,b), L(o,c), L(o,d), M(o,a), M(o,b), M(o,c), M(o,d) .
L(u,x), M(u,y) -> E(x,y) .
"""


def run_valley_stage(rules, prefix, tournament, config=None):
    agent = ValleyAgent()
    result = asyncio.run(agent.process({
        "rules": rules,
        "prefix": prefix,
        "tournament": tournament,
        "config": config or RunConfig(),
        "correlation_id": "test",
    }))
    return agent, result


def test_valley_stage_derives_loop_from_shared_parent():
    rules = parse_rules(SHARED_PARENT)
    datalog, existential = split_datalog(rules)
    prefix = chase(Instance(), existential, 1)
    saturated = datalog_saturate(prefix.final, datalog).final
    tournament = find_tournament(saturated, 4)
    agent, result = run_valley_stage(rules, prefix, tournament)
    outcome = result["outcome"]
    assert outcome.verdict is Verdict.LOOP_ENTAILED
    assert result["loop"].case == TWO_MAXIMAL
    assert outcome.data["palette"] == [outcome.data["monochromatic"]["color"]]
    assert outcome.data["capacity_note"] is None
    assert outcome.data["peak_removals"] == 0
    assert [e.event_type for e in agent.events_published] == ["ValleyAnalysisCompleted"]


def test_valley_stage_without_monochromatic_four_confirms_machinery():
    prefix = chase(edges("ab", "bc", "ac"), RuleSet(), 0)
    tournament = find_tournament(prefix.final, 3)
    _, result = run_valley_stage(RuleSet(), prefix, tournament, RunConfig(k_target=3))
    outcome = result["outcome"]
    assert outcome.verdict is Verdict.MACHINERY_CONFIRMED
    assert outcome.data["monochromatic"] is None
    assert "not guaranteed" in outcome.data["capacity_note"]


def test_single_maximal_edge_query_is_unsound():
    prefix = chase(edges("ab", "ac", "ad", "bc", "bd", "cd"), RuleSet(), 0)
    tournament = find_tournament(prefix.final, 4)
    with pytest.raises(SoundnessError):
        run_valley_stage(RuleSet(), prefix, tournament)


def test_report_needs_a_deciding_stage():
    undecided = StageOutcome("regalize", True, "ok")
    with pytest.raises(SoundnessError):
        asyncio.run(ReportAgent().process({"outcomes": [undecided], "correlation_id": "test"}))


def test_report_takes_the_last_verdict():
    outcomes = [
        StageOutcome("regalize", True, "ok", {"obligations": []}),
        StageOutcome("chase", False, "guard", verdict=Verdict.INCONCLUSIVE, reason="guard"),
    ]
    report = asyncio.run(ReportAgent().process({"outcomes": outcomes, "correlation_id": "test"}))
    assert (report.verdict, report.reason, report.decided_by) == (Verdict.INCONCLUSIVE, "guard", "chase")
    assert report.notes == ["surgery obligations were not run"]
