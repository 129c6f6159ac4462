import json

from cli import EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE, main
from conftest import FIXTURES

EX1 = str(FIXTURES / "ex1.rules")
PAIR = str(FIXTURES / "pair.rules")
AB = str(FIXTURES / "ab.facts")
LOOP = str(FIXTURES / "loop.cq")


def test_chase_emits_json_trace(capsys):
    assert main(["chase", "--rules", EX1, "--facts", AB, "--depth", "2", "--emit", "json"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["status"] == "completed"
    assert [s["index"] for s in document["steps"]] == [0, 1, 2]
    first_null = next(t for t in document["terms"] if t["name"] == "_n1")
    assert (first_null["timestamp"], first_null["rule"]) == (1, "r1")


def test_chase_text_lists_atoms_per_step(capsys):
    assert main(["chase", "--rules", EX1, "--facts", AB, "--depth", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "% step 0\nE(a,b).\n" in out
    assert "E(b,_n1)." in out


def test_diverging_rewriting_exits_inconclusive(capsys):
    code = main(["rewrite", "--rules", EX1, "--query", LOOP, "--generations", "6"])
    assert code == EXIT_INCONCLUSIVE
    assert "BudgetExceeded" in capsys.readouterr().err


def test_parse_error_is_a_usage_failure(tmp_path, capsys):
    broken = tmp_path / "broken.rules"
    broken.write_text("E(x,y) -> ? z E(y,z) .\n")
    assert main(["parse", "--rules", str(broken)]) == EXIT_USAGE
    assert "ParseError" in capsys.readouterr().err


def test_missing_input_is_a_usage_failure(capsys):
    assert main(["chase", "--facts", AB]) == EXIT_USAGE
    assert main(["no-such-command"]) == EXIT_USAGE


def test_parse_round_trips_facts(capsys):
    assert main(["parse", "--facts", AB]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "E(a,b)."


def test_verify_pawn_reports_a_loop(capsys):
    assert main(["verify-pawn", "--rules", PAIR, "--facts", AB, "--samples", "2", "--emit", "json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["verdict"] == "LoopEntailed"


def test_verify_pawn_budget_is_inconclusive(capsys):
    assert main(["verify-pawn", "--rules", EX1, "--facts", AB, "--generations", "3", "--samples", "2"]) == EXIT_INCONCLUSIVE
    assert "Inconclusive: body_rewrite" in capsys.readouterr().err
