import pytest

from conftest import const, edges
from src.analysis import (
    DISCONNECTED,
    TWO_MAXIMAL,
    defines_tournament,
    path_function_check,
    size4_loop_analysis,
)
from src.errors import PreconditionError, SoundnessError
from src.model import Atom, Instance
from src.scanners import parse_query

K = [const(f"k{i}") for i in range(1, 5)]


def fan(predicate: str, root: str = "o") -> list:
    return [Atom.of(predicate, const(root), k) for k in K]


def test_path_function_finds_two_lower_images():
    q = parse_query("?(y,x) <- E(x,y).")
    result = path_function_check(q, edges("ab", "cb"))
    assert not result
    assert result.counterexample == (const("b"), (const("a"),), (const("c"),))
    assert result.to_dict()["counterexample"] == ["b", ["a"], ["c"]]


def test_path_function_holds_on_disjoint_edges():
    q = parse_query("?(y,x) <- E(x,y).")
    assert path_function_check(q, edges("ab", "cd")).holds


def test_path_function_needs_lower_variables_below():
    with pytest.raises(PreconditionError):
        path_function_check(parse_query("?(x,y) <- E(x,y)."), edges("ab"))


def test_two_maximal_case_finds_loop():
    q = parse_query("?(x,y) <- L(u,x), M(u,y).")
    prefix = Instance.of(*fan("L"), *fan("M"))
    assert defines_tournament(q, K, prefix)
    loop = size4_loop_analysis(q, K, prefix)
    assert loop.case == TWO_MAXIMAL
    assert loop.loop_term == const("k2")
    assert loop.to_dict()["loop_term"] == "k2"


def test_disconnected_case_finds_loop():
    q = parse_query("?(x,y) <- C(x), C(y).")
    prefix = Instance.of(*(Atom.of("C", k) for k in K))
    loop = size4_loop_analysis(q, K, prefix)
    assert loop.case == DISCONNECTED
    assert loop.loop_term == const("k1")


def test_single_maximal_case_is_impossible():
    q = parse_query("?(x,y) <- E(y,x).")
    prefix = edges("12", "13", "14", "23", "24", "34")
    vertices = [const(str(i)) for i in range(1, 5)]
    with pytest.raises(SoundnessError):
        size4_loop_analysis(q, vertices, prefix)


def test_loop_analysis_preconditions():
    prefix = Instance.of(*fan("L"), *fan("M"))
    with pytest.raises(PreconditionError):
        size4_loop_analysis(parse_query("?(x,y) <- L(x,u), M(y,u)."), K, prefix)
    with pytest.raises(PreconditionError):
        size4_loop_analysis(parse_query("?(x,y) <- L(u,x), M(u,y)."), K[:3], prefix)
    with pytest.raises(PreconditionError):
        size4_loop_analysis(parse_query("?(x,y) <- L(u,x), M(u,y)."), K, Instance())
