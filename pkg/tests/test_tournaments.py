import itertools
import random

import pytest
from networkx.algorithms.tournament import random_tournament

from conftest import const, edge, edges
from src.analysis import (
    MONOCHROMATIC_LIMIT,
    Tournament,
    find_tournament,
    has_loop,
    max_tournament,
    monochromatic_subtournament,
    pair_key,
    ramsey_capacity_note,
)
from src.errors import PreconditionError
from src.model import Instance


def _from_digraph(graph) -> Instance:
    return Instance.of(*(edge(f"c{s}", f"c{t}") for s, t in graph.edges))


def _random_instance(rng: random.Random, n: int) -> Instance:
    atoms = [edge(f"c{s}", f"c{t}") for s in range(n) for t in range(n) if rng.random() < 0.35]
    return Instance.of(*atoms)


def _largest_tournament(instance: Instance) -> int:
    vertices = sorted(instance.adom, key=lambda t: t.label)
    arcs = {(a.args[0], a.args[1]) for a in instance.atoms if a.predicate.arity == 2}
    for k in range(len(vertices), 0, -1):
        for subset in itertools.combinations(vertices, k):
            if all((s, t) in arcs or (t, s) in arcs for s, t in itertools.combinations(subset, 2)):
                return k
    return 0


def test_random_tournaments_are_found_whole():
    for n in range(2, 8):
        instance = _from_digraph(random_tournament(n, seed=n))
        found = find_tournament(instance, n)
        assert found is not None
        assert found.size == n
        assert found.is_complete()
        assert find_tournament(instance, n + 1) is None


def test_max_tournament_matches_brute_force():
    rng = random.Random(21)
    for _ in range(40):
        instance = _random_instance(rng, rng.randint(2, 7))
        assert max_tournament(instance).size == _largest_tournament(instance)


def test_tournament_vertices_are_canonically_ordered():
    found = find_tournament(edges("cb", "ba", "ca"), 3)
    assert [v.label for v in found.vertices] == ["a", "b", "c"]
    assert found.orientations(const("b"), const("a")) == [(const("b"), const("a"))]
    assert found.to_dict()["arcs"] == [["b", "a"], ["c", "a"], ["c", "b"]]


def test_loops_do_not_count_as_tournament_edges():
    assert max_tournament(edges("aa", "bb")).size == 1
    assert has_loop(edges("ab", "bb", "aa")) == const("a")
    assert has_loop(edges("ab")) is None


def test_tournament_size_must_be_positive():
    with pytest.raises(PreconditionError):
        find_tournament(edges("ab"), 0)


def test_within_rejects_non_tournaments():
    with pytest.raises(PreconditionError):
        Tournament.within(edges("ab", "bc"), [const("a"), const("b"), const("c")])


def test_cap_stops_the_search_early():
    instance = _from_digraph(random_tournament(6, seed=1))
    assert max_tournament(instance, cap=4).size == 4


def test_other_edge_predicates():
    instance = edges("ab", "bc", "ca", predicate="F")
    assert max_tournament(instance).size == 1
    assert max_tournament(instance, predicate="F").size == 3


def _coloring(tournament: Tournament, rng: random.Random, palette: int):
    return {pair_key(s, t): rng.randrange(palette) for s, t in itertools.combinations(tournament.vertices, 2)}


def _has_monochromatic(tournament: Tournament, coloring, size: int) -> bool:
    for subset in itertools.combinations(tournament.vertices, size):
        colors = {coloring[pair_key(s, t)] for s, t in itertools.combinations(subset, 2)}
        if len(colors) == 1:
            return True
    return False


def test_monochromatic_extraction_matches_brute_force():
    rng = random.Random(4)
    for n in range(4, 8):
        instance = _from_digraph(random_tournament(n, seed=10 + n))
        tournament = max_tournament(instance)
        for _ in range(5):
            coloring = _coloring(tournament, rng, 2)
            sub = monochromatic_subtournament(tournament, coloring, 4)
            assert (sub is not None) == _has_monochromatic(tournament, coloring, 4)
            if sub is not None:
                colors = {coloring[pair_key(s, t)] for s, t in itertools.combinations(sub.vertices, 2)}
                assert len(colors) == 1
                assert sub.is_complete()


def test_single_colour_always_yields_a_subtournament():
    tournament = max_tournament(_from_digraph(random_tournament(5, seed=2)))
    coloring = {key: 0 for key in tournament.pairs()}
    sub = monochromatic_subtournament(tournament, coloring, 4)
    assert sub.size == 4
    assert monochromatic_subtournament(tournament, coloring, 6) is None


def test_monochromatic_search_is_bounded():
    instance = _from_digraph(random_tournament(MONOCHROMATIC_LIMIT + 1, seed=0))
    tournament = max_tournament(instance)
    coloring = {key: 0 for key in tournament.pairs()}
    with pytest.raises(PreconditionError):
        monochromatic_subtournament(tournament, coloring, 4)


def test_capacity_note():
    assert ramsey_capacity_note(8, 2) is None
    assert "not guaranteed" in ramsey_capacity_note(5, 2)
    assert ramsey_capacity_note(4, 0) is None
