import random

import pytest

from src.analysis import Ordering, TimestampMultiset, lex_minimum, mlex_compare, timestamps_of
from src.errors import UnknownTermError
from src.model import Term
from src.ruleEngine import chase

M = TimestampMultiset.of


def _random_multiset(rng: random.Random) -> TimestampMultiset:
    return TimestampMultiset(rng.randint(0, 4) for _ in range(rng.randint(0, 5)))


def _oracle(left: TimestampMultiset, right: TimestampMultiset) -> Ordering:
    a, b = left.descending(), right.descending()
    if a == b:
        return Ordering.EQUAL
    return Ordering.LESS if a < b else Ordering.GREATER


def test_maxima_decide_first():
    assert M(3) > M(2, 2, 2)
    assert M(2, 1) < M(2, 1, 1)
    assert M(2, 1, 0) < M(2, 2)


def test_empty_multiset_is_least():
    assert M() < M(0)
    assert mlex_compare(M(), M()) is Ordering.EQUAL


def test_equality_ignores_insertion_order():
    assert M(1, 2, 2) == M(2, 1, 2)
    assert hash(M(1, 2, 2)) == hash(M(2, 2, 1))
    assert M(1, 2) != M(1, 2, 2)


def test_multiset_operations():
    left, right = M(1, 1, 2), M(1, 3)
    assert left.union(right) == M(1, 1, 1, 2, 3)
    assert left.intersection(right) == M(1)
    assert left.difference(right) == M(1, 2)
    assert left.remove_one(1) == M(1, 2)
    assert left.remove_one(7) == left
    assert left.count(1) == 2
    assert left.max() == 2
    assert M().max() is None


def test_negative_elements_are_rejected():
    with pytest.raises(ValueError):
        M(-1)


def test_order_matches_descending_sequences():
    rng = random.Random(5)
    for _ in range(300):
        left, right = _random_multiset(rng), _random_multiset(rng)
        assert mlex_compare(left, right) is _oracle(left, right)


def test_order_is_total_and_transitive():
    rng = random.Random(9)
    pool = [_random_multiset(rng) for _ in range(25)]
    for a in pool:
        for b in pool:
            forward, backward = mlex_compare(a, b), mlex_compare(b, a)
            assert (forward is Ordering.EQUAL) == (backward is Ordering.EQUAL) == (a == b)
            if forward is Ordering.LESS:
                assert backward is Ordering.GREATER
                for c in pool:
                    if mlex_compare(b, c) is Ordering.LESS:
                        assert mlex_compare(a, c) is Ordering.LESS


def test_lex_minimum_is_the_least_member():
    rng = random.Random(13)
    for _ in range(100):
        members = [_random_multiset(rng) for _ in range(rng.randint(1, 6))]
        least = lex_minimum(members)
        assert least in members
        assert all(least <= m for m in members)
    assert lex_minimum([]) is None


def test_timestamps_of_chase_terms(ab_facts, ex1_rules):
    trace = chase(ab_facts, ex1_rules, 2)
    a, b, n1 = Term.constant("a"), Term.constant("b"), Term.null("_n1")
    assert timestamps_of([a, b, n1], trace) == M(0, 0, 1)
    assert timestamps_of([n1, n1], trace) == M(1)
    with pytest.raises(UnknownTermError):
        timestamps_of([Term.null("_n99")], trace)
