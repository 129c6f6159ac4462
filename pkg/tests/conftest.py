"""Shared fixtures for the regal rules toolkit tests."""

from pathlib import Path

import pytest

from src.model import Atom, Instance, Term
from src.scanners import load_facts, load_query, load_rules

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = sorted((FIXTURES / "corpus").glob("*.rules"))


def const(label: str) -> Term:
    return Term.constant(label)


def var(label: str) -> Term:
    return Term.variable(label)


def edge(s: str, t: str, predicate: str = "E") -> Atom:
    return Atom.of(predicate, const(s), const(t))


def edges(*pairs: str, predicate: str = "E") -> Instance:
    """edges("ab", "bc") is {E(a,b), E(b,c)}"""
    return Instance.of(*(edge(p[0], p[1], predicate) for p in pairs))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def ex1_rules():
    return load_rules(FIXTURES / "ex1.rules")


@pytest.fixture
def pair_rules():
    return load_rules(FIXTURES / "pair.rules")


@pytest.fixture
def ab_facts():
    return load_facts(FIXTURES / "ab.facts")


@pytest.fixture
def loop_query():
    return load_query(FIXTURES / "loop.cq")


@pytest.fixture
def edge_cq():
    return load_query(FIXTURES / "edge.cq")
