import itertools
import random

import pytest

from conftest import const, edge, edges, var
from src.errors import PreconditionError
from src.homomorphisms import (
    TargetIndex,
    core,
    cq_isomorphic,
    entails,
    find_hom,
    hom_equivalent,
    iter_homs,
    subsumes,
)
from src.model import CQ, UCQ, Atom, Instance

x, y, z, w = var("x"), var("y"), var("z"), var("w")


def E(s, t):
    return Atom.of("E", s, t)


def test_find_hom_maps_variables_and_fixes_constants():
    hom = find_hom([E(x, y)], edges("ab"))
    assert hom(x) == const("a") and hom(y) == const("b")
    assert find_hom([E(const("b"), y)], edges("ab")) is None


def test_iter_homs_enumerates_all_matches():
    homs = list(iter_homs([E(x, y)], edges("ab", "bc")))
    assert len(homs) == 2
    assert len(set(homs)) == 2


def test_seed_is_respected():
    assert find_hom([E(x, y)], edges("ab", "bc"), {x: const("b")})(y) == const("c")
    assert find_hom([E(x, y)], edges("ab"), {x: const("c")}) is None


def test_injective_search_keeps_terms_apart():
    path = [E(x, y), E(y, z)]
    loop = edges("aa")
    assert find_hom(path, loop) is not None
    assert find_hom(path, loop, injective=True) is None
    assert find_hom(path, edges("ab", "bc"), injective=True) is not None


def test_entails_checks_tuple_length():
    q = CQ((E(x, y),), (x, y))
    assert entails(edges("ab"), q, (const("a"), const("b"))) is not None
    assert entails(edges("ab"), q, (const("b"), const("a"))) is None
    with pytest.raises(PreconditionError):
        entails(edges("ab"), q, (const("a"),))


def test_entails_returns_first_witnessing_disjunct():
    first = CQ((E(x, x),), ())
    second = CQ((E(x, y),), ())
    disjunct, _ = entails(TargetIndex(edges("ab")), UCQ((first, second)))
    assert disjunct == second


def test_core_removes_redundant_atoms():
    q = CQ((E(x, y), E(x, z)), (x,))
    assert len(core(q).atoms) == 1
    fixed = CQ((E(x, y), E(x, z)), (x, y, z))
    assert len(core(fixed).atoms) == 2


def test_subsumption_aligns_answer_positions():
    general = CQ((E(x, y),), (x, y))
    specific = CQ((E(x, y), E(y, z)), (x, y))
    assert subsumes(general, specific)
    assert not subsumes(specific, general)
    flipped = CQ((E(y, x),), (x, y))
    assert not subsumes(general, flipped)


def test_isomorphism_up_to_renaming():
    first = CQ((E(x, y), E(y, z)), (x,))
    second = CQ((E(w, z), E(z, y)), (w,))
    assert cq_isomorphic(first, second)
    assert not cq_isomorphic(first, CQ((E(x, y), E(y, z)), (z,)))


def test_hom_equivalent_instances():
    assert hom_equivalent(edges("ab", "ba").thawed(), edges("ab", "ba", "cd", "dc").thawed())
    assert not hom_equivalent(edges("ab").thawed(), edges("aa").thawed())


def _brute_force(atoms, target):
    variables = sorted({t for a in atoms for t in a.args}, key=lambda t: t.label)
    domain = sorted(target.adom, key=lambda t: t.label)
    for image in itertools.product(domain, repeat=len(variables)):
        mapping = dict(zip(variables, image))
        if all(Atom(a.predicate, tuple(mapping[t] for t in a.args)) in target for a in atoms):
            return True
    return False


def test_find_hom_agrees_with_brute_force():
    rng = random.Random(7)
    pool = [x, y, z, w]
    constants = "abc"
    for _ in range(150):
        atoms = [E(rng.choice(pool), rng.choice(pool)) for _ in range(rng.randint(1, 4))]
        target = Instance.of(*(edge(rng.choice(constants), rng.choice(constants)) for _ in range(rng.randint(1, 5))))
        assert (find_hom(atoms, target) is not None) == _brute_force(atoms, target)
