"""
Seeded random instances for empirical checks.
"""

import random
from typing import Iterable, List

from .model import Atom, Instance, Predicate, Term


def random_instance(
    signature: Iterable[Predicate],
    rng: random.Random,
    max_atoms: int = 5,
    domain_size: int = 4,
) -> Instance:
    """An instance of 1..max_atoms atoms over constants c1..c<domain_size>"""
    predicates = sorted((p for p in signature if p.arity > 0), key=lambda p: (p.name, p.arity))
    if not predicates:
        return Instance()
    constants = [Term.constant(f"c{i}") for i in range(1, domain_size + 1)]
    atoms = set()
    for _ in range(rng.randint(1, max_atoms)):
        predicate = rng.choice(predicates)
        atoms.add(Atom(predicate, tuple(rng.choice(constants) for _ in range(predicate.arity))))
    return Instance(frozenset(atoms))


def random_instances(
    signature: Iterable[Predicate],
    count: int,
    seed: int = 0,
    max_atoms: int = 5,
    domain_size: int = 4,
) -> List[Instance]:
    """count reproducible random instances; the same seed gives the same list"""
    rng = random.Random(seed)
    signature = list(signature)
    return [random_instance(signature, rng, max_atoms, domain_size) for _ in range(count)]
