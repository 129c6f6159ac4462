"""
Homomorphism search between atom sets.

The search is a backtracking matcher in the spirit of VF2-style subgraph
matchers: at every level it picks the unmatched source atom with the fewest
target candidates (ties broken by canonical atom order), binds its arguments
and recurses. Constants map to themselves; variables and nulls are mappable.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import PreconditionError
from .model import (
    CQ,
    UCQ,
    Atom,
    Instance,
    Predicate,
    Term,
    apply_substitution,
    sorted_atoms,
    term_key,
)

logger = logging.getLogger("pawn.homomorphisms")

AtomSource = Union[Instance, Iterable[Atom]]


@dataclass(frozen=True, eq=False)
class Homomorphism:
    """
    A term mapping witnessing π(A) ⊆ B.

    Attributes:
        mapping: Images of the mappable source terms (constants are implicit)
        injective: Whether the search enforced injectivity
    """
    mapping: Mapping[Term, Term]
    injective: bool = False

    def __call__(self, term: Term) -> Term:
        if term.is_constant:
            return term
        return self.mapping.get(term, term)

    def apply(self, atom: Atom) -> Atom:
        return apply_substitution(atom, self.mapping)

    def image(self, atoms: Iterable[Atom]) -> frozenset:
        return frozenset(self.apply(a) for a in atoms)

    def restrict(self, terms: Iterable[Term]) -> "Homomorphism":
        keep = set(terms)
        return Homomorphism({s: t for s, t in self.mapping.items() if s in keep}, self.injective)

    @property
    def key(self) -> Tuple:
        return tuple(
            (s.sort_key, t.sort_key) for s, t in sorted(self.mapping.items(), key=lambda kv: term_key(kv[0]))
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Homomorphism) and dict(self.mapping) == dict(other.mapping)

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        pairs = ", ".join(f"{s}↦{t}" for s, t in sorted(self.mapping.items(), key=lambda kv: term_key(kv[0])))
        return f"{{{pairs}}}"


class TargetIndex:
    """Predicate and (predicate, position, term) index over a target atom set"""

    def __init__(self, atoms: AtomSource):
        self.atoms = frozenset(atoms)
        self.by_predicate: Dict[Predicate, List[Atom]] = {}
        self.by_position: Dict[Tuple[Predicate, int, Term], List[Atom]] = {}
        for atom in sorted_atoms(self.atoms):
            self.by_predicate.setdefault(atom.predicate, []).append(atom)
            for i, term in enumerate(atom.args):
                self.by_position.setdefault((atom.predicate, i, term), []).append(atom)

    def candidates(self, atom: Atom, mapping: Mapping[Term, Term]) -> List[Atom]:
        bound = []
        for i, term in enumerate(atom.args):
            image = term if term.is_constant else mapping.get(term)
            if image is not None:
                bound.append((i, image))
        if not bound:
            return self.by_predicate.get(atom.predicate, [])
        lists = [self.by_position.get((atom.predicate, i, image), []) for i, image in bound]
        smallest = min(lists, key=len)
        return [b for b in smallest if all(b.args[i] == image for i, image in bound)]


def _as_index(target: Union[TargetIndex, AtomSource]) -> TargetIndex:
    return target if isinstance(target, TargetIndex) else TargetIndex(target)


def _bind(atom: Atom, target: Atom, mapping: Dict[Term, Term], used: set, injective: bool) -> Optional[Dict[Term, Term]]:
    new: Dict[Term, Term] = {}
    for s, t in zip(atom.args, target.args):
        if s.is_constant:
            if s != t:
                return None
            continue
        image = mapping.get(s)
        if image is None:
            image = new.get(s)
        if image is None:
            if injective and (t in used or t in new.values()):
                return None
            new[s] = t
        elif image != t:
            return None
    return new


def iter_homs(
    source: AtomSource,
    target: Union[TargetIndex, AtomSource],
    seed: Optional[Mapping[Term, Term]] = None,
    injective: bool = False,
) -> Iterator[Homomorphism]:
    """
    Enumerate every homomorphism from source into target extending seed.

    Args:
        source: Atoms to map (variables and nulls are mappable)
        target: Atoms to map into, or a prebuilt TargetIndex
        seed: Partial mapping to extend
        injective: Require distinct source terms to have distinct images

    Yields:
        Homomorphisms in a deterministic order
    """
    source_atoms = sorted_atoms(set(source))
    index = _as_index(target)
    mapping: Dict[Term, Term] = dict(seed or {})
    if any(s.is_constant and s != t for s, t in mapping.items()):
        return
    used: set = set()
    if injective:
        constants = {t for a in source_atoms for t in a.args if t.is_constant}
        images = list(mapping.values())
        if len(set(images)) != len(images):
            return
        if any(t in constants for s, t in mapping.items() if not s.is_constant):
            return
        used = set(images) | constants

    def search(remaining: List[Atom]) -> Iterator[Homomorphism]:
        if not remaining:
            yield Homomorphism(dict(mapping), injective)
            return
        best, best_candidates = -1, None
        for i, atom in enumerate(remaining):
            candidates = index.candidates(atom, mapping)
            if not candidates:
                return
            if best_candidates is None or len(candidates) < len(best_candidates):
                best, best_candidates = i, candidates
        atom = remaining[best]
        rest = remaining[:best] + remaining[best + 1:]
        for candidate in best_candidates:
            new = _bind(atom, candidate, mapping, used, injective)
            if new is None:
                continue
            mapping.update(new)
            if injective:
                used.update(new.values())
            yield from search(rest)
            for s in new:
                del mapping[s]
            if injective:
                used.difference_update(new.values())

    yield from search(source_atoms)


def find_hom(
    source: AtomSource,
    target: Union[TargetIndex, AtomSource],
    seed: Optional[Mapping[Term, Term]] = None,
    injective: bool = False,
) -> Optional[Homomorphism]:
    """First homomorphism from source into target extending seed, or None"""
    return next(iter_homs(source, target, seed, injective), None)


def _answer_seed(answer_vars: Sequence[Term], tuple_: Sequence[Term]) -> Optional[Dict[Term, Term]]:
    seed: Dict[Term, Term] = {}
    for v, t in zip(answer_vars, tuple_):
        if seed.setdefault(v, t) != t:
            return None
    return seed


def entails(
    instance: Union[TargetIndex, AtomSource],
    query: Union[UCQ, CQ],
    answer: Sequence[Term] = (),
    injective: bool = False,
) -> Optional[Tuple[CQ, Homomorphism]]:
    """
    Decide I ⊨ Q(t̄) (or I ⊨inj Q(t̄)).

    Disjuncts are tried in UCQ order and the first witness is returned.

    Raises:
        PreconditionError: If the tuple length differs from the query arity
    """
    ucq = UCQ.single(query) if isinstance(query, CQ) else query
    answer = tuple(answer)
    if len(answer) != ucq.arity:
        raise PreconditionError(f"tuple of length {len(answer)} for a query of arity {ucq.arity}")
    if _answer_seed(ucq.answer_vars, answer) is None:
        return None
    index = _as_index(instance)
    for disjunct in ucq.disjuncts:
        seed = _answer_seed(disjunct.answer_vars, answer)
        if seed is None:
            continue
        hom = find_hom(disjunct.atoms, index, seed, injective)
        if hom is not None:
            return disjunct, hom
    return None


def hom_equivalent(first: AtomSource, second: AtomSource) -> bool:
    first, second = frozenset(first), frozenset(second)
    return find_hom(first, second) is not None and find_hom(second, first) is not None


def core(q: CQ) -> CQ:
    """Minimal answer-fixing retract of q"""
    atoms = sorted_atoms(q.atoms)
    fixed = {v: v for v in q.answer_vars}
    shrunk = True
    while shrunk and len(atoms) > 1:
        shrunk = False
        for atom in atoms:
            others = [b for b in atoms if b != atom]
            hom = find_hom(atoms, others, fixed)
            if hom is not None:
                atoms = sorted_atoms(hom.image(atoms))
                shrunk = True
                break
    return CQ(tuple(atoms), q.answer_vars)


def _positional_seed(general: CQ, specific: CQ) -> Optional[Dict[Term, Term]]:
    if general.arity != specific.arity:
        return None
    return _answer_seed(general.answer_vars, specific.answer_vars)


def subsumes(general: CQ, specific: CQ) -> bool:
    """
    True iff general maps into specific with answer positions aligned.

    The fact true holds in every instance, so general's true atoms are ignored.
    """
    if not general.signature <= specific.signature:
        return False
    seed = _positional_seed(general, specific)
    if seed is None:
        return False
    atoms = [a for a in general.atoms if not a.is_top]
    return find_hom(atoms, specific.atoms, seed) is not None


def cq_isomorphic(first: CQ, second: CQ) -> bool:
    if len(first.atoms) != len(second.atoms) or len(first.variables) != len(second.variables):
        return False
    if first.signature != second.signature:
        return False
    seed = _positional_seed(first, second)
    if seed is None:
        return False
    return find_hom(first.atoms, second.atoms, seed, injective=True) is not None
