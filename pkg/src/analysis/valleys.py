"""
Witnesses, valley queries and peak removal.

A witness of an edge (s, t) is a disjunct of the injectivized rewriting of
E(x,y) together with an injective homomorphism into the existential chase
prefix sending x to s and y to t. Variables of a query are ordered by the
paths of its binary atoms; a valley query is acyclic and has no maximal
variable besides its two answer variables.

Peak removal replaces a non-valley witness by one whose timestamp multiset
is strictly smaller, by undoing the trigger that created the image of a
maximal existential variable. Iterating it from any witness ends in a valley.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from ..errors import AlreadyValleyError, PreconditionError, SignatureError, SoundnessError
from ..homomorphisms import Homomorphism, TargetIndex, iter_homs
from ..model import CQ, UCQ, Atom, Instance, RuleSet, Term, term_key, terms_of
from ..ruleEngine.chase import ChaseTrace
from .multisets import TimestampMultiset, timestamps_of
from .tournaments import Pair, Tournament, pair_key

logger = logging.getLogger("pawn.valleys")


@dataclass(frozen=True)
class Witness:
    """
    Attributes:
        disjunct: Disjunct of the injectivized rewriting
        hom: Injective homomorphism of the disjunct into the prefix
        endpoints: (s, t), the images of the two answer variables
        index: Position of the disjunct in its UCQ
    """
    disjunct: CQ
    hom: Homomorphism
    endpoints: Pair
    index: int

    @property
    def image(self) -> FrozenSet[Atom]:
        return self.hom.image(self.disjunct.atoms)

    @property
    def image_terms(self) -> FrozenSet[Term]:
        return terms_of(self.image)

    @property
    def sort_key(self) -> Tuple:
        return (self.index, self.hom.key)

    def timestamps(self, trace: ChaseTrace) -> TimestampMultiset:
        return timestamps_of(self.image_terms, trace)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "disjunct": self.index,
            "query": str(self.disjunct),
            "endpoints": [t.label for t in self.endpoints],
            "mapping": {v.label: self.hom(v).label for v in sorted(self.disjunct.variables, key=term_key)},
            "valley": is_valley_query(self.disjunct),
        }


def query_graph(q: CQ) -> nx.DiGraph:
    """
    Digraph of q's binary atoms over all of q's variables.

    Raises:
        SignatureError: If q has an atom of arity above 2
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(sorted(q.variables, key=term_key))
    for atom in q.atoms:
        if atom.predicate.arity > 2:
            raise SignatureError(f"{atom.predicate} in {q} is not at most binary")
        if atom.predicate.arity == 2:
            graph.add_edge(atom.args[0], atom.args[1])
    return graph


def maximal_variables(q: CQ) -> List[Term]:
    """Variables with no outgoing binary atom, in canonical order"""
    graph = query_graph(q)
    return sorted((v for v in graph.nodes if graph.out_degree(v) == 0), key=term_key)


def below(q: CQ, upper: Term) -> FrozenSet[Term]:
    """Variables v with v <_q upper, i.e. a directed path from v to upper"""
    graph = query_graph(q)
    if upper not in graph:
        return frozenset()
    return frozenset(nx.ancestors(graph, upper))


def is_valley_query(q: CQ) -> bool:
    """
    True iff q's binary atoms form a DAG and its maximal variables are a
    nonempty subset of its answer variables.

    Raises:
        SignatureError: If q has an atom of arity above 2
    """
    graph = query_graph(q)
    if not nx.is_directed_acyclic_graph(graph):
        return False
    maxima = {v for v in graph.nodes if graph.out_degree(v) == 0}
    return bool(maxima) and maxima <= set(q.answer_vars)


def _answer_seed(q: CQ, endpoints: Sequence[Term]) -> Optional[Dict[Term, Term]]:
    seed: Dict[Term, Term] = {}
    for v, t in zip(q.answer_vars, endpoints):
        if seed.setdefault(v, t) != t:
            return None
    return seed


def witnesses(
    s: Term,
    t: Term,
    q_inj: UCQ,
    prefix: Union[Instance, TargetIndex],
) -> List[Witness]:
    """
    Every (disjunct, injective hom) of q_inj sending the answer pair to (s, t).

    Returns:
        Witnesses ordered by disjunct position, then by mapping
    """
    if q_inj.arity != 2:
        raise PreconditionError("witnesses are defined for binary queries")
    index = prefix if isinstance(prefix, TargetIndex) else TargetIndex(prefix)
    found: List[Witness] = []
    for position, disjunct in enumerate(q_inj.disjuncts):
        seed = _answer_seed(disjunct, (s, t))
        if seed is None:
            continue
        for hom in iter_homs(disjunct.atoms, index, seed, injective=True):
            found.append(Witness(disjunct, hom, (s, t), position))
    return sorted(found, key=lambda w: w.sort_key)


def minimal_witness(candidates: Sequence[Witness], trace: ChaseTrace) -> Optional[Witness]:
    """The witness with the mlex-least timestamp multiset; ties by disjunct order"""
    if not candidates:
        return None
    return min(candidates, key=lambda w: (w.timestamps(trace).descending(), w.sort_key))


def peak_removal_step(
    witness: Witness,
    trace: ChaseTrace,
    q_inj: UCQ,
    rules: Optional[RuleSet] = None,
) -> Witness:
    """
    Replace a non-valley witness by one with a strictly smaller timestamp multiset.

    The lexicographically least maximal existential variable z is chosen; Z is
    the set of atoms of the disjunct containing z. With ⟨ρ,π⟩ the trigger that
    created h(z), the new witness is a ts-minimal witness of the same edge over
    (h(q) \\ h(Z)) ∪ π(body(ρ)).

    Args:
        witness: A witness whose disjunct is not a valley query
        trace: Existential chase of {true} with full provenance
        q_inj: Injectivized rewriting the witnesses are drawn from
        rules: If given, the creating trigger must use one of these rules

    Raises:
        AlreadyValleyError: If the disjunct is already a valley query
        PreconditionError: If the disjunct is cyclic or h(z) is an input term
        SoundnessError: If no witness exists over the reduced instance or the
            multiset does not decrease
    """
    q = witness.disjunct
    if is_valley_query(q):
        raise AlreadyValleyError(f"{q} is already a valley query")
    graph = query_graph(q)
    if not nx.is_directed_acyclic_graph(graph):
        raise PreconditionError(f"{q} has a directed cycle")
    answers = set(q.answer_vars)
    peaks = [v for v in maximal_variables(q) if v not in answers]
    if not peaks:
        raise PreconditionError(f"{q} has no maximal existential variable")
    z = peaks[0]

    peak_atoms = [a for a in q.atoms if z in a.args]
    image_z = witness.hom(z)
    trigger = trace.trigger_of(image_z)
    if trigger is None:
        raise PreconditionError(f"{image_z.label} was not created by the chase; peak removal needs a chase of {{true}}")
    if rules is not None and trigger.rule.id not in {r.id for r in rules}:
        raise PreconditionError(f"{image_z.label} was created by {trigger.rule.id}, which is not in {rules.name}")

    reduced = (witness.image - witness.hom.image(peak_atoms)) | frozenset(trigger.body_image)
    s, t = witness.endpoints
    candidate = minimal_witness(witnesses(s, t, q_inj, Instance(reduced)), trace)
    if candidate is None:
        raise SoundnessError(
            f"no witness of ({s.label},{t.label}) after removing peak {z.label}↦{image_z.label} "
            f"created by {trigger.identifier}"
        )
    before, after = witness.timestamps(trace), candidate.timestamps(trace)
    if not after < before:
        raise SoundnessError(f"peak removal did not descend: {after!r} is not below {before!r}")
    logger.debug("peak %s↦%s removed: %r -> %r", z.label, image_z.label, before, after)
    return candidate


@dataclass(frozen=True)
class ValleyDerivation:
    """
    A chain of witnesses for one edge, ending in a valley witness.

    Attributes:
        endpoints: The edge (s, t)
        steps: Witnesses from the starting one to the valley one
        multisets: Timestamp multiset of each step, strictly descending
    """
    endpoints: Pair
    steps: Tuple[Witness, ...]
    multisets: Tuple[TimestampMultiset, ...]

    @property
    def final(self) -> Witness:
        return self.steps[-1]

    @property
    def iterations(self) -> int:
        return len(self.steps) - 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "endpoints": [t.label for t in self.endpoints],
            "iterations": self.iterations,
            "multisets": [sorted(m) for m in self.multisets],
            "valley": self.final.to_dict(),
        }


def derive_valley(
    s: Term,
    t: Term,
    q_inj: UCQ,
    trace: ChaseTrace,
    rules: Optional[RuleSet] = None,
    start: Optional[Witness] = None,
) -> ValleyDerivation:
    """
    Iterate peak removal from start (default: a ts-minimal witness) to a valley.

    Raises:
        PreconditionError: If (s, t) has no witness in the trace
    """
    if start is None:
        start = minimal_witness(witnesses(s, t, q_inj, trace.final), trace)
        if start is None:
            raise PreconditionError(f"({s.label},{t.label}) has no witness in the prefix")
    elif start.endpoints != (s, t):
        raise PreconditionError("the starting witness belongs to another edge")
    steps = [start]
    multisets = [start.timestamps(trace)]
    while not is_valley_query(steps[-1].disjunct):
        steps.append(peak_removal_step(steps[-1], trace, q_inj, rules))
        multisets.append(steps[-1].timestamps(trace))
    if len(steps) > 1:
        logger.info(
            "valley witness for (%s,%s) after %d peak removals: %s",
            s.label, t.label, len(steps) - 1, " > ".join(repr(m) for m in multisets),
        )
    return ValleyDerivation((s, t), tuple(steps), tuple(multisets))


def valley_witness(
    s: Term,
    t: Term,
    q_inj: UCQ,
    trace: ChaseTrace,
    rules: Optional[RuleSet] = None,
    start: Optional[Witness] = None,
) -> Witness:
    """A witness of (s, t) whose disjunct is a valley query"""
    return derive_valley(s, t, q_inj, trace, rules, start).final


@dataclass(frozen=True)
class EdgeColor:
    """
    Colour of one tournament pair.

    Attributes:
        color: Position of the least valley disjunct witnessing the pair
        source: Tail of the witnessed edge
        target: Head of the witnessed edge
        disjunct: The colouring valley query
    """
    color: int
    source: Term
    target: Term
    disjunct: CQ = field(compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return {"color": self.color, "edge": [self.source.label, self.target.label], "query": str(self.disjunct)}


def color_tournament(
    tournament: Tournament,
    edge_witnesses: Mapping[Pair, Sequence[Witness]],
) -> Dict[Pair, EdgeColor]:
    """
    Colour every pair of the tournament by its least valley disjunct.

    Args:
        tournament: The tournament to colour
        edge_witnesses: Witnesses per directed edge (s, t)

    Returns:
        EdgeColor per unordered pair, keyed by pair_key

    Raises:
        SoundnessError: If some pair has no valley witness in either direction
    """
    coloring: Dict[Pair, EdgeColor] = {}
    for s, t in tournament.pairs():
        best: Optional[Witness] = None
        for arc in tournament.orientations(s, t):
            for w in edge_witnesses.get(arc, ()):
                if is_valley_query(w.disjunct) and (best is None or w.sort_key < best.sort_key):
                    best = w
        if best is None:
            raise SoundnessError(f"the pair ({s.label},{t.label}) has no valley witness")
        source, target = best.endpoints
        coloring[pair_key(s, t)] = EdgeColor(best.index, source, target, best.disjunct)
    return coloring
