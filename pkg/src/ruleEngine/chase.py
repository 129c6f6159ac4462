"""
Oblivious chase with step semantics and provenance.

step_{n+1} = step_n ∪ ⋃ output(τ) over the triggers of step_n that were not
already triggers of step_{n-1}. The enumeration is semi-naive: a trigger is new
at step n exactly when its body image uses an atom added at step n, so only
body matches seeded by such an atom are explored.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from ..config import DEFAULT_MAX_ATOMS
from ..errors import SignatureError, UnknownTermError
from ..homomorphisms import Homomorphism, TargetIndex, find_hom, iter_homs
from ..model import (
    Atom,
    FreshNames,
    Instance,
    Rule,
    RuleSet,
    Term,
    apply_substitution,
    atom_key,
    sorted_atoms,
    term_key,
)

logger = logging.getLogger("pawn.chase")


class ChaseStatus(str, Enum):
    COMPLETED = "completed"
    GUARD_EXCEEDED = "guard_exceeded"


@dataclass(frozen=True, eq=False)
class Trigger:
    """
    A rule paired with a homomorphism of its body into an instance.

    Attributes:
        rule: The rule
        body_map: Body homomorphism restricted to the body variables
    """
    rule: Rule
    body_map: Homomorphism

    @property
    def key(self) -> Tuple:
        return (self.rule.id,) + tuple(
            (v, self.body_map(v)) for v in sorted(self.rule.body_variables, key=term_key)
        )

    @property
    def identifier(self) -> str:
        bindings = ",".join(
            f"{v.label}={self.body_map(v).label}" for v in sorted(self.rule.body_variables, key=term_key)
        )
        return f"{self.rule.id}[{bindings}]"

    @property
    def body_image(self) -> Tuple[Atom, ...]:
        return tuple(self.body_map.apply(a) for a in self.rule.body)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Trigger) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return self.identifier


@dataclass(frozen=True)
class TermMeta:
    """
    Provenance of a term in a chase trace.

    Attributes:
        timestamp: Least step whose active domain contains the term
        trigger: Trigger that created the null; None for input terms
        frontier: Image of the creating rule's frontier
    """
    timestamp: int
    trigger: Optional[Trigger] = None
    frontier: FrozenSet[Term] = frozenset()


@dataclass(frozen=True)
class ChaseTrace:
    """Steps 0..depth of the oblivious chase together with term provenance"""
    rules: RuleSet
    steps: Tuple[Instance, ...]
    new_atoms: Tuple[Tuple[Atom, ...], ...]
    fired: Tuple[Tuple[Trigger, ...], ...]
    term_meta: Dict[Term, TermMeta]
    status: ChaseStatus = ChaseStatus.COMPLETED
    saturated_at: Optional[int] = None

    @property
    def input(self) -> Instance:
        return self.steps[0]

    @property
    def final(self) -> Instance:
        return self.steps[-1]

    @property
    def depth(self) -> int:
        return len(self.steps) - 1

    @property
    def completed(self) -> bool:
        return self.status is ChaseStatus.COMPLETED

    def timestamp(self, term: Term) -> int:
        meta = self.term_meta.get(term)
        if meta is None:
            raise UnknownTermError(f"term {term.label} does not occur in the trace")
        return meta.timestamp

    def trigger_of(self, term: Term) -> Optional[Trigger]:
        return self.term_meta[term].trigger if term in self.term_meta else None

    def nulls(self) -> List[Term]:
        return sorted((t for t, m in self.term_meta.items() if m.trigger is not None), key=term_key)


def _match_atom(pattern: Atom, fact: Atom) -> Optional[Dict[Term, Term]]:
    seed: Dict[Term, Term] = {}
    for s, t in zip(pattern.args, fact.args):
        if s.is_constant:
            if s != t:
                return None
        elif seed.setdefault(s, t) != t:
            return None
    return seed


def _collect_triggers(
    rules: RuleSet,
    index: TargetIndex,
    delta: Iterable[Atom],
    already: Optional[set] = None,
) -> List[Trigger]:
    already = already if already is not None else set()
    by_predicate: Dict = {}
    for atom in sorted_atoms(delta):
        by_predicate.setdefault(atom.predicate, []).append(atom)
    found: Dict[Tuple, Tuple[int, Trigger]] = {}
    for position, rule in enumerate(rules):
        for body_atom in rule.body:
            for fact in by_predicate.get(body_atom.predicate, ()):
                seed = _match_atom(body_atom, fact)
                if seed is None:
                    continue
                for hom in iter_homs(rule.body, index, seed):
                    trigger = Trigger(rule, hom.restrict(rule.body_variables))
                    key = trigger.key
                    if key in already or key in found:
                        continue
                    found[key] = (position, trigger)
    ordered = sorted(
        found.values(),
        key=lambda pt: (pt[0], tuple(atom_key(a) for a in pt[1].body_image)),
    )
    return [trigger for _, trigger in ordered]


def triggers(instance: Instance, rules: RuleSet) -> List[Trigger]:
    """All triggers of rules on instance, in canonical order"""
    return _collect_triggers(rules, TargetIndex(instance), instance.atoms)


def _fire(trigger: Trigger, fresh: FreshNames, step: Optional[int]) -> Tuple[List[Atom], List[Term]]:
    extension = dict(trigger.body_map.mapping)
    created = []
    for z in sorted(trigger.rule.existentials, key=term_key):
        null = Term.null(fresh(), step, trigger.identifier)
        extension[z] = null
        created.append(null)
    return [apply_substitution(a, extension) for a in trigger.rule.head], created


def trigger_output(trigger: Trigger, first_null: int = 1, avoid: Iterable[str] = ()) -> Instance:
    """
    Head image of a trigger, with existentials sent to fresh nulls.

    Fresh nulls are numbered from first_null, skipping labels in avoid, so the
    same trigger always yields the same output.
    """
    atoms, _ = _fire(trigger, FreshNames(avoid, start=first_null), None)
    return Instance(frozenset(atoms))


def chase(
    instance: Instance,
    rules: RuleSet,
    depth: Optional[int],
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> ChaseTrace:
    """
    Compute steps 0..depth of the oblivious chase.

    Args:
        instance: Input instance (step 0)
        rules: Rule set
        depth: Number of steps; None runs to a fixpoint
        max_atoms: Resource guard; exceeding it stops the run with GUARD_EXCEEDED

    Returns:
        The chase trace
    """
    if depth is not None and depth < 0:
        raise ValueError("chase depth must be non-negative")
    atoms = set(instance.atoms)
    fresh = FreshNames(t.label for t in instance.adom)
    term_meta: Dict[Term, TermMeta] = {t: TermMeta(0) for t in instance.adom}
    steps: List[Instance] = [instance]
    new_atoms: List[Tuple[Atom, ...]] = [tuple(sorted_atoms(instance.atoms))]
    fired: List[Tuple[Trigger, ...]] = [()]
    fired_keys: set = set()
    delta = set(instance.atoms)
    status = ChaseStatus.COMPLETED
    saturated_at: Optional[int] = None

    n = 0
    while depth is None or n < depth:
        if not delta:
            if saturated_at is None:
                saturated_at = n
            if depth is None:
                break
            steps.append(steps[-1])
            new_atoms.append(())
            fired.append(())
            n += 1
            continue
        pending = _collect_triggers(rules, TargetIndex(atoms), delta, fired_keys)
        produced: List[Atom] = []
        for trigger in pending:
            fired_keys.add(trigger.key)
            output, created = _fire(trigger, fresh, n + 1)
            frontier = frozenset(trigger.body_map(v) for v in trigger.rule.frontier)
            for null in created:
                term_meta[null] = TermMeta(n + 1, trigger, frontier)
            produced.extend(output)
        delta = {a for a in produced if a not in atoms}
        atoms |= delta
        steps.append(Instance(frozenset(atoms)))
        new_atoms.append(tuple(sorted_atoms(delta)))
        fired.append(tuple(pending))
        n += 1
        logger.debug("chase step %d: %d triggers, %d new atoms", n, len(pending), len(delta))
        if len(atoms) > max_atoms:
            status = ChaseStatus.GUARD_EXCEEDED
            logger.warning("chase stopped at step %d: %d atoms exceed the guard of %d", n, len(atoms), max_atoms)
            break

    return ChaseTrace(
        rules=rules,
        steps=tuple(steps),
        new_atoms=tuple(new_atoms),
        fired=tuple(fired),
        term_meta=term_meta,
        status=status,
        saturated_at=saturated_at,
    )


def datalog_saturate(instance: Instance, rules: Union[RuleSet, Sequence[Rule]], cap: Optional[int] = None,
                     max_atoms: int = DEFAULT_MAX_ATOMS) -> ChaseTrace:
    """Chase with Datalog rules only, to a fixpoint or cap steps"""
    rule_set = rules if isinstance(rules, RuleSet) else RuleSet(tuple(rules), "R_DL")
    if rule_set.existential_rules:
        raise ValueError("datalog_saturate received a rule with existential variables")
    return chase(instance, rule_set, cap, max_atoms)


def _binary_graph(atoms: Iterable[Atom]) -> nx.DiGraph:
    graph = nx.DiGraph()
    for atom in atoms:
        arity = atom.predicate.arity
        if arity > 2:
            raise SignatureError(f"{atom.predicate} is not at most binary")
        if arity == 2:
            graph.add_edge(atom.args[0], atom.args[1])
        elif arity == 1:
            graph.add_node(atom.args[0])
    return graph


class ChaseOrder:
    """Reachability over binary atoms: s < t iff a directed path leads from s to t"""

    def __init__(self, atoms: Iterable[Atom]):
        self.graph = _binary_graph(atoms)
        self._descendants: Dict[Term, frozenset] = {}

    def reaches(self, source: Term, target: Term) -> bool:
        if source not in self.graph:
            return False
        if source not in self._descendants:
            self._descendants[source] = frozenset(nx.descendants(self.graph, source))
        return target in self._descendants[source]

    def leq(self, source: Term, target: Term) -> bool:
        return source == target or self.reaches(source, target)


def chase_order(trace: Union[ChaseTrace, Instance]) -> ChaseOrder:
    instance = trace.final if isinstance(trace, ChaseTrace) else trace
    return ChaseOrder(instance.atoms)


def is_dag(instance: Union[Instance, Iterable[Atom]]) -> bool:
    """True iff the binary atoms form no directed cycle; a loop atom is a cycle"""
    return nx.is_directed_acyclic_graph(_binary_graph(instance))


def bounded_hom_equivalent(
    left: Union[ChaseTrace, Instance, Iterable[Atom]],
    right: Union[ChaseTrace, Instance, Iterable[Atom]],
) -> Tuple[bool, bool]:
    """
    Directional homomorphism test between two (prefixes of) chases.

    Returns:
        (forward, backward): whether left maps into right and right into left
    """
    def atoms_of(x) -> FrozenSet[Atom]:
        if isinstance(x, ChaseTrace):
            return x.final.atoms
        return frozenset(x)

    left_atoms, right_atoms = atoms_of(left), atoms_of(right)
    forward = find_hom(left_atoms, right_atoms) is not None
    backward = find_hom(right_atoms, left_atoms) is not None
    return forward, backward
