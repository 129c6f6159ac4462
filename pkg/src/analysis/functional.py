"""
Path functionality and the size-4 loop analysis.

In the existential chase prefix of a regal rule set, a query whose answer
variables all lie below its first answer variable defines a function of that
first variable. The size-4 analysis uses this to show that a valley query
defining a four-vertex tournament also holds on some pair (u, u).
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, NoReturn, Optional, Sequence, Tuple

import networkx as nx

from ..errors import PreconditionError, SoundnessError
from ..homomorphisms import TargetIndex, entails, iter_homs
from ..model import CQ, Instance, Term, term_key
from ..ruleEngine.rewriting import answers
from .valleys import below, is_valley_query, maximal_variables

logger = logging.getLogger("pawn.functional")

DISCONNECTED = "disconnected"
SINGLE_MAXIMAL = "single-maximal"
TWO_MAXIMAL = "two-maximal"


@dataclass(frozen=True)
class FunctionalityResult:
    """
    Attributes:
        holds: Whether the answers are functional in the upper variable
        counterexample: (s, t̄₁, t̄₂) with two distinct lower tuples for s
    """
    holds: bool
    counterexample: Optional[Tuple[Term, Tuple[Term, ...], Tuple[Term, ...]]] = None

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> Dict[str, Any]:
        if self.counterexample is None:
            return {"holds": self.holds, "counterexample": None}
        s, first, second = self.counterexample
        return {
            "holds": self.holds,
            "counterexample": [s.label, [t.label for t in first], [t.label for t in second]],
        }


def path_function_check(q: CQ, prefix: Instance) -> FunctionalityResult:
    """
    Check that {(s, t̄) : prefix ⊨ q(s, t̄)} is a function of s.

    The first answer variable is the upper one; every other answer variable
    must lie strictly below it.

    Raises:
        PreconditionError: If q has no answer variable or a lower one is not below
    """
    if not q.answer_vars:
        raise PreconditionError("path functionality needs an upper answer variable")
    upper, lower = q.answer_vars[0], q.answer_vars[1:]
    underneath = below(q, upper)
    for v in lower:
        if v not in underneath:
            raise PreconditionError(f"{v.label} is not below {upper.label} in {q}")
    images: Dict[Term, Tuple[Term, ...]] = {}
    for row in sorted(answers(prefix, q), key=lambda r: tuple(term_key(t) for t in r)):
        s, rest = row[0], row[1:]
        seen = images.setdefault(s, rest)
        if seen != rest:
            return FunctionalityResult(False, (s, seen, rest))
    return FunctionalityResult(True)


def defines_tournament(q: CQ, vertices: Sequence[Term], prefix: Instance) -> bool:
    """True iff every pair of distinct vertices satisfies q in some direction"""
    index = TargetIndex(prefix)
    return all(
        entails(index, q, (u, v)) is not None or entails(index, q, (v, u)) is not None
        for u, v in itertools.combinations(vertices, 2)
    )


@dataclass(frozen=True)
class LoopDerivation:
    """
    How a loop follows from a valley query defining a size-4 tournament.

    Attributes:
        case: disconnected or two-maximal
        loop_term: u with prefix ⊨ q(u, u)
        detail: The witnesses used, in words
    """
    case: str
    loop_term: Term
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {"case": self.case, "loop_term": self.loop_term.label, "detail": self.detail}


def _components(q: CQ) -> List[set]:
    graph = nx.Graph()
    graph.add_nodes_from(q.variables)
    for atom in q.atoms:
        for a, b in itertools.combinations(atom.variables, 2):
            graph.add_edge(a, b)
    return [set(c) for c in nx.connected_components(graph)]


def _function_image(part: Sequence, upper: Term, s: Term, shared: Sequence[Term], index: TargetIndex):
    images = {tuple(h(v) for v in shared) for h in iter_homs(part, index, {upper: s})}
    if len(images) > 1:
        raise SoundnessError(
            f"the shared variables below {upper.label} have {len(images)} images for {s.label}; "
            "path functionality fails"
        )
    return next(iter(images), None)


def _disconnected_case(q: CQ, vertices: Sequence[Term], index: TargetIndex) -> LoopDerivation:
    for u in vertices:
        if entails(index, q, (u, u)) is not None:
            return LoopDerivation(DISCONNECTED, u, f"both components of {q} hold at {u.label}")
    raise SoundnessError(f"{q} is disconnected and defines a 4-tournament, but no vertex satisfies q(u,u)")


def _single_maximal_case(q: CQ, prefix: Instance) -> NoReturn:
    x, y = q.answer_vars
    upper, lower = (x, y) if maximal_variables(q) == [x] else (y, x)
    check = path_function_check(CQ(q.atoms, (upper, lower)), prefix)
    if not check:
        s, first, second = check.counterexample
        raise SoundnessError(
            f"{SINGLE_MAXIMAL} case: {q} is not functional at {s.label}: {first[0].label} and {second[0].label}"
        )
    raise SoundnessError(
        f"{SINGLE_MAXIMAL} case: {q} is a function of {upper.label}, so each vertex has at most one partner, "
        "which no 4-tournament allows"
    )


def _transitive_triples(q: CQ, vertices: Sequence[Term], index: TargetIndex):
    def holds(a: Term, b: Term) -> bool:
        return entails(index, q, (a, b)) is not None

    for k1, k2, k3 in itertools.permutations(vertices, 3):
        if holds(k1, k2) and holds(k1, k3) and holds(k2, k3):
            yield k1, k2, k3


def _two_maximal_case(q: CQ, vertices: Sequence[Term], index: TargetIndex) -> LoopDerivation:
    x, y = q.answer_vars
    below_x, below_y = below(q, x), below(q, y)
    shared = sorted(below_x & below_y, key=term_key)
    part_x = [a for a in q.atoms if a.variables <= below_x | {x}]
    part_y = [a for a in q.atoms if a.variables <= below_y | {y}]
    for k1, k2, k3 in _transitive_triples(q, vertices, index):
        f_x_k2 = _function_image(part_x, x, k2, shared, index)
        f_y_k2 = _function_image(part_y, y, k2, shared, index)
        # f_x(k1) = f_y(k2), f_x(k1) = f_y(k3) and f_x(k2) = f_y(k3)
        if f_x_k2 is None or f_x_k2 != f_y_k2:
            raise SoundnessError(
                f"transitive triple ({k1.label},{k2.label},{k3.label}) gives f_x({k2.label}) != f_y({k2.label})"
            )
        if entails(index, q, (k2, k2)) is None:
            raise SoundnessError(f"f_x and f_y agree at {k2.label} but {q} does not hold at ({k2.label},{k2.label})")
        shown = ",".join(t.label for t in f_x_k2)
        return LoopDerivation(
            TWO_MAXIMAL,
            k2,
            f"transitive triple {k1.label}->{k2.label}->{k3.label}; f_x({k2.label}) = f_y({k2.label}) = ({shown})",
        )
    raise SoundnessError(f"{q} defines a 4-tournament without a transitive triple")


def size4_loop_analysis(q: CQ, vertices: Sequence[Term], prefix: Instance) -> LoopDerivation:
    """
    Derive q(u, u) for some vertex u from a valley query q defining a
    tournament on four vertices.

    Cases:
        disconnected: x and y lie in different components; some vertex has
            both an incoming and an outgoing q-edge, and q holds at (u, u)
        single-maximal: only one answer variable is maximal; q is then a
            function of it, bounding out-degrees by 1, which is impossible
        two-maximal: with v̄ below both x and y, q splits into q_x(x,v̄) and
            q_y(v̄,y); a transitive triple k1→k2→k3 forces f_x(k2) = f_y(k2)

    Raises:
        PreconditionError: If q is not a binary valley query or does not define
            a tournament on the four vertices
        SoundnessError: If the proof case at hand does not go through
    """
    if q.arity != 2 or len(set(q.answer_vars)) != 2:
        raise PreconditionError("the size-4 analysis needs two distinct answer variables")
    if not is_valley_query(q):
        raise PreconditionError(f"{q} is not a valley query")
    vertices = sorted(set(vertices), key=term_key)
    if len(vertices) != 4:
        raise PreconditionError(f"expected 4 vertices, got {len(vertices)}")
    if not defines_tournament(q, vertices, prefix):
        raise PreconditionError(f"{q} does not define a tournament on {[v.label for v in vertices]}")

    index = TargetIndex(prefix)
    x, y = q.answer_vars
    components = _components(q)
    if not any(x in c and y in c for c in components):
        derivation = _disconnected_case(q, vertices, index)
    elif set(maximal_variables(q)) != {x, y}:
        _single_maximal_case(q, prefix)
    else:
        derivation = _two_maximal_case(q, vertices, index)
    logger.info("size-4 analysis of %s: %s case, loop at %s", q, derivation.case, derivation.loop_term.label)
    return derivation
