"""
Piece-based UCQ rewriting, injectivization and an empirical bdd estimate.

A rewriting step unifies a nonempty subset P of a CQ's atoms with atoms of a
rule head. Every existential variable of the rule may only meet variables that
are existential in the query and occur nowhere outside P. The result is the
core of u(q \\ P) ∪ u(body), with the answer tuple carried through u.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from ..config import DEFAULT_MAX_ATOMS, RewritingBudget
from ..homomorphisms import core, cq_isomorphic, find_hom, iter_homs, subsumes
from ..model import (
    CQ,
    UCQ,
    Atom,
    FreshNames,
    FreshPredicates,
    Instance,
    Predicate,
    Rule,
    RuleSet,
    Term,
    apply_substitution,
    set_partitions,
    sorted_atoms,
    term_key,
)
from .chase import chase

logger = logging.getLogger("pawn.rewriting")


class RewritingStatus(str, Enum):
    CONVERGED = "converged"
    BUDGET_EXCEEDED = "budget_exceeded"


@dataclass(frozen=True)
class RewritingRun:
    """
    Breadth-first rewriting of one CQ against a rule set.

    Attributes:
        input: The query that was rewritten
        ruleset: Name of the rule set
        generations: CQs added by each generation; generation 0 is core(input)
        final: Subsumption-free UCQ collected over all generations
        status: CONVERGED iff the last expansion added nothing
    """
    input: CQ
    ruleset: str
    generations: Tuple[Tuple[CQ, ...], ...]
    final: UCQ
    status: RewritingStatus

    @property
    def generation_count(self) -> int:
        return len(self.generations) - 1

    @property
    def converged(self) -> bool:
        return self.status is RewritingStatus.CONVERGED

    @property
    def converged_at(self) -> Optional[int]:
        return self.generation_count if self.converged else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "query": str(self.input),
            "ruleset": self.ruleset,
            "status": self.status.value,
            "generations": [
                {"index": i, "added": len(g), "max_atoms": max((len(q.atoms) for q in g), default=0)}
                for i, g in enumerate(self.generations)
            ],
            "disjuncts": len(self.final),
        }


def canonical_cq(q: CQ) -> CQ:
    """
    Rename non-answer variables to v1, v2, ... in order of first appearance.

    The atom true is dropped unless it is the only atom.
    """
    answers = set(q.answer_vars)
    atoms = [a for a in q.atoms if not a.is_top] or list(q.atoms)

    def masked(atom: Atom) -> Tuple:
        return (
            atom.predicate.name,
            atom.predicate.arity,
            tuple(t.sort_key if (t in answers or not t.is_variable) else (9,) for t in atom.args),
        )

    fresh = FreshNames((v.label for v in answers), prefix="v")
    renaming: Dict[Term, Term] = {}
    for atom in sorted(atoms, key=lambda a: (masked(a), a.sort_key)):
        for t in atom.args:
            if t.is_variable and t not in answers and t not in renaming:
                renaming[t] = Term.variable(fresh())
    return CQ(tuple(sorted_atoms(apply_substitution(a, renaming) for a in atoms)), q.answer_vars)


class _UnionFind:
    def __init__(self):
        self.parent: Dict[Term, Term] = {}

    def find(self, t: Term) -> Term:
        self.parent.setdefault(t, t)
        while self.parent[t] != t:
            self.parent[t] = self.parent[self.parent[t]]
            t = self.parent[t]
        return t

    def union(self, a: Term, b: Term) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def classes(self) -> List[List[Term]]:
        groups: Dict[Term, List[Term]] = {}
        for t in list(self.parent):
            groups.setdefault(self.find(t), []).append(t)
        return list(groups.values())


def _rename_apart(rule: Rule, taken: Iterable[Term]) -> Tuple[Rule, Dict[Term, Term]]:
    fresh = FreshNames((t.label for t in taken), prefix="u")
    renaming = {v: Term.variable(fresh()) for v in sorted(rule.variables, key=term_key)}
    renamed = Rule(
        rule.id,
        tuple(apply_substitution(a, renaming) for a in rule.body),
        tuple(apply_substitution(a, renaming) for a in rule.head),
    )
    return renamed, renaming


def _piece_unifier(
    q: CQ,
    piece: Sequence[Atom],
    targets: Sequence[Atom],
    rule: Rule,
) -> Optional[Dict[Term, Term]]:
    uf = _UnionFind()
    for atom, target in zip(piece, targets):
        for s, t in zip(atom.args, target.args):
            uf.union(s, t)
    outside = {t for a in q.atoms if a not in piece for t in a.args}
    answer_order = {v: i for i, v in enumerate(q.answer_vars)}
    rule_terms = rule.variables
    substitution: Dict[Term, Term] = {}
    for cls in uf.classes():
        constants = {t for t in cls if t.is_constant}
        if len(constants) > 1:
            return None
        existentials = [t for t in cls if t in rule.existentials]
        if existentials:
            if constants or len([t for t in cls if t in rule_terms]) > 1:
                return None
            for t in cls:
                if t in rule_terms:
                    continue
                if t in answer_order or t in outside:
                    return None
        if constants:
            representative = next(iter(constants))
        else:
            answers = sorted((t for t in cls if t in answer_order), key=answer_order.get)
            query_vars = sorted((t for t in cls if t not in rule_terms), key=term_key)
            if answers:
                representative = answers[0]
            elif query_vars:
                representative = query_vars[0]
            else:
                representative = min(cls, key=term_key)
        for t in cls:
            if t != representative:
                substitution[t] = representative
    return substitution


def rewrite_step(q: CQ, rule: Rule) -> List[CQ]:
    """
    One piece-rewriting step of q with rule.

    Returns:
        Distinct (up to renaming) rewritings in canonical form
    """
    renamed, _ = _rename_apart(rule, q.variables)
    head_predicates = {a.predicate for a in renamed.head}
    candidates = [a for a in q.atoms if a.predicate in head_predicates]
    results: List[CQ] = []
    for size in range(1, len(candidates) + 1):
        for piece in itertools.combinations(candidates, size):
            options = [[h for h in renamed.head if h.predicate == a.predicate] for a in piece]
            for targets in itertools.product(*options):
                substitution = _piece_unifier(q, piece, targets, renamed)
                if substitution is None:
                    continue
                rest = [apply_substitution(a, substitution) for a in q.atoms if a not in piece]
                body = [apply_substitution(a, substitution) for a in renamed.body]
                answer = tuple(substitution.get(v, v) for v in q.answer_vars)
                rewritten = canonical_cq(core(CQ(tuple(rest + body), answer)))
                if not any(cq_isomorphic(rewritten, r) for r in results):
                    results.append(rewritten)
    return results


def _ucq_order(q: CQ) -> Tuple:
    return (len(q.atoms), str(q))


def ucq_rewrite(q: CQ, rules: RuleSet, budget: RewritingBudget = RewritingBudget()) -> RewritingRun:
    """
    Saturate rewrite_step breadth-first with answer-fixing subsumption pruning.

    Args:
        q: Query to rewrite
        rules: Rule set
        budget: Generation and size limits

    Returns:
        RewritingRun, CONVERGED when a generation adds nothing new
    """
    start = canonical_cq(core(q))
    kept: List[CQ] = [start]
    generations: List[Tuple[CQ, ...]] = [(start,)]
    frontier: List[CQ] = [start]
    status = RewritingStatus.CONVERGED

    for generation in range(1, budget.max_generations + 1):
        added: List[CQ] = []
        for cq in frontier:
            for rule in rules:
                for candidate in rewrite_step(cq, rule):
                    if any(subsumes(old, candidate) for old in kept):
                        continue
                    if any(subsumes(other, candidate) for other in added):
                        continue
                    added = [other for other in added if not subsumes(candidate, other)]
                    added.append(candidate)
        if not added:
            frontier = []
            break
        kept = [old for old in kept if not any(subsumes(new, old) for new in added)] + added
        generations.append(tuple(added))
        frontier = added
        logger.debug("rewriting generation %d added %d CQs (%d kept)", generation, len(added), len(kept))
        if len(kept) > budget.max_cqs:
            status = RewritingStatus.BUDGET_EXCEEDED
            break
    else:
        if frontier and len(rules):
            status = RewritingStatus.BUDGET_EXCEEDED

    final = UCQ(tuple(sorted(kept, key=_ucq_order)), q.answer_vars)
    logger.info("rewriting of %s: %s after %d generations", q, status.value, len(generations) - 1)
    return RewritingRun(q, rules.name, tuple(generations), final, status)


def _iso_bucket(q: CQ) -> Tuple:
    predicates = tuple(sorted((a.predicate.name, a.predicate.arity) for a in q.atoms))
    pattern = tuple(q.answer_vars.index(v) for v in q.answer_vars)
    return (len(q.atoms), len(q.variables), predicates, pattern)


def injectivize(query: UCQ) -> UCQ:
    """
    UCQ whose injective evaluation matches the plain evaluation of query.

    Every disjunct is specialized along every partition of its variables;
    results are deduplicated up to renaming.
    """
    buckets: Dict[Tuple, List[CQ]] = {}
    ordered: List[CQ] = []
    for q in query.disjuncts:
        answer_rank = {v: i for i, v in enumerate(q.answer_vars)}
        variables = sorted(q.variables, key=lambda v: (answer_rank.get(v, len(answer_rank)), term_key(v)))
        for partition in set_partitions(variables):
            mapping: Dict[Term, Term] = {}
            for block in partition:
                representative = block[0]
                for v in block:
                    mapping[v] = representative
            specialized = canonical_cq(q.substitute(mapping))
            bucket = buckets.setdefault(_iso_bucket(specialized), [])
            if any(cq_isomorphic(specialized, other) for other in bucket):
                continue
            bucket.append(specialized)
            ordered.append(specialized)
    return UCQ(tuple(ordered), query.answer_vars)


def answers(instance: Instance, q: CQ) -> FrozenSet[Tuple[Term, ...]]:
    """All answer tuples of q over instance"""
    if q.is_boolean:
        return frozenset({()}) if find_hom(q.atoms, instance.atoms) is not None else frozenset()
    return frozenset(tuple(h(v) for v in q.answer_vars) for h in iter_homs(q.atoms, instance.atoms))


def bdd_constant_empirical(
    q: CQ,
    rules: RuleSet,
    instances: Sequence[Instance],
    kmax: int,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> Optional[int]:
    """
    Least depth k ≤ kmax at which every supplied instance already yields all
    answers it yields at depth kmax.

    Every instance is chased one step past the horizon. Returns None when that
    extra step still adds answers, so the horizon shows no bound, or when a
    chase hits its resource guard.
    """
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    needed = 0
    for instance in instances:
        trace = chase(instance, rules, kmax + 1, max_atoms)
        if not trace.completed:
            return None
        target = answers(trace.steps[kmax], q)
        if answers(trace.steps[kmax + 1], q) != target:
            logger.debug("answers of %s still grow after depth %d", q, kmax)
            return None
        if not target:
            continue
        first = next(k for k in range(kmax + 1) if answers(trace.steps[k], q) >= target)
        needed = max(needed, first)
    return needed


def define_edge_relation(query: UCQ, name: str = "Q") -> Tuple[RuleSet, Predicate]:
    """
    Datalog rules q_i(x,y) → P(x,y) for a binary UCQ and a fresh predicate P.

    Tournaments over P are exactly tournaments defined by the UCQ.
    """
    if query.arity != 2:
        raise ValueError("an edge relation needs a binary query")
    signature: Set[Predicate] = {p for q in query.disjuncts for p in q.signature}
    predicate = FreshPredicates(signature)(name, 2)
    rules = []
    for i, q in enumerate(query.disjuncts, start=1):
        rules.append(Rule(f"edge{i}", q.atoms, (Atom(predicate, q.answer_vars),)))
    return RuleSet(tuple(rules), f"edges:{predicate.name}"), predicate
