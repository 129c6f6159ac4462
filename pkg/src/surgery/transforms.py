"""
Rule-set surgeries.

Each surgery is a pure rewriting pass over the parsed rule language:

- encode_db: an instance J becomes the rule true -> ∃v̄ J
- reify: atoms of arity n > 2 become n binary atoms sharing an atom identifier
- streamline: each existential rule is split into init / ex / dl rules over
  fresh predicates
- body_rewrite: each rule gets one sibling per disjunct of the UCQ rewriting
  of its body
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from ..config import RewritingBudget
from ..errors import RewritingBudgetExceeded, SignatureError, SurgeryError
from ..homomorphisms import cq_isomorphic
from ..model import (
    CQ,
    TOP,
    Atom,
    FreshNames,
    FreshPredicates,
    Instance,
    Predicate,
    Rule,
    RuleSet,
    Term,
    apply_substitution,
    term_key,
)
from ..ruleEngine.rewriting import RewritingRun, canonical_cq, ucq_rewrite

logger = logging.getLogger("pawn.surgery")

Reifiable = Union[Atom, Instance, Rule, RuleSet, CQ]

INIT_SUFFIX = "_init"
EX_SUFFIX = "_ex"
DL_SUFFIX = "_dl"


def encode_db(instance: Instance, rule_id: str = "r_db") -> Rule:
    """
    The rule true -> ∃v̄ f(J) for a bijective renaming f of J's terms.

    Raises:
        SurgeryError: If J contains nothing besides true
    """
    if instance.is_trivial:
        raise SurgeryError("cannot encode the trivial instance {true}")
    fresh = FreshNames(prefix="v")
    renaming = {t: Term.variable(fresh()) for t in sorted(instance.adom, key=term_key)}
    head = tuple(
        Atom(a.predicate, tuple(renaming[t] for t in a.args))
        for a in instance.sorted_atoms()
        if not a.is_top
    )
    return Rule(rule_id, (TOP,), head)


def reified_predicate(predicate: Predicate, position: int) -> Predicate:
    return Predicate(f"{predicate.name}_{position}", 2)


def reify_signature(signature: Iterable[Predicate]) -> FrozenSet[Predicate]:
    """Predicates of arity ≤ 2 are kept; P/n with n > 2 becomes P_1 .. P_n"""
    result = set()
    for p in signature:
        if p.arity > 2:
            result.update(reified_predicate(p, i) for i in range(1, p.arity + 1))
        else:
            result.add(p)
    return frozenset(result)


def _check_reification_names(signature: Iterable[Predicate]) -> None:
    signature = frozenset(signature)
    names = {p.name for p in signature}
    for p in sorted(signature, key=lambda p: (p.name, p.arity)):
        if p.arity <= 2:
            continue
        for i in range(1, p.arity + 1):
            candidate = reified_predicate(p, i).name
            if candidate in names:
                raise SurgeryError(f"reifying {p} would reuse the existing predicate name {candidate}")


def reify_atom(atom: Atom, identifier: Term) -> Tuple[Atom, ...]:
    if atom.predicate.arity <= 2:
        return (atom,)
    return tuple(
        Atom(reified_predicate(atom.predicate, i), (arg, identifier))
        for i, arg in enumerate(atom.args, start=1)
    )


def _reify_atoms(atoms: Iterable[Atom], fresh) -> List[Atom]:
    result: List[Atom] = []
    for atom in atoms:
        identifier = fresh() if atom.predicate.arity > 2 else None
        result.extend(reify_atom(atom, identifier) if identifier else (atom,))
    return result


def reify(x: Reifiable) -> Union[Tuple[Atom, ...], Instance, Rule, RuleSet, CQ]:
    """
    Replace every atom A(x1..xn) with n > 2 by A_1(x1,w), ..., A_n(xn,w).

    w is fresh per source atom: a null `_r<k>` in instances, a variable in
    rules and queries. In a rule, w is universal for body atoms and
    existential for head atoms. A single atom yields a tuple of atoms.

    Raises:
        SurgeryError: If a reified name already occurs in the signature
    """
    if isinstance(x, Atom):
        _check_reification_names({x.predicate})
        if x.args and all(t.is_variable for t in x.args):
            identifier = Term.variable(FreshNames((t.label for t in x.args), prefix="w")())
        else:
            identifier = Term.null(FreshNames((t.label for t in x.args), prefix="_r")())
        return reify_atom(x, identifier)

    if isinstance(x, Instance):
        _check_reification_names(x.signature)
        labels = FreshNames((t.label for t in x.adom), prefix="_r")
        return Instance(frozenset(_reify_atoms(x.sorted_atoms(), lambda: Term.null(labels()))))

    if isinstance(x, Rule):
        _check_reification_names(x.signature)
        labels = FreshNames((t.label for t in x.variables), prefix="w")
        body = _reify_atoms(x.body, lambda: Term.variable(labels()))
        head = _reify_atoms(x.head, lambda: Term.variable(labels()))
        return Rule(x.id, tuple(body), tuple(head))

    if isinstance(x, RuleSet):
        _check_reification_names(x.signature)
        return RuleSet(tuple(reify(rule) for rule in x.rules), x.name)

    if isinstance(x, CQ):
        _check_reification_names(x.signature)
        labels = FreshNames((t.label for t in x.variables), prefix="w")
        return CQ(tuple(_reify_atoms(x.atoms, lambda: Term.variable(labels()))), x.answer_vars)

    raise TypeError(f"cannot reify {type(x).__name__}")


def reification_projection_rules(signature: Iterable[Predicate]) -> RuleSet:
    """Rules A(x1..xn) -> ∃w A_1(x1,w), ..., A_n(xn,w) for every A with n > 2"""
    rules = []
    for p in sorted(signature, key=lambda p: (p.name, p.arity)):
        if p.arity <= 2:
            continue
        xs = tuple(Term.variable(f"x{i}") for i in range(1, p.arity + 1))
        source = Atom(p, xs)
        rules.append(Rule(f"proj_{p.name}", (source,), reify_atom(source, Term.variable("w"))))
    return RuleSet(tuple(rules), "projection")


def _require_binary(rules: RuleSet) -> None:
    wide = sorted((p for p in rules.signature if p.arity > 2), key=lambda p: p.name)
    if wide:
        raise SignatureError(f"streamlining needs an at-most-binary signature, found {wide[0]}")


def streamline(rules: RuleSet) -> RuleSet:
    """
    Split every existential rule B(x̄,ȳ) -> ∃z̄ H(ȳ,z̄) into three rules:

    - init: B -> ∃w A0(w), A_i(y_i, w) for each frontier variable y_i
    - ex:   head(init) -> ∃z̄ B_i_j(u_i, z_j) for u ∈ ȳ·w and z ∈ z̄
    - dl:   head(ex) -> H(ȳ, z̄)

    Datalog rules pass through unchanged.

    Raises:
        SignatureError: If some predicate has arity above 2
    """
    _require_binary(rules)
    fresh_predicates = FreshPredicates(rules.signature)
    result: List[Rule] = []
    for rule in rules:
        if rule.is_datalog:
            result.append(rule)
            continue
        frontier = sorted(rule.frontier, key=term_key)
        existentials = sorted(rule.existentials, key=term_key)
        w = Term.variable(FreshNames((t.label for t in rule.variables), prefix="w")())

        init_head = [Atom(fresh_predicates(f"A0_{rule.id}", 1), (w,))]
        for i, y in enumerate(frontier, start=1):
            init_head.append(Atom(fresh_predicates(f"A_{rule.id}_{i}", 2), (y, w)))

        ex_head = []
        for i, u in enumerate(frontier + [w], start=1):
            for j, z in enumerate(existentials, start=1):
                ex_head.append(Atom(fresh_predicates(f"B_{rule.id}_{i}_{j}", 2), (u, z)))

        result.append(Rule(rule.id + INIT_SUFFIX, rule.body, tuple(init_head)))
        result.append(Rule(rule.id + EX_SUFFIX, tuple(init_head), tuple(ex_head)))
        result.append(Rule(rule.id + DL_SUFFIX, tuple(ex_head), rule.head))
    logger.debug("streamlined %d rules into %d", len(rules), len(result))
    return RuleSet(tuple(result), f"{rules.name}_streamlined")


def body_query(rule: Rule) -> CQ:
    """∃x̄ B(x̄,ȳ) with the frontier ȳ, in canonical order, as answer tuple"""
    return CQ(rule.body, tuple(sorted(rule.frontier, key=term_key)))


@dataclass(frozen=True)
class BodyRewriting:
    """
    Result of rewriting every rule body of a rule set.

    Attributes:
        rules: R together with the added rules
        added: Added rules, keyed by the id of the rule they were derived from
        runs: Rewriting run per rule id
    """
    rules: RuleSet
    added: Dict[str, Tuple[Rule, ...]]
    runs: Dict[str, RewritingRun]

    @property
    def depth(self) -> int:
        """Largest number of generations any body rewriting needed"""
        return max((run.generation_count for run in self.runs.values()), default=0)


def _derived_rule(rule: Rule, query: CQ, disjunct: CQ, rule_id: str, head: Sequence[Atom]) -> Rule:
    mapping: Dict[Term, Term] = dict(zip(query.answer_vars, disjunct.answer_vars))
    fresh = FreshNames((t.label for t in disjunct.variables), prefix="z")
    for z in sorted(rule.existentials, key=term_key):
        mapping[z] = Term.variable(fresh())
    return Rule(rule_id, disjunct.atoms, tuple(apply_substitution(a, mapping) for a in head))


def _partial_heads(rule: Rule) -> List[Tuple[int, Atom]]:
    """Head atoms without existentials that drop some frontier variable"""
    return [
        (i, atom)
        for i, atom in enumerate(rule.head, start=1)
        if not atom.is_top and not atom.variables & rule.existentials and atom.variables < rule.frontier
    ]


def _rewrite_query(
    rule: Rule,
    query: CQ,
    head: Sequence[Atom],
    key: str,
    rules: RuleSet,
    budget: RewritingBudget,
) -> Tuple[RewritingRun, List[Rule]]:
    run = ucq_rewrite(query, rules, budget)
    if not run.converged:
        raise RewritingBudgetExceeded(rule.id, run)
    original = canonical_cq(query)
    derived = [
        _derived_rule(rule, query, disjunct, f"{key}_rw{k}", head)
        for k, disjunct in enumerate(
            (d for d in run.final.disjuncts if not cq_isomorphic(d, original)), start=1
        )
    ]
    return run, derived


def rewrite_bodies(rules: RuleSet, budget: RewritingBudget = RewritingBudget()) -> BodyRewriting:
    """
    Rewrite every rule body against R, with the frontier as answer tuple.

    A head atom without existentials that misses some frontier variable also
    gets its own rewriting, with its variables as answer tuple, so an atom
    over input terms is derived in one step even when the rest of the
    frontier maps to nulls.

    Raises:
        RewritingBudgetExceeded: If some body rewriting does not converge
    """
    added: Dict[str, Tuple[Rule, ...]] = {}
    runs: Dict[str, RewritingRun] = {}
    extra: List[Rule] = []
    for rule in rules:
        run, derived = _rewrite_query(rule, body_query(rule), rule.head, rule.id, rules, budget)
        runs[rule.id] = run
        for i, atom in _partial_heads(rule):
            key = f"{rule.id}_h{i}"
            query = CQ(rule.body, tuple(sorted(atom.variables, key=term_key)))
            runs[key], partial = _rewrite_query(rule, query, (atom,), key, rules, budget)
            derived.extend(partial)
        added[rule.id] = tuple(derived)
        extra.extend(derived)
    logger.info("body rewriting of %s added %d rules", rules.name, len(extra))
    return BodyRewriting(RuleSet(rules.rules + tuple(extra), f"{rules.name}_rew"), added, runs)


def body_rewrite(rules: RuleSet, budget: RewritingBudget = RewritingBudget()) -> RuleSet:
    """
    rew(R) = R ∪ one rule per disjunct of the rewriting of each rule body,
    plus the per-atom rewritings of heads that drop frontier variables.

    Raises:
        RewritingBudgetExceeded: If R does not look bdd within budget
    """
    return rewrite_bodies(rules, budget).rules


def split_datalog(rules: RuleSet) -> Tuple[RuleSet, RuleSet]:
    """Partition R into its Datalog rules and its existential rules"""
    return (
        RuleSet(rules.datalog_rules, f"{rules.name}_DL"),
        RuleSet(rules.existential_rules, f"{rules.name}_EX"),
    )


def streamline_role(rule_id: str) -> Optional[str]:
    for suffix in (INIT_SUFFIX, EX_SUFFIX, DL_SUFFIX):
        if rule_id.endswith(suffix):
            return suffix[1:]
    return None


def unique_rule_id(rules: RuleSet, base: str) -> str:
    taken = {r.id for r in rules}
    if base not in taken:
        return base
    fresh = FreshNames(taken, prefix=f"{base}_")
    return fresh()
