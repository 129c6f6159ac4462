"""
Syntactic and empirical property checks over rule sets.

All checks return a PropertyResult; it is truthy iff the property holds and
carries the first counterexample otherwise.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Optional, Sequence

from ..config import DEFAULT_MAX_ATOMS
from ..errors import PreconditionError, SignatureError
from ..homomorphisms import find_hom, iter_homs
from ..model import Atom, Instance, RuleSet
from ..ruleEngine.chase import Trigger, chase
from .transforms import DL_SUFFIX, EX_SUFFIX, INIT_SUFFIX

logger = logging.getLogger("pawn.properties")


@dataclass(frozen=True)
class PropertyResult:
    """
    Attributes:
        name: Property that was checked
        holds: Whether it holds
        counterexample: Human-readable first violation
        rule_id: Rule involved in the violation, if any
    """
    name: str
    holds: bool
    counterexample: Optional[str] = None
    rule_id: Optional[str] = None

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "holds": self.holds,
            "counterexample": self.counterexample,
            "rule": self.rule_id,
        }


def check_forward_existential(rules: RuleSet) -> PropertyResult:
    """
    Every binary head atom of an existential rule goes from a frontier
    variable to an existential variable.

    Unary and nullary head atoms cannot violate the property.
    """
    for rule in rules.existential_rules:
        for atom in rule.head:
            if atom.predicate.arity != 2:
                continue
            source, target = atom.args
            if source not in rule.frontier or target not in rule.existentials:
                return PropertyResult(
                    "forward-existential", False, f"{atom} in rule {rule.id}", rule.id
                )
    return PropertyResult("forward-existential", True)


def check_predicate_unique(rules: RuleSet) -> PropertyResult:
    """
    Every predicate occurs at most once in the head of each existential rule.

    Raises:
        SignatureError: If the signature is not at most binary
    """
    wide = sorted((p for p in rules.signature if p.arity > 2), key=lambda p: p.name)
    if wide:
        raise SignatureError(f"predicate-uniqueness is defined over binary signatures, found {wide[0]}")
    for rule in rules.existential_rules:
        seen = set()
        for atom in rule.head:
            if atom.predicate in seen:
                return PropertyResult(
                    "predicate-unique", False, f"{atom.predicate} repeated in rule {rule.id}", rule.id
                )
            seen.add(atom.predicate)
    return PropertyResult("predicate-unique", True)


@dataclass(frozen=True)
class QuickResult(PropertyResult):
    instance_index: Optional[int] = None
    atom: Optional[str] = None


def _producing_rule(fired: Iterable[Trigger], atom: Atom) -> Optional[str]:
    for trigger in fired:
        frontier = trigger.rule.frontier
        for head_atom in trigger.rule.head:
            if head_atom.variables <= frontier and trigger.body_map.apply(head_atom) == atom:
                return trigger.rule.id
    return None


def check_quick_empirical(
    rules: RuleSet,
    instances: Sequence[Instance],
    depth: int,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> QuickResult:
    """
    Every chase atom whose terms all lie in adom(I) is already in step 1.

    Such an atom can only come from a head atom without existential variables,
    whatever the trigger maps its other frontier variables to.

    Args:
        rules: Rule set to test
        instances: Sample instances
        depth: Chase depth (at least 1)
        max_atoms: Resource guard per chase

    Returns:
        QuickResult with the first violating atom, if any
    """
    if depth < 1:
        raise PreconditionError("quickness is checked at depth 1 or more")
    for index, instance in enumerate(instances):
        trace = chase(instance, rules, depth, max_atoms)
        if trace.depth < 2:
            continue
        first_step = trace.steps[1]
        domain = instance.adom
        for step in range(2, trace.depth + 1):
            for atom in trace.new_atoms[step]:
                if not set(atom.args) <= domain or atom in first_step:
                    continue
                logger.info("quickness violated by %s on sample %d", atom, index)
                return QuickResult(
                    "quick",
                    False,
                    f"{atom} on sample {index} needs {step} steps",
                    rule_id=_producing_rule(trace.fired[step], atom),
                    instance_index=index,
                    atom=str(atom),
                )
    return QuickResult("quick", True)


def check_signature_tripartition(original: RuleSet, streamlined: RuleSet) -> PropertyResult:
    """
    The three-signature shape of a streamlined rule set.

    Bodies of init rules and heads of dl rules are over the original signature
    Σ, heads of init rules and bodies of ex rules over Σ_A, heads of ex rules
    and bodies of dl rules over Σ_B, with Σ, Σ_A, Σ_B pairwise disjoint.
    """
    sigma = original.signature
    roles: Dict[str, list] = {"init": [], "ex": [], "dl": []}
    for rule in original.existential_rules:
        roles["init"].append(streamlined.get(rule.id + INIT_SUFFIX))
        roles["ex"].append(streamlined.get(rule.id + EX_SUFFIX))
        roles["dl"].append(streamlined.get(rule.id + DL_SUFFIX))

    def heads(rs) -> set:
        return {a.predicate for r in rs for a in r.head if not a.is_top}

    def bodies(rs) -> set:
        return {a.predicate for r in rs for a in r.body if not a.is_top}

    sigma_a = heads(roles["init"])
    sigma_b = heads(roles["ex"])
    failures = []
    if sigma & sigma_a or sigma & sigma_b or sigma_a & sigma_b:
        failures.append("signatures overlap")
    if not bodies(roles["init"]) <= sigma or not heads(roles["dl"]) <= sigma:
        failures.append("init bodies or dl heads leave the original signature")
    if not bodies(roles["ex"]) <= sigma_a:
        failures.append("ex bodies leave the init-head signature")
    if not bodies(roles["dl"]) <= sigma_b:
        failures.append("dl bodies leave the ex-head signature")
    passthrough = [r for r in streamlined if r.id in {d.id for d in original.datalog_rules}]
    if any(not r.signature <= sigma for r in passthrough):
        failures.append("a Datalog rule leaves the original signature")
    if failures:
        return PropertyResult("signature-tripartition", False, "; ".join(failures))
    return PropertyResult("signature-tripartition", True)


def check_head_preservation(original: RuleSet, rewritten: Iterable) -> PropertyResult:
    """
    Every rule in rewritten has the head of some original rule, up to a
    renaming that identifies frontier variables and keeps existentials apart.
    A single-atom head may also be the image of one head atom without
    existentials.
    """
    for rule in rewritten:
        if _has_matching_head(original, rule):
            continue
        return PropertyResult("head-preservation", False, f"head of {rule.id} matches no original head", rule.id)
    return PropertyResult("head-preservation", True)


def _has_matching_head(original: RuleSet, rule) -> bool:
    target = frozenset(rule.head)
    for candidate in original:
        if len(target) == 1 and not rule.existentials and _has_matching_atom(candidate, target):
            return True
        if len(candidate.existentials) != len(rule.existentials):
            continue
        for hom in iter_homs(candidate.head, target):
            if hom.image(candidate.head) != target:
                continue
            images = [hom(z) for z in candidate.existentials]
            if len(set(images)) != len(images) or not set(images) <= rule.existentials:
                continue
            if all(hom(y) in rule.frontier for y in candidate.frontier):
                return True
    return False


def _has_matching_atom(candidate, target: frozenset) -> bool:
    return any(
        find_hom((atom,), target) is not None
        for atom in candidate.head
        if not atom.is_top and not atom.variables & candidate.existentials
    )
