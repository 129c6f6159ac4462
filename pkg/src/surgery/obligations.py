"""
Bounded homomorphism obligations for the surgeries.

Each surgery preserves query answers up to homomorphic equivalence of chases.
An Obligation turns that statement into an executable check on a sample
instance: two chase prefixes are computed at the stated depths and
homomorphisms are searched in both directions, exactly.

A chase that hits its resource guard makes the check inconclusive, not failed.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from ..config import DEFAULT_MAX_ATOMS
from ..homomorphisms import find_hom
from ..model import Instance, Predicate, RuleSet, disjoint_union
from ..ruleEngine.chase import ChaseTrace, chase, datalog_saturate
from .transforms import (
    encode_db,
    reification_projection_rules,
    reify,
    reify_signature,
    split_datalog,
    unique_rule_id,
)

logger = logging.getLogger("pawn.obligations")


class ObligationStatus(str, Enum):
    PASSED = "passed"
    FAILED = "failed"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ObligationResult:
    """
    Outcome of one obligation on one sample.

    Attributes:
        name: Obligation name
        sample: Index of the sample instance
        status: PASSED, FAILED or INCONCLUSIVE
        forward: Left prefix maps into right prefix
        backward: Right prefix maps into left prefix
        detail: Depths used and atom counts
    """
    name: str
    sample: int
    status: ObligationStatus
    forward: Optional[bool] = None
    backward: Optional[bool] = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status is ObligationStatus.PASSED

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "sample": self.sample,
            "status": self.status.value,
            "forward": self.forward,
            "backward": self.backward,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class Obligation:
    """
    A named, executable homomorphism obligation.

    Attributes:
        name: Short identifier, e.g. "streamline"
        description: The equivalence being tested, in words
        check: Runs the obligation on one sample instance
        prepare: Maps a sample over the original signature to this stage's input
        fixed_samples: Samples that replace the supplied ones, if set
    """
    name: str
    description: str
    check: Callable[[int, Instance], ObligationResult] = field(repr=False, compare=False)
    prepare: Optional[Callable[[Instance], Instance]] = field(default=None, repr=False, compare=False)
    fixed_samples: Optional[Tuple[Instance, ...]] = None

    def with_stage(
        self,
        prepare: Optional[Callable[[Instance], Instance]] = None,
        fixed_samples: Optional[Sequence[Instance]] = None,
    ) -> "Obligation":
        return replace(
            self,
            prepare=prepare,
            fixed_samples=tuple(fixed_samples) if fixed_samples is not None else None,
        )

    def run(self, samples: Sequence[Instance]) -> List[ObligationResult]:
        if self.fixed_samples is not None:
            samples = self.fixed_samples
        elif self.prepare is not None:
            samples = [self.prepare(s) for s in samples]
        results = [self.check(i, sample) for i, sample in enumerate(samples)]
        for result in results:
            log = logger.warning if result.status is ObligationStatus.FAILED else logger.debug
            log("obligation %s on sample %d: %s %s", self.name, result.sample, result.status.value, result.detail)
        return results


def _compare(
    name: str,
    sample: int,
    forward_pair: Sequence[ChaseTrace],
    backward_pair: Sequence[ChaseTrace],
    forward_restrict: Optional[Iterable[Predicate]] = None,
    backward_restrict: Optional[Iterable[Predicate]] = None,
    detail: str = "",
) -> ObligationResult:
    traces = list(forward_pair) + list(backward_pair)
    if any(not t.completed for t in traces):
        return ObligationResult(name, sample, ObligationStatus.INCONCLUSIVE, detail=detail + " (guard exceeded)")

    def atoms(trace: ChaseTrace, restrict) -> frozenset:
        final = trace.final
        return (final.restrict(restrict) if restrict is not None else final).atoms

    forward = find_hom(atoms(forward_pair[0], forward_restrict), atoms(forward_pair[1], forward_restrict)) is not None
    backward = find_hom(atoms(backward_pair[0], backward_restrict), atoms(backward_pair[1], backward_restrict)) is not None
    status = ObligationStatus.PASSED if forward and backward else ObligationStatus.FAILED
    return ObligationResult(name, sample, status, forward, backward, detail)


def encode_db_obligation(
    rules: RuleSet,
    encoded: Instance,
    depth: int = 3,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> Obligation:
    """
    chase(J ⊎ J', S, k) against chase(J, S ∪ {true -> J'}, k+1).

    Forward at (k, k+1), backward at (k+1, k+1).
    """
    encoding = encode_db(encoded, rule_id=unique_rule_id(rules, "r_db"))
    extended = rules.with_rules([encoding], f"{rules.name}+db")

    def check(index: int, sample: Instance) -> ObligationResult:
        merged = disjoint_union(sample, encoded)
        left_k = chase(merged, rules, depth, max_atoms)
        left_next = chase(merged, rules, depth + 1, max_atoms)
        right = chase(sample, extended, depth + 1, max_atoms)
        return _compare(
            "encode-db", index, (left_k, right), (right, left_next), detail=f"depth {depth} vs {depth + 1}"
        )

    return Obligation("encode-db", "J ⊎ J' under S matches J under S ∪ {true -> J'} one step later", check)


def reify_obligation(rules: RuleSet, depth: int = 3, max_atoms: int = DEFAULT_MAX_ATOMS) -> Obligation:
    """chase(reify(J), reify(S), k) against reify(chase(J, S, k)), equal depths"""
    reified_rules = reify(rules)

    def check(index: int, sample: Instance) -> ObligationResult:
        left = chase(reify(sample), reified_rules, depth, max_atoms)
        plain = chase(sample, rules, depth, max_atoms)
        if not plain.completed:
            return ObligationResult("reify", index, ObligationStatus.INCONCLUSIVE, detail="guard exceeded")
        right = chase(reify(plain.final), RuleSet((), "empty"), 0)
        return _compare("reify", index, (left, right), (right, left), detail=f"depth {depth}")

    return Obligation("reify", "reification commutes with the chase", check)


def reify_projection_obligation(signature: Iterable[Predicate]) -> Obligation:
    """reify(J) against one step of the projection rules on J, over the reified signature"""
    signature = frozenset(signature)
    projection = reification_projection_rules(signature)
    reified = reify_signature(signature)

    def check(index: int, sample: Instance) -> ObligationResult:
        left = chase(reify(sample), RuleSet((), "empty"), 0)
        right = chase(sample, projection, 1)
        return _compare(
            "reify-projection", index, (left, right), (right, left),
            forward_restrict=reified, backward_restrict=reified, detail="one projection step",
        )

    return Obligation("reify-projection", "reify(J) matches the projection rules applied to J", check)


def streamline_obligation(
    rules: RuleSet,
    streamlined: RuleSet,
    depth: int = 3,
    slack: int = 3,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> Obligation:
    """
    chase(J, R, i) against chase(J, ∇R, slack·i), both restricted to R's signature.

    Forward at (i, slack·i), backward at (slack·i, slack·i).
    """
    sigma = rules.signature
    stretched = slack * depth

    def check(index: int, sample: Instance) -> ObligationResult:
        left = chase(sample, rules, depth, max_atoms)
        right = chase(sample, streamlined, stretched, max_atoms)
        left_stretched = chase(sample, rules, stretched, max_atoms)
        return _compare(
            "streamline", index, (left, right), (right, left_stretched),
            forward_restrict=sigma, backward_restrict=sigma, detail=f"depth {depth} vs {stretched}",
        )

    return Obligation("streamline", "streamlining preserves the chase on the original signature", check)


def body_rewrite_obligation(
    rules: RuleSet,
    rewritten: RuleSet,
    rewriting_depth: int,
    depth: int = 3,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> Obligation:
    """
    chase(J, R, k) maps into chase(J, rew(R), k) at equal depth; backward,
    chase(J, rew(R), k) maps into chase(J, R, k·(d+1)) where d is the number of
    rewriting generations the bodies needed.

    One step of a rewritten body stands for up to d+1 steps of R, so the
    backward direction does not hold at equal depth.
    """
    stretched = depth * (rewriting_depth + 1)

    def check(index: int, sample: Instance) -> ObligationResult:
        left = chase(sample, rules, depth, max_atoms)
        right = chase(sample, rewritten, depth, max_atoms)
        left_stretched = left if stretched == depth else chase(sample, rules, stretched, max_atoms)
        return _compare(
            "body-rewrite", index, (left, right), (right, left_stretched), detail=f"depth {depth} vs {stretched}"
        )

    return Obligation("body-rewrite", "adding body rewritings does not change the chase", check)


def skeleton_obligation(
    rules: RuleSet,
    depth: int = 3,
    slack: int = 3,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> Obligation:
    """
    chase(J, R, k) against the Datalog saturation of chase(J, R∃, k).

    Backward, the saturation maps into chase(J, R, slack·k).
    """
    datalog, existential = split_datalog(rules)
    stretched = slack * depth

    def check(index: int, sample: Instance) -> ObligationResult:
        full = chase(sample, rules, depth, max_atoms)
        prefix = chase(sample, existential, depth, max_atoms)
        if not prefix.completed:
            return ObligationResult("skeleton", index, ObligationStatus.INCONCLUSIVE, detail="guard exceeded")
        saturated = datalog_saturate(prefix.final, datalog, max_atoms=max_atoms)
        full_stretched = chase(sample, rules, stretched, max_atoms)
        return _compare(
            "skeleton", index, (full, saturated), (saturated, full_stretched), detail=f"depth {depth} vs {stretched}"
        )

    return Obligation("skeleton", "the chase splits into an existential prefix and a Datalog closure", check)
