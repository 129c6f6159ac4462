"""
The regalization pipeline.

regalize chains the four surgeries

    R ∪ {true -> J}  →  reify  →  streamline  →  body rewriting

and returns the resulting rule set with a SurgeryReport. The report carries
the regal flags of the output (forward-existential, predicate-unique, quick)
and one executable obligation per surgery. Obligations are built eagerly but
only run on request, since their stretched chases are far more expensive
than the surgeries themselves.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

from ..config import DEFAULT_MAX_ATOMS, RewritingBudget
from ..model import Instance, Predicate, RuleSet
from ..sampling import random_instances
from .obligations import (
    Obligation,
    ObligationResult,
    ObligationStatus,
    body_rewrite_obligation,
    encode_db_obligation,
    reify_obligation,
    reify_projection_obligation,
    skeleton_obligation,
    streamline_obligation,
)
from .properties import (
    PropertyResult,
    check_forward_existential,
    check_predicate_unique,
    check_quick_empirical,
)
from .transforms import BodyRewriting, encode_db, reify, reify_signature, rewrite_bodies, streamline, unique_rule_id

logger = logging.getLogger("pawn.pipeline")


def _signature_names(signature: FrozenSet[Predicate]) -> List[str]:
    return [str(p) for p in sorted(signature, key=lambda p: (p.name, p.arity))]


@dataclass(frozen=True)
class StageRecord:
    """One surgery applied by regalize"""
    name: str
    rules_in: int
    rules_out: int
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {"stage": self.name, "rules_in": self.rules_in, "rules_out": self.rules_out, "detail": self.detail}


@dataclass
class SurgeryReport:
    """
    Everything regalize knows about its output.

    Attributes:
        input_signature: Predicates of the input rules and instance
        output_signature: Predicates of the regal rule set
        fresh_predicates: Output predicates absent from the input
        stages: Surgeries in the order they were applied
        obligations: One homomorphism obligation per surgery
        obligation_samples: Instances over the input signature the obligations run on
        flags: fw-ex, pu and quick results on the output
        rewriting: Body rewriting runs, per streamlined rule
        results: Obligation outcomes, filled by run_obligations
    """
    input_signature: FrozenSet[Predicate]
    output_signature: FrozenSet[Predicate]
    fresh_predicates: FrozenSet[Predicate]
    stages: List[StageRecord]
    obligations: List[Obligation]
    obligation_samples: List[Instance]
    flags: Dict[str, PropertyResult]
    rewriting: Optional[BodyRewriting] = None
    results: List[ObligationResult] = field(default_factory=list)

    def run_obligations(self, samples: Optional[Sequence[Instance]] = None) -> List[ObligationResult]:
        """
        Run every obligation on samples (default: the report's own samples).

        Returns:
            All outcomes, also stored in results
        """
        samples = list(samples) if samples is not None else self.obligation_samples
        self.results = []
        for obligation in self.obligations:
            logger.info("running obligation %s on %d samples", obligation.name, len(samples))
            self.results.extend(obligation.run(samples))
        return self.results

    @property
    def obligations_failed(self) -> List[ObligationResult]:
        return [r for r in self.results if r.status is ObligationStatus.FAILED]

    @property
    def obligations_inconclusive(self) -> List[ObligationResult]:
        return [r for r in self.results if r.status is ObligationStatus.INCONCLUSIVE]

    @property
    def obligations_passed(self) -> bool:
        return not self.obligations_failed

    @property
    def is_regal(self) -> bool:
        """All three syntactic/empirical regal flags hold"""
        return all(bool(flag) for flag in self.flags.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "input_signature": _signature_names(self.input_signature),
            "output_signature": _signature_names(self.output_signature),
            "fresh_predicates": _signature_names(self.fresh_predicates),
            "stages": [s.to_dict() for s in self.stages],
            "flags": {name: flag.to_dict() for name, flag in self.flags.items()},
            "obligations": [{"name": o.name, "description": o.description} for o in self.obligations],
            "results": [r.to_dict() for r in self.results],
            "rewriting": (
                {rule_id: run.to_dict() for rule_id, run in sorted(self.rewriting.runs.items())}
                if self.rewriting else {}
            ),
        }


def regal_flags(
    rules: RuleSet,
    samples: Sequence[Instance],
    quick_depth: int = 3,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> Dict[str, PropertyResult]:
    return {
        "fw-ex": check_forward_existential(rules),
        "pu": check_predicate_unique(rules),
        "quick": check_quick_empirical(rules, samples, quick_depth, max_atoms),
    }


def regalize(
    instance: Instance,
    rules: RuleSet,
    budget: RewritingBudget = RewritingBudget(),
    *,
    samples: int = 20,
    quick_depth: int = 3,
    obligation_depth: int = 3,
    slack: int = 3,
    seed: int = 0,
    max_atoms: int = DEFAULT_MAX_ATOMS,
    obligation_samples: int = 3,
) -> Tuple[RuleSet, SurgeryReport]:
    """
    body_rewrite(streamline(reify(R ∪ {true -> I}))) with its report.

    Args:
        instance: Instance to encode; {true} skips the encoding step
        rules: Input rule set
        budget: Rewriting budget for the bodies
        samples: Number of random instances for the quickness flag
        quick_depth: Chase depth of the quickness check
        obligation_depth: Source depth of the obligations
        slack: Depth factor for obligations with a stretched side
        seed: Seed of the random samples
        max_atoms: Resource guard for every chase
        obligation_samples: Number of random instances the obligations run on

    Returns:
        (regal rule set, SurgeryReport)

    Raises:
        RewritingBudgetExceeded: If some rule body does not rewrite within budget
        SurgeryError: On reification name clashes
    """
    input_signature = frozenset(rules.signature | instance.signature)
    stages: List[StageRecord] = []
    obligations: List[Obligation] = []

    encoded = rules
    if not instance.is_trivial:
        encoding = encode_db(instance, rule_id=unique_rule_id(rules, "r_db"))
        encoded = rules.with_rules([encoding], f"{rules.name}+db")
        stages.append(StageRecord("encode-db", len(rules), len(encoded), f"{len(encoding.head)} head atoms"))
        obligations.append(encode_db_obligation(rules, instance, obligation_depth, max_atoms))

    reified = reify(encoded)
    stages.append(StageRecord("reify", len(encoded), len(reified)))
    obligations.append(reify_obligation(encoded, obligation_depth, max_atoms))
    if any(p.arity > 2 for p in encoded.signature):
        obligations.append(reify_projection_obligation(encoded.signature))

    streamlined = streamline(reified)
    stages.append(StageRecord("streamline", len(reified), len(streamlined)))
    obligations.append(
        streamline_obligation(reified, streamlined, obligation_depth, slack, max_atoms).with_stage(prepare=reify)
    )

    rewriting = rewrite_bodies(streamlined, budget)
    output = RuleSet(rewriting.rules.rules, f"{rules.name}_regal")
    stages.append(
        StageRecord("body-rewrite", len(streamlined), len(output), f"rewriting depth {rewriting.depth}")
    )
    obligations.append(
        body_rewrite_obligation(streamlined, output, rewriting.depth, obligation_depth, max_atoms)
        .with_stage(prepare=reify)
    )
    obligations.append(
        skeleton_obligation(output, obligation_depth, slack, max_atoms).with_stage(fixed_samples=[Instance()])
    )

    quick_samples = random_instances(reify_signature(input_signature), samples, seed)
    flags = regal_flags(output, quick_samples, quick_depth, max_atoms)
    for name, flag in flags.items():
        if not flag:
            logger.warning("regal flag %s fails: %s", name, flag.counterexample)

    output_signature = output.signature
    report = SurgeryReport(
        input_signature=input_signature,
        output_signature=output_signature,
        fresh_predicates=frozenset(output_signature - input_signature),
        stages=stages,
        obligations=obligations,
        obligation_samples=random_instances(input_signature, obligation_samples, seed + 1, max_atoms=3, domain_size=3),
        flags=flags,
        rewriting=rewriting,
    )
    logger.info("regalized %s: %d rules, regal=%s", rules.name, len(output), report.is_regal)
    return output, report
