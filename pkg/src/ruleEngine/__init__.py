"""
Rule Engine
===========

Forward and backward reasoning over existential rules:

- chase: the oblivious chase with trigger provenance and timestamps
- rewriting: piece-based UCQ rewriting, injectivization and the bdd estimate
"""

from .chase import (
    ChaseOrder,
    ChaseStatus,
    ChaseTrace,
    TermMeta,
    Trigger,
    chase,
    chase_order,
    bounded_hom_equivalent,
    datalog_saturate,
    is_dag,
    trigger_output,
    triggers,
)
from .rewriting import (
    RewritingRun,
    RewritingStatus,
    answers,
    bdd_constant_empirical,
    canonical_cq,
    define_edge_relation,
    injectivize,
    rewrite_step,
    ucq_rewrite,
)

__all__ = [
    "ChaseOrder",
    "ChaseStatus",
    "ChaseTrace",
    "TermMeta",
    "Trigger",
    "chase",
    "chase_order",
    "bounded_hom_equivalent",
    "datalog_saturate",
    "is_dag",
    "trigger_output",
    "triggers",
    "RewritingRun",
    "RewritingStatus",
    "answers",
    "bdd_constant_empirical",
    "canonical_cq",
    "define_edge_relation",
    "injectivize",
    "rewrite_step",
    "ucq_rewrite",
]
