"""
Surgery
=======

Rule-set transformations that turn a bdd rule set into a regal one, the
property checks that certify the result, and executable obligations that
test each transformation at bounded depth.
"""

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
from .pipeline import StageRecord, SurgeryReport, regal_flags, regalize
from .properties import (
    PropertyResult,
    QuickResult,
    check_forward_existential,
    check_head_preservation,
    check_predicate_unique,
    check_quick_empirical,
    check_signature_tripartition,
)
from .transforms import (
    BodyRewriting,
    body_query,
    body_rewrite,
    encode_db,
    reification_projection_rules,
    reify,
    reify_signature,
    rewrite_bodies,
    split_datalog,
    streamline,
    streamline_role,
    unique_rule_id,
)

__all__ = [
    "Obligation",
    "ObligationResult",
    "ObligationStatus",
    "body_rewrite_obligation",
    "encode_db_obligation",
    "reify_obligation",
    "reify_projection_obligation",
    "skeleton_obligation",
    "streamline_obligation",
    "StageRecord",
    "SurgeryReport",
    "regal_flags",
    "regalize",
    "PropertyResult",
    "QuickResult",
    "check_forward_existential",
    "check_head_preservation",
    "check_predicate_unique",
    "check_quick_empirical",
    "check_signature_tripartition",
    "BodyRewriting",
    "body_query",
    "body_rewrite",
    "encode_db",
    "reification_projection_rules",
    "reify",
    "reify_signature",
    "rewrite_bodies",
    "split_datalog",
    "streamline",
    "streamline_role",
    "unique_rule_id",
]
