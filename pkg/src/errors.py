"""
Exception hierarchy for the regal rules toolkit.

Every error raised on purpose by the toolkit derives from PawnError so that the
CLI can map it onto an exit code. Budget and resource-guard exhaustion are
statuses on the corresponding run objects, not exceptions, with the single
exception of RewritingBudgetExceeded raised by body rewriting.
"""

from dataclasses import dataclass
from typing import Any, Optional


@dataclass(frozen=True)
class SourceSpan:
    """
    Position of a token in a source file.

    Attributes:
        file: Path of the parsed file, or "<string>" for in-memory text
        line: 1-based line number
        column: 1-based column number
    """
    file: str
    line: int
    column: int

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError("line and column are 1-based")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class PawnError(Exception):
    """Base class for all toolkit errors"""


class ParseError(PawnError):
    """Syntax or well-formedness error in rule, fact or query text"""

    def __init__(self, message: str, span: Optional[SourceSpan] = None):
        self.message = message
        self.span = span
        super().__init__(f"{span}: {message}" if span else message)


class ArityConflictError(ParseError):
    """A predicate name was used with two different arities"""


class SignatureError(PawnError):
    """The operation requires an at-most-binary signature"""


class SurgeryError(PawnError):
    """A rule-set transformation received input it cannot transform"""


class PreconditionError(PawnError):
    """An operation was called outside its precondition"""


class AlreadyValleyError(PreconditionError):
    """Peak removal was asked to improve a witness that is already a valley"""


class UnknownTermError(PawnError):
    """A term has no timestamp in the given chase trace"""


class SoundnessError(PawnError):
    """An internal proof obligation failed; never swallowed"""


class RewritingBudgetExceeded(PawnError):
    """
    UCQ rewriting of some rule body did not converge within budget.

    Attributes:
        rule_id: Rule whose body rewriting diverged
        run: The RewritingRun that exhausted its budget
    """

    def __init__(self, rule_id: str, run: Any):
        self.rule_id = rule_id
        self.run = run
        super().__init__(
            f"rewriting of the body of {rule_id} exceeded its budget "
            f"after {run.generation_count} generations"
        )
