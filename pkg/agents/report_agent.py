"""
ReportAgent - verify-pawn report generation
===========================================

Final stage of the pipeline. Aggregates the outcomes of the earlier stages
into a PawnReport and emits ReportGenerated.

The verdict is taken from the stage that decided the run: the first stage
whose outcome carries a verdict ends the pipeline, so it is always the last
outcome received. The report records for every stage that ran what it
confirmed, plus notes that qualify the verdict.

Report Contents:
---------------
- verdict: LoopEntailed, NoLargeTournamentAtDepth, TheoremMachineryConfirmed
  or Inconclusive
- reason: budget, guard or edge rewriting, for inconclusive runs
- stages: per-stage records
- notes: capacity warnings and other caveats

The JSON form carries no timestamps, so identical inputs give identical
reports.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from src.errors import SoundnessError

from .base_agent import BaseAgent, StageOutcome, Verdict


@dataclass
class PawnReport:
    """
    Result of one verify-pawn run.

    Attributes:
        verdict: Final verdict
        correlation_id: Digest of the run inputs
        stages: Outcome of every stage that ran, in order
        reason: Why the run is inconclusive, if it is
        notes: Caveats, e.g. a tournament too small for guaranteed extraction
    """
    verdict: Verdict
    correlation_id: str
    stages: List[StageOutcome]
    reason: Optional[str] = None
    notes: List[str] = field(default_factory=list)

    @property
    def decided_by(self) -> str:
        return self.stages[-1].stage

    def stage(self, name: str) -> Optional[StageOutcome]:
        return next((s for s in self.stages if s.stage == name), None)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "reason": self.reason,
            "decided_by": self.decided_by,
            "correlation_id": self.correlation_id,
            "stages": [s.to_dict() for s in self.stages],
            "notes": list(self.notes),
        }

    def summary(self) -> str:
        """One line per stage and a closing verdict line"""
        lines = [f"{s.stage}: {'ok' if s.confirmed else 'stopped'} - {s.detail}" for s in self.stages]
        lines.extend(f"note: {n}" for n in self.notes)
        verdict = self.verdict.value + (f" ({self.reason})" if self.reason else "")
        lines.append(f"verdict: {verdict}")
        return "\n".join(lines)


class ReportAgent(BaseAgent):
    """Builds the PawnReport from the stage outcomes"""

    def __init__(self):
        super().__init__("report", "📋 ReportAgent")

    async def process(self, input_data: Dict[str, Any]) -> PawnReport:
        """
        Args:
            input_data: outcomes (List[StageOutcome]) and correlation_id

        Returns:
            The PawnReport

        Raises:
            SoundnessError: If no stage decided the run
        """
        correlation_id = input_data["correlation_id"]
        outcomes: List[StageOutcome] = list(input_data["outcomes"])
        if not outcomes or outcomes[-1].verdict is None:
            raise SoundnessError("the pipeline ended without a verdict")

        decisive = outcomes[-1]
        report = PawnReport(
            verdict=decisive.verdict,
            correlation_id=correlation_id,
            stages=outcomes,
            reason=decisive.reason,
            notes=self._notes(outcomes),
        )
        self.log_activity(f"verdict {report.verdict.value} decided by {report.decided_by}")
        self.publish_event(
            "ReportGenerated",
            {"verdict": report.verdict.value, "reason": report.reason, "stages": len(outcomes)},
            correlation_id,
        )
        return report

    def _notes(self, outcomes: List[StageOutcome]) -> List[str]:
        notes = []
        for outcome in outcomes:
            if outcome.stage == "regalize" and outcome.confirmed and not outcome.data.get("obligations"):
                notes.append("surgery obligations were not run")
            if outcome.stage == "valley" and outcome.data.get("capacity_note"):
                notes.append(outcome.data["capacity_note"])
        return notes
