"""
RegalizeAgent - Rule-set surgery
================================

First stage of verify-pawn. Turns the input (I, R) into a regal rule set by
encoding I as a rule, reifying, streamlining and rewriting bodies, then emits
RegalSetReady.

Processing Flow:
---------------
1. Run regalize in a worker thread
2. Check the regal flags (forward-existential, predicate-unique, quick)
3. Optionally run the surgery obligations on random samples
4. Emit RegalSetReady with the stage summary

A body rewriting that exceeds its budget makes the run inconclusive: the
input may simply not be bdd. A failed regal flag or obligation is a
soundness failure and is raised.
"""

from typing import Any, Dict

from src.config import RunConfig
from src.errors import RewritingBudgetExceeded, SoundnessError
from src.surgery import regalize

from .base_agent import BaseAgent, StageOutcome, Verdict


class RegalizeAgent(BaseAgent):
    """Runs the regalization pipeline and checks its output"""

    def __init__(self):
        super().__init__("regalize", "🩺 RegalizeAgent")

    async def process(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Args:
            input_data: instance, rules, config (RunConfig), verify_obligations
                and correlation_id

        Returns:
            Dictionary with outcome, and on success the regal rules and the
            SurgeryReport

        Raises:
            SoundnessError: If a regal flag or a surgery obligation fails
        """
        correlation_id = input_data["correlation_id"]
        config: RunConfig = input_data["config"]
        rules = input_data["rules"]

        try:
            regal, report = await self.run_blocking(
                regalize,
                input_data["instance"],
                rules,
                config.budget(),
                samples=config.samples,
                obligation_depth=config.obligation_depth,
                slack=config.slack,
                seed=config.seed,
                max_atoms=config.max_atoms,
            )
        except RewritingBudgetExceeded as e:
            self.log_activity(f"body rewriting of {e.rule_id} exceeded its budget", "warning")
            outcome = StageOutcome(
                "regalize",
                False,
                str(e),
                {"rule": e.rule_id, "generations": e.run.generation_count},
                verdict=Verdict.INCONCLUSIVE,
                reason="body_rewrite",
            )
            self.publish_event("RegalizationInconclusive", outcome.to_dict(), correlation_id)
            return {"outcome": outcome}

        failing = sorted(name for name, flag in report.flags.items() if not flag)
        if failing:
            flag = report.flags[failing[0]]
            self.log_activity(f"regal flag {flag.name} fails: {flag.counterexample}", "error")
            raise SoundnessError(f"regalized rule set is not {flag.name}: {flag.counterexample}")

        if input_data.get("verify_obligations"):
            await self.run_blocking(report.run_obligations)
            if report.obligations_failed:
                first = report.obligations_failed[0]
                raise SoundnessError(f"surgery obligation {first.name} failed on sample {first.sample}: {first.detail}")

        data = {
            "rules_in": len(rules),
            "rules_out": len(regal),
            "stages": [s.to_dict() for s in report.stages],
            "flags": {name: flag.holds for name, flag in sorted(report.flags.items())},
            "obligations": [r.to_dict() for r in report.results],
        }
        outcome = StageOutcome("regalize", True, f"{len(rules)} rules regalized into {len(regal)}", data)
        self.publish_event("RegalSetReady", data, correlation_id)
        return {"outcome": outcome, "rules": regal, "surgery": report}
