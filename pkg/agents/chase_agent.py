"""
ChaseAgent - Existential prefix and Datalog saturation
======================================================

Listens for RegalSetReady. Splits the regal rule set into its Datalog and
existential parts, chases {true} with the existential part to the requested
depth, saturates the resulting prefix with the Datalog part and emits
PrefixReady.

A chase that stops on its atom guard makes the run inconclusive.
"""

from typing import Any, Dict

from src.config import RunConfig
from src.model import Instance
from src.ruleEngine.chase import ChaseTrace, chase, datalog_saturate
from src.surgery import split_datalog

from .base_agent import BaseAgent, StageOutcome, Verdict


class ChaseAgent(BaseAgent):
    """Computes the existential chase prefix and its Datalog closure"""

    def __init__(self):
        super().__init__("chase", "⛓️ ChaseAgent")

    async def process(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Args:
            input_data: rules (regal), config and correlation_id

        Returns:
            Dictionary with outcome and, unless a guard was hit, the prefix
            trace, the saturation trace and the saturated instance
        """
        correlation_id = input_data["correlation_id"]
        config: RunConfig = input_data["config"]
        datalog, existential = split_datalog(input_data["rules"])
        self.log_activity(f"{len(existential)} existential and {len(datalog)} Datalog rules")

        prefix: ChaseTrace = await self.run_blocking(chase, Instance(), existential, config.depth, config.max_atoms)
        if not prefix.completed:
            return self._inconclusive("existential chase", prefix, correlation_id)

        saturation: ChaseTrace = await self.run_blocking(
            datalog_saturate, prefix.final, datalog, None, config.max_atoms
        )
        if not saturation.completed:
            return self._inconclusive("Datalog saturation", saturation, correlation_id)

        data = {
            "depth": prefix.depth,
            "prefix_atoms": len(prefix.final),
            "prefix_nulls": len(prefix.nulls()),
            "saturated_atoms": len(saturation.final),
            "saturation_steps": saturation.saturated_at if saturation.saturated_at is not None else saturation.depth,
        }
        outcome = StageOutcome(
            "chase",
            True,
            f"prefix of depth {prefix.depth} with {len(prefix.final)} atoms, {len(saturation.final)} after saturation",
            data,
        )
        self.publish_event("PrefixReady", data, correlation_id)
        return {
            "outcome": outcome,
            "prefix": prefix,
            "saturation": saturation,
            "saturated": saturation.final,
            "datalog": datalog,
            "existential": existential,
        }

    def _inconclusive(self, what: str, trace: ChaseTrace, correlation_id: str) -> Dict[str, Any]:
        self.log_activity(f"{what} stopped at step {trace.depth} on the atom guard", "warning")
        outcome = StageOutcome(
            "chase",
            False,
            f"{what} exceeded the atom guard at step {trace.depth}",
            {"atoms": len(trace.final), "step": trace.depth},
            verdict=Verdict.INCONCLUSIVE,
            reason="guard",
        )
        self.publish_event("PrefixInconclusive", outcome.to_dict(), correlation_id)
        return {"outcome": outcome}
