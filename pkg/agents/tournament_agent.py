"""
TournamentAgent - Loop and tournament search
============================================

Listens for PrefixReady. Looks for an edge loop and for a tournament of the
target size in the saturated prefix, both searches running concurrently, and
emits TournamentsFound.

A loop decides the run (LoopEntailed); so does the absence of a large
enough tournament (NoLargeTournamentAtDepth).
"""

import asyncio
from typing import Any, Dict

from src.analysis import has_loop, max_tournament
from src.config import RunConfig

from .base_agent import BaseAgent, StageOutcome, Verdict


class TournamentAgent(BaseAgent):
    """Searches the saturated prefix for loops and tournaments"""

    def __init__(self):
        super().__init__("tournament", "🏆 TournamentAgent")

    async def process(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Args:
            input_data: saturated instance, config and correlation_id

        Returns:
            Dictionary with outcome, loop_term and tournament
        """
        correlation_id = input_data["correlation_id"]
        config: RunConfig = input_data["config"]
        saturated = input_data["saturated"]
        predicate = config.edge_predicate

        loop_term, tournament = await asyncio.gather(
            self.run_blocking(has_loop, saturated, predicate),
            self.run_blocking(max_tournament, saturated, config.k_target, predicate),
        )
        data = {
            "predicate": predicate,
            "loop": loop_term.label if loop_term is not None else None,
            "tournament": tournament.to_dict(),
            "k_target": config.k_target,
        }

        if loop_term is not None:
            outcome = StageOutcome(
                "tournament",
                True,
                f"{predicate}({loop_term.label},{loop_term.label}) holds in the saturated prefix",
                data,
                verdict=Verdict.LOOP_ENTAILED,
            )
        elif tournament.size < config.k_target:
            outcome = StageOutcome(
                "tournament",
                True,
                f"largest {predicate}-tournament has size {tournament.size} < {config.k_target}",
                data,
                verdict=Verdict.NO_LARGE_TOURNAMENT,
            )
        else:
            outcome = StageOutcome(
                "tournament",
                True,
                f"{predicate}-tournament of size {tournament.size} without a loop",
                data,
            )
        self.log_activity(outcome.detail)
        self.publish_event("TournamentsFound", data, correlation_id)
        return {"outcome": outcome, "loop_term": loop_term, "tournament": tournament}
