"""
ValleyAgent - Valley witnesses and the size-4 analysis
======================================================

Listens for TournamentsFound when a loop-free tournament of the target size
exists. For every edge of the tournament it collects the witnesses of the
injectivized edge rewriting in the existential prefix and drives peak
removal to a valley witness; edges are analysed concurrently. The pairs are
then coloured by their least valley disjunct, a monochromatic
sub-tournament of size 4 is extracted if one exists, and the size-4 analysis
derives a loop from it. Emits ValleyAnalysisCompleted.

Processing Flow:
---------------
1. Rewrite E(x,y) against the regal rule set and injectivize the result
2. Per edge (concurrently): all witnesses plus a peak-removal chain
3. Colour the tournament pairs
4. Extract a monochromatic 4-subtournament
5. Run the size-4 analysis on its colour's valley query
"""

import asyncio
from typing import Any, Dict, List, Tuple

from src.analysis import (
    MONOCHROMATIC_LIMIT,
    Tournament,
    ValleyDerivation,
    Witness,
    color_tournament,
    derive_valley,
    monochromatic_subtournament,
    pair_key,
    ramsey_capacity_note,
    size4_loop_analysis,
    witnesses,
)
from src.config import RunConfig
from src.errors import PreconditionError, SoundnessError
from src.homomorphisms import TargetIndex
from src.model import CQ, UCQ, Atom, Term, term_key
from src.ruleEngine.chase import ChaseTrace
from src.ruleEngine.rewriting import injectivize, ucq_rewrite

from .base_agent import BaseAgent, StageOutcome, Verdict

LOOP_ANALYSIS_SIZE = 4


def edge_query(predicate: str = "E") -> CQ:
    x, y = Term.variable("x"), Term.variable("y")
    return CQ((Atom.of(predicate, x, y),), (x, y))


class ValleyAgent(BaseAgent):
    """Turns a loop-free tournament into valley witnesses and a loop derivation"""

    def __init__(self):
        super().__init__("valley", "⛰️ ValleyAgent")

    async def process(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Args:
            input_data: rules (regal), prefix (ChaseTrace), tournament, config
                and correlation_id

        Returns:
            Dictionary with outcome, derivations, coloring and loop derivation

        Raises:
            SoundnessError: If an edge has no witness in the prefix or peak
                removal or the size-4 analysis fails
        """
        correlation_id = input_data["correlation_id"]
        config: RunConfig = input_data["config"]
        prefix: ChaseTrace = input_data["prefix"]
        tournament: Tournament = input_data["tournament"]

        run = await self.run_blocking(ucq_rewrite, edge_query(config.edge_predicate), input_data["rules"], config.budget())
        if not run.converged:
            self.log_activity(f"edge rewriting did not converge in {run.generation_count} generations", "warning")
            outcome = StageOutcome(
                "valley",
                False,
                f"rewriting of the edge query exceeded its budget after {run.generation_count} generations",
                {"rewriting": run.to_dict()},
                verdict=Verdict.INCONCLUSIVE,
                reason="edge_rewriting",
            )
            self.publish_event("ValleyAnalysisInconclusive", outcome.to_dict(), correlation_id)
            return {"outcome": outcome}
        q_inj = await self.run_blocking(injectivize, run.final)
        self.log_activity(f"edge rewriting: {len(run.final)} disjuncts, {len(q_inj)} after injectivization")

        index = TargetIndex(prefix.final)
        arcs = sorted(tournament.arcs, key=lambda arc: (term_key(arc[0]), term_key(arc[1])))
        results = await asyncio.gather(
            *(self.run_blocking(self._analyse_edge, s, t, q_inj, prefix, index) for s, t in arcs)
        )
        edge_witnesses = {arc: found for arc, (found, _) in zip(arcs, results)}
        derivations = [derivation for _, derivation in results]

        coloring = color_tournament(tournament, edge_witnesses)
        palette = sorted({c.color for c in coloring.values()})
        data: Dict[str, Any] = {
            "disjuncts": len(q_inj),
            "derivations": [d.to_dict() for d in derivations],
            "peak_removals": sum(d.iterations for d in derivations),
            "coloring": [coloring[key].to_dict() for key in sorted(coloring, key=lambda k: (term_key(k[0]), term_key(k[1])))],
            "palette": palette,
            "capacity_note": ramsey_capacity_note(tournament.size, len(palette)),
            "monochromatic": None,
            "loop_analysis": None,
        }

        host = tournament
        if host.size > MONOCHROMATIC_LIMIT:
            host = tournament.restrict(tournament.vertices[:MONOCHROMATIC_LIMIT])
        sub = monochromatic_subtournament(host, {k: c.color for k, c in coloring.items()}, LOOP_ANALYSIS_SIZE)

        loop = None
        if sub is not None:
            edge_color = coloring[pair_key(sub.vertices[0], sub.vertices[1])]
            data["monochromatic"] = {"color": edge_color.color, "query": str(edge_color.disjunct), **sub.to_dict()}
            loop = await self.run_blocking(size4_loop_analysis, edge_color.disjunct, sub.vertices, prefix.final)
            data["loop_analysis"] = loop.to_dict()
            outcome = StageOutcome(
                "valley",
                True,
                f"valley query {edge_color.disjunct} defines a 4-tournament; {loop.case} case yields a loop "
                f"at {loop.loop_term.label}",
                data,
                verdict=Verdict.LOOP_ENTAILED,
            )
        else:
            outcome = StageOutcome(
                "valley",
                True,
                f"{len(derivations)} edges have valley witnesses in {len(palette)} colours; "
                f"no monochromatic {LOOP_ANALYSIS_SIZE}-subtournament",
                data,
                verdict=Verdict.MACHINERY_CONFIRMED,
            )
        self.log_activity(outcome.detail)
        self.publish_event("ValleyAnalysisCompleted", {k: data[k] for k in ("disjuncts", "peak_removals", "palette")},
                           correlation_id)
        return {"outcome": outcome, "derivations": derivations, "coloring": coloring, "loop": loop}

    @staticmethod
    def _analyse_edge(
        s: Term,
        t: Term,
        q_inj: UCQ,
        prefix: ChaseTrace,
        index: TargetIndex,
    ) -> Tuple[List[Witness], ValleyDerivation]:
        found = witnesses(s, t, q_inj, index)
        if not found:
            raise SoundnessError(f"the edge ({s.label},{t.label}) has no witness in the existential prefix")
        try:
            derivation = derive_valley(s, t, q_inj, prefix)
        except PreconditionError as e:
            raise SoundnessError(f"peak removal for ({s.label},{t.label}) failed: {e}") from e
        return found, derivation
