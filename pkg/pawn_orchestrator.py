"""
Regal Rules Toolkit - verify-pawn Orchestrator

Coordinates the pipeline that checks, on a concrete input, the chain of
arguments showing that a bdd rule set entailing arbitrarily large
tournaments also entails a loop:

- RegalizeAgent: rule-set surgery into a regal rule set
- ChaseAgent: existential chase of {true} and Datalog saturation
- TournamentAgent: loop and tournament search
- ValleyAgent: valley witnesses, colouring and the size-4 analysis
- ReportAgent: verdict and report

Each stage publishes one event; the orchestrator records it and forwards it
to the next stage. A stage whose outcome carries a verdict ends the run.
"""

import asyncio
import hashlib
import json
import logging
from typing import Any, Dict, List, Optional

from agents.base_agent import AgentEvent, BaseAgent, StageOutcome, Verdict
from agents.chase_agent import ChaseAgent
from agents.regalize_agent import RegalizeAgent
from agents.report_agent import PawnReport, ReportAgent
from agents.tournament_agent import TournamentAgent
from agents.valley_agent import ValleyAgent
from src.config import RewritingBudget, RunConfig
from src.errors import PawnError
from src.model import Instance, RuleSet
from src.scanners import format_facts, format_rules

__all__ = ["PawnOrchestrator", "PawnReport", "Verdict", "correlation_id_for", "verify_pawn"]

_CONFIG_IDENTITY_EXCLUDE = {"rules_path", "facts_path", "query_path", "emit"}


def correlation_id_for(instance: Instance, rules: RuleSet, config: RunConfig) -> str:
    """SHA-256 of the facts, the rules and the run settings"""
    payload = json.dumps(
        {
            "facts": format_facts(instance),
            "rules": format_rules(rules, with_ids=True),
            "config": config.model_dump(mode="json", exclude=_CONFIG_IDENTITY_EXCLUDE),
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class PawnOrchestrator:
    """Runs the verify-pawn stages in order and keeps their event history"""

    def __init__(self):
        self.agents: Dict[str, BaseAgent] = {}
        self.event_history: List[AgentEvent] = []
        self.logger = logging.getLogger("pawn.orchestrator")
        self._initialize_agents()

    def _initialize_agents(self):
        """Initialize all pipeline stages"""
        self.logger.info("🤖 Initializing verify-pawn agents...")

        self.agents["regalize"] = RegalizeAgent()
        self.agents["chase"] = ChaseAgent()
        self.agents["tournament"] = TournamentAgent()
        self.agents["valley"] = ValleyAgent()
        self.agents["report"] = ReportAgent()

        self.logger.info(f"✅ Initialized {len(self.agents)} agents")
        for agent_id, agent in self.agents.items():
            self.logger.debug(f"  - {agent.agent_name} ({agent_id})")

    async def run_verification(
        self,
        instance: Instance,
        rules: RuleSet,
        config: RunConfig,
        verify_obligations: bool = False,
    ) -> PawnReport:
        """
        Run the complete pipeline.

        Args:
            instance: Input instance I
            rules: Input rule set R
            config: Depth, tournament target, budgets and guards
            verify_obligations: Also run the surgery obligations

        Returns:
            The PawnReport

        Raises:
            SoundnessError: If an internal proof obligation fails
            PawnError: On other stage errors
        """
        correlation_id = correlation_id_for(instance, rules, config)
        self.logger.info(f"🚀 Starting verify-pawn (ID: {correlation_id[:12]})")
        self.logger.info(f"📐 depth {config.depth}, tournament target {config.k_target}")
        outcomes: List[StageOutcome] = []

        try:
            # Step 1: Regalization - emits RegalSetReady
            self.logger.info("🩺 Step 1: Running RegalizeAgent...")
            regal = await self._run_stage("regalize", {
                "instance": instance,
                "rules": rules,
                "config": config,
                "verify_obligations": verify_obligations,
            }, correlation_id, outcomes)

            # Step 2: Prefix - listens for RegalSetReady, emits PrefixReady
            if regal["outcome"].verdict is None:
                self.logger.info("⛓️ Step 2: Running ChaseAgent...")
                prefix = await self._run_stage("chase", {
                    "rules": regal["rules"],
                    "config": config,
                }, correlation_id, outcomes)

                # Step 3: Tournaments - listens for PrefixReady, emits TournamentsFound
                if prefix["outcome"].verdict is None:
                    self.logger.info("🏆 Step 3: Running TournamentAgent...")
                    found = await self._run_stage("tournament", {
                        "saturated": prefix["saturated"],
                        "config": config,
                    }, correlation_id, outcomes)

                    # Step 4: Valleys - listens for TournamentsFound, emits ValleyAnalysisCompleted
                    if found["outcome"].verdict is None:
                        self.logger.info("⛰️ Step 4: Running ValleyAgent...")
                        await self._run_stage("valley", {
                            "rules": regal["rules"],
                            "prefix": prefix["prefix"],
                            "tournament": found["tournament"],
                            "config": config,
                        }, correlation_id, outcomes)

            # Step 5: Report - listens for the deciding event, emits ReportGenerated
            self.logger.info("📋 Step 5: Running ReportAgent...")
            report: PawnReport = await self.agents["report"].process({
                "outcomes": outcomes,
                "correlation_id": correlation_id,
            })
            self._capture_agent_events(self.agents["report"], correlation_id)
        except PawnError as e:
            self.logger.error(f"❌ verify-pawn failed: {e}")
            raise

        self.logger.info(f"✅ verify-pawn completed: {report.verdict.value}")
        return report

    async def _run_stage(
        self,
        agent_id: str,
        input_data: Dict[str, Any],
        correlation_id: str,
        outcomes: List[StageOutcome],
    ) -> Dict[str, Any]:
        agent = self.agents[agent_id]
        result = await agent.process({**input_data, "correlation_id": correlation_id})
        outcomes.append(result["outcome"])
        self._capture_agent_events(agent, correlation_id)
        return result

    def _capture_agent_events(self, agent: BaseAgent, correlation_id: str):
        """Record an agent's new events and forward them to every later stage"""
        seen = {id(e) for e in self.event_history}
        fresh = [e for e in agent.events_published if e.correlation_id == correlation_id and id(e) not in seen]
        self.event_history.extend(fresh)
        ids = list(self.agents)
        for later in ids[ids.index(agent.agent_id) + 1:]:
            for event in fresh:
                self.agents[later].consume_event(event)

    def get_event_history(self, correlation_id: Optional[str] = None) -> List[Dict[str, Any]]:
        """Get event history, optionally filtered by correlation ID"""
        events = self.event_history
        if correlation_id:
            events = [e for e in events if e.correlation_id == correlation_id]
        return [e.to_dict() for e in events]

    def event_summary(self, correlation_id: str) -> Dict[str, Any]:
        """Counts of events per type and per agent for one run"""
        event_types: Dict[str, int] = {}
        agent_activity: Dict[str, int] = {}
        events = [e for e in self.event_history if e.correlation_id == correlation_id]
        for event in events:
            event_types[event.event_type] = event_types.get(event.event_type, 0) + 1
            agent_activity[event.agent_id] = agent_activity.get(event.agent_id, 0) + 1
        return {"total_events": len(events), "event_types": event_types, "agent_activity": agent_activity}


def verify_pawn(
    instance: Instance,
    rules: RuleSet,
    depth: int = 4,
    k_target: int = 4,
    budget: Optional[RewritingBudget] = None,
    *,
    config: Optional[RunConfig] = None,
    verify_obligations: bool = False,
    **settings: Any,
) -> PawnReport:
    """
    Run verify-pawn synchronously.

    Args:
        instance: Input instance I
        rules: Input rule set R
        depth: Depth of the existential chase prefix
        k_target: Tournament size to look for
        budget: Rewriting budget (default: 8 generations)
        config: Full configuration; overrides depth, k_target and budget
        verify_obligations: Also run the surgery obligations
        **settings: Further RunConfig fields, e.g. samples, seed, max_atoms

    Returns:
        The PawnReport
    """
    if config is None:
        budget = budget or RewritingBudget()
        config = RunConfig(
            depth=depth,
            k_target=k_target,
            generations=budget.max_generations,
            max_cqs=budget.max_cqs,
            **settings,
        )
    return asyncio.run(PawnOrchestrator().run_verification(instance, rules, config, verify_obligations))
