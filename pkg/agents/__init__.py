# Regal Rules Toolkit - verify-pawn pipeline stages
# Each stage is an agent; PawnOrchestrator runs them in order.

from .base_agent import AgentEvent, BaseAgent, StageOutcome, Verdict
from .chase_agent import ChaseAgent
from .regalize_agent import RegalizeAgent
from .report_agent import PawnReport, ReportAgent
from .tournament_agent import TournamentAgent
from .valley_agent import ValleyAgent, edge_query

__version__ = "1.0.0"

__all__ = [
    "AgentEvent",
    "BaseAgent",
    "StageOutcome",
    "Verdict",
    "ChaseAgent",
    "RegalizeAgent",
    "PawnReport",
    "ReportAgent",
    "TournamentAgent",
    "ValleyAgent",
    "edge_query",
]
