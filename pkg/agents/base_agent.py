"""
Base Agent - Foundation for the verify-pawn pipeline stages
===========================================================

Every stage of the verification pipeline is an agent. Agents communicate
through events that the orchestrator collects and forwards: each stage
publishes one event when it finishes, and the next stage consumes it.

Event System:
------------
- publish_event(): record an event for the orchestrator and later stages
- consume_event(): record an event received from an earlier stage
- events carry a correlation id, so one pipeline run can be traced end to end

Events per stage:
-----------------
- RegalizeAgent emits RegalSetReady
- ChaseAgent emits PrefixReady
- TournamentAgent emits TournamentsFound
- ValleyAgent emits ValleyAnalysisCompleted
- ReportAgent emits ReportGenerated

Concurrency:
-----------
The reasoning code is synchronous and CPU-bound. Agents hand it to worker
threads with run_blocking(), which keeps process() awaitable and lets the
ValleyAgent analyse several edges at once with asyncio.gather.

Usage:
------
```python
from .base_agent import BaseAgent

class SaturationAgent(BaseAgent):
    def __init__(self):
        super().__init__("saturation", "🔁 SaturationAgent")

    async def process(self, input_data):
        trace = await self.run_blocking(chase, input_data["facts"], input_data["rules"], None)
        self.publish_event("Saturated", {"depth": trace.depth}, input_data["correlation_id"])
        return trace
```
"""

import asyncio
import json
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, TypeVar

from dotenv import load_dotenv

UTC = timezone.utc

load_dotenv()

T = TypeVar("T")


@dataclass
class AgentEvent:
    """
    What a stage tells later stages when it finishes.

    Attributes:
        event_type: Type of event (e.g., "RegalSetReady", "PrefixReady")
        agent_id: ID of the agent that published the event
        timestamp: UTC timestamp when event was created
        data: Event-specific data payload
        correlation_id: Pipeline run correlation ID for tracing
    """
    event_type: str
    agent_id: str
    timestamp: datetime
    data: Dict[str, Any]
    correlation_id: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "event_type": self.event_type,
            "agent_id": self.agent_id,
            "timestamp": self.timestamp.isoformat(),
            "data": self.data,
            "correlation_id": self.correlation_id,
        }


class Verdict(str, Enum):
    """Final answer of a verify-pawn run"""
    LOOP_ENTAILED = "LoopEntailed"
    NO_LARGE_TOURNAMENT = "NoLargeTournamentAtDepth"
    MACHINERY_CONFIRMED = "TheoremMachineryConfirmed"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class StageOutcome:
    """
    What one pipeline stage confirmed.

    Attributes:
        stage: Stage name (regalize, chase, tournament, valley)
        confirmed: Whether the stage reached its goal
        detail: Human-readable summary
        data: Deterministic, JSON-ready stage data
        verdict: Set when the stage decides the run
        reason: Why the run is inconclusive, if it is
    """
    stage: str
    confirmed: bool
    detail: str
    data: Dict[str, Any] = field(default_factory=dict)
    verdict: Optional[Verdict] = None
    reason: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "stage": self.stage,
            "confirmed": self.confirmed,
            "detail": self.detail,
            "data": self.data,
        }


class BaseAgent(ABC):
    """
    Base class for all pipeline stages.

    Subclasses implement process(); this class records published and
    consumed events, logs with the stage name and runs reasoning code in
    worker threads.
    """

    def __init__(self, agent_id: str, agent_name: str):
        """
        Initialize the base agent.

        Args:
            agent_id: Unique identifier for this agent
            agent_name: Human-readable name for this agent
        """
        self.agent_id = agent_id
        self.agent_name = agent_name
        self.logger = self._setup_logging()
        self.events_published: List[AgentEvent] = []
        self.events_consumed: List[AgentEvent] = []

    def _setup_logging(self) -> logging.Logger:
        """
        Logger for the agent.

        Handlers are installed process-wide by configure_logging; agents only
        pick their own name under the "pawn" hierarchy.
        """
        return logging.getLogger(f"pawn.{self.agent_id}")

    @abstractmethod
    async def process(self, input_data: Any) -> Any:
        """
        Run the stage.

        Args:
            input_data: Stage input, a dictionary carrying at least correlation_id

        Returns:
            Stage output, consumed by the next stage
        """
        pass

    async def run_blocking(self, fn: Callable[..., T], *args: Any, **kwargs: Any) -> T:
        """Run a synchronous function in a worker thread and await its result"""
        return await asyncio.to_thread(fn, *args, **kwargs)

    def publish_event(self, event_type: str, data: Dict[str, Any], correlation_id: str) -> AgentEvent:
        """
        Record an event for the orchestrator to forward to later stages.

        Args:
            event_type: Type of event being published
            data: Event-specific data payload
            correlation_id: Pipeline run correlation ID

        Returns:
            Created AgentEvent instance
        """
        event = AgentEvent(
            event_type=event_type,
            agent_id=self.agent_id,
            timestamp=datetime.now(UTC),
            data=data,
            correlation_id=correlation_id,
        )
        self.events_published.append(event)
        self.logger.info(f"📤 Published event: {event_type} with correlation_id: {correlation_id}")
        return event

    def consume_event(self, event: AgentEvent) -> None:
        """
        Record an event published by an earlier stage.

        Args:
            event: The event to consume
        """
        self.events_consumed.append(event)
        self.logger.info(f"📥 Consumed event: {event.event_type} from {event.agent_id}")

    def log_activity(self, message: str, level: str = "info") -> None:
        """
        Log agent activity as a JSON document with agent context.

        Args:
            message: Activity message to log
            level: Log level (info, warning, error, debug)
        """
        log_data = {
            "agent_id": self.agent_id,
            "agent_name": self.agent_name,
            "message": message,
            "timestamp": datetime.now(UTC).isoformat(),
        }

        if level == "info":
            self.logger.info(json.dumps(log_data))
        elif level == "warning":
            self.logger.warning(json.dumps(log_data))
        elif level == "error":
            self.logger.error(json.dumps(log_data))
        elif level == "debug":
            self.logger.debug(json.dumps(log_data))
