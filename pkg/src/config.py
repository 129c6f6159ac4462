"""
Run configuration and logging setup.

Defaults come from the environment (a .env file is honoured through
python-dotenv) and are overridden by explicit command-line flags.

Environment variables:
    PAWN_DEPTH, PAWN_K_TARGET, PAWN_GENERATIONS, PAWN_MAX_CQS, PAWN_MAX_ATOMS,
    PAWN_SEED, PAWN_EDGE_PREDICATE, PAWN_LOG_LEVEL
"""

import logging
import os
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from google.cloud.logging_v2.handlers import StructuredLogHandler
from pydantic import BaseModel, Field

load_dotenv()

DEFAULT_MAX_ATOMS = 100_000


class EmitFormat(str, Enum):
    TEXT = "text"
    JSON = "json"
    DOT = "dot"


@dataclass(frozen=True)
class RewritingBudget:
    """
    Limits for breadth-first UCQ rewriting.

    Attributes:
        max_generations: Number of expansion rounds after generation 0
        max_cqs: Upper bound on the number of CQs kept
    """
    max_generations: int = 8
    max_cqs: int = 5000

    def __post_init__(self):
        if self.max_generations < 0 or self.max_cqs < 1:
            raise ValueError("rewriting budget must be positive")


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


class RunConfig(BaseModel):
    """Validated settings shared by the CLI and the verification pipeline"""

    rules_path: Optional[str] = None
    facts_path: Optional[str] = None
    query_path: Optional[str] = None
    depth: int = Field(default=4, ge=0)
    k_target: int = Field(default=4, gt=0)
    generations: int = Field(default=8, gt=0)
    max_cqs: int = Field(default=5000, gt=0)
    max_atoms: int = Field(default=DEFAULT_MAX_ATOMS, gt=0)
    obligation_depth: int = Field(default=3, ge=0)
    slack: int = Field(default=3, gt=0)
    samples: int = Field(default=20, ge=0)
    emit: EmitFormat = EmitFormat.TEXT
    seed: int = Field(default=0, ge=0)
    edge_predicate: str = Field(default="E", pattern=r"^[A-Z][A-Za-z0-9_]*$")

    @classmethod
    def from_env(cls, **overrides: Any) -> "RunConfig":
        """
        Build a configuration from PAWN_* environment variables.

        Args:
            **overrides: Explicit values; None entries are ignored

        Returns:
            Validated RunConfig
        """
        values: Dict[str, Any] = {
            "depth": _env_int("PAWN_DEPTH", 4),
            "k_target": _env_int("PAWN_K_TARGET", 4),
            "generations": _env_int("PAWN_GENERATIONS", 8),
            "max_cqs": _env_int("PAWN_MAX_CQS", 5000),
            "max_atoms": _env_int("PAWN_MAX_ATOMS", DEFAULT_MAX_ATOMS),
            "seed": _env_int("PAWN_SEED", 0),
            "edge_predicate": os.getenv("PAWN_EDGE_PREDICATE", "E"),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def budget(self) -> RewritingBudget:
        return RewritingBudget(max_generations=self.generations, max_cqs=self.max_cqs)


def configure_logging(level: Optional[str] = None) -> None:
    """Route all toolkit logging to stderr through the structured handler"""
    level_name = (level or os.getenv("PAWN_LOG_LEVEL", "WARNING")).upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.WARNING),
        handlers=[StructuredLogHandler(stream=sys.stderr)],
        force=True,
    )
