"""Agent-based stock market simulator.

Committees of small feed-forward networks predict next-day prices, trade
among themselves to consensus at announced historical prices under a fixed
share supply, and evolve their architectures with a genetic algorithm.
"""

from .config import SimulationConfig, parse_config
from .errors import (
    ConfigError,
    DataError,
    EndOfDataError,
    InsufficientHistoryError,
    SimulationError,
    TradeRejectedError,
)
from .neural import ActivationKind, Agent, AgentSpec, Hyperparams, TrainingWindow
from .players import Player, Side, TradeIntent
from .simulation import RunOutput, run_simulation

__version__ = "0.1.0"

__all__ = [
    "ActivationKind",
    "Agent",
    "AgentSpec",
    "ConfigError",
    "DataError",
    "EndOfDataError",
    "Hyperparams",
    "InsufficientHistoryError",
    "Player",
    "RunOutput",
    "Side",
    "SimulationConfig",
    "SimulationError",
    "TradeIntent",
    "TradeRejectedError",
    "TrainingWindow",
    "parse_config",
    "run_simulation",
    "__version__",
]
