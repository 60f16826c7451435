"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SimulationError):
    """Invalid or inconsistent configuration."""


class DataError(SimulationError):
    """Price data is missing, malformed, or fails a sanity check."""


class InsufficientHistoryError(DataError):
    """A price series is too short for the requested training window."""


class TradeRejectedError(SimulationError):
    """A trade failed its settlement preconditions; no state was changed."""


class EndOfDataError(SimulationError):
    """The price series has no row for the requested day."""
