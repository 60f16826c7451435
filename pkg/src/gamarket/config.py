"""Run configuration: a small line-oriented `key = value` format.

Blank lines and `#` comments are ignored.  Unknown keys are rejected so a
typo cannot silently fall back to a default.  A seed is always required;
nothing in a run may depend on wall-clock time.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .data import DEFAULT_STOCKS
from .errors import ConfigError
from .evolution import GAParams
from .neural import Hyperparams


@dataclass
class SimulationConfig:
    seed: int
    input_path: str
    players: int = 4
    agents_per_stock: int = 4
    stocks: tuple[str, ...] = DEFAULT_STOCKS
    total_supply: tuple[int, ...] = (10_000, 10_000, 10_000)
    window: int = 50
    evolution_cadence: int = 50
    days: int = 100
    p_cross: float = 0.6
    p_mut: float = 0.03
    epochs: int = 200
    learning_rate: float = 0.05
    weight_init_scale: float = 0.5
    initial_cash: float = 1_000_000.0
    output_dir: str = "out"

    def hyperparams(self) -> Hyperparams:
        return Hyperparams(
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            weight_init_scale=self.weight_init_scale,
        )

    def ga_params(self) -> GAParams:
        return GAParams(p_cross=self.p_cross, p_mut=self.p_mut)

    def validate(self) -> None:
        if self.players < 2:
            raise ConfigError(f"players must be >= 2, got {self.players}")
        if self.agents_per_stock < 1:
            raise ConfigError(f"agents_per_stock must be >= 1, got {self.agents_per_stock}")
        if len(self.stocks) < 1:
            raise ConfigError("at least one stock is required")
        if len(set(self.stocks)) != len(self.stocks):
            raise ConfigError(f"duplicate stock names: {self.stocks}")
        if len(self.total_supply) != len(self.stocks):
            raise ConfigError(
                f"total_supply has {len(self.total_supply)} entries for {len(self.stocks)} stocks"
            )
        if any(q < 1 for q in self.total_supply):
            raise ConfigError("every total_supply entry must be >= 1")
        if self.window < 2:
            raise ConfigError(f"window must be >= 2, got {self.window}")
        if self.evolution_cadence < 1:
            raise ConfigError(f"evolution_cadence must be >= 1, got {self.evolution_cadence}")
        if self.days < 0:
            raise ConfigError(f"days must be >= 0, got {self.days}")
        if self.initial_cash < 0:
            raise ConfigError(f"initial_cash must be >= 0, got {self.initial_cash}")
        self.hyperparams().validate()
        self.ga_params().validate()


def _parse_int(text: str) -> int:
    return int(text)


def _parse_float(text: str) -> float:
    return float(text)


def _parse_str(text: str) -> str:
    return text


def _parse_names(text: str) -> tuple[str, ...]:
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    if not names:
        raise ValueError("empty list")
    return names


def _parse_ints(text: str) -> tuple[int, ...]:
    values = tuple(int(part.strip()) for part in text.split(",") if part.strip())
    if not values:
        raise ValueError("empty list")
    return values


_PARSERS = {
    "seed": _parse_int,
    "input_path": _parse_str,
    "players": _parse_int,
    "agents_per_stock": _parse_int,
    "stocks": _parse_names,
    "total_supply": _parse_ints,
    "window": _parse_int,
    "evolution_cadence": _parse_int,
    "days": _parse_int,
    "p_cross": _parse_float,
    "p_mut": _parse_float,
    "epochs": _parse_int,
    "learning_rate": _parse_float,
    "weight_init_scale": _parse_float,
    "initial_cash": _parse_float,
    "output_dir": _parse_str,
}

_REQUIRED = ("seed", "input_path")


def parse_config(path, overrides: dict | None = None) -> SimulationConfig:
    """Parse a config file, apply overrides, and validate the result.

    Overrides (typically command-line flags) win over file values.  Every
    parse failure names the file, line and key it came from.
    """
    raw: dict[str, object] = {}
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            raw[key] = _PARSERS[key](value)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value {value!r} for {key!r}") from None
    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in _PARSERS:
                raise ConfigError(f"unknown override key {key!r}")
            raw[key] = value
    for key in _REQUIRED:
        if key not in raw:
            raise ConfigError(f"{path}: required key {key!r} is missing")
    # A single supply figure is shared by every stock.
    stocks = raw.get("stocks", DEFAULT_STOCKS)
    supply = raw.get("total_supply", (10_000,) * len(stocks))
    if len(supply) == 1 and len(stocks) > 1:
        supply = supply * len(stocks)
    raw["stocks"] = tuple(stocks)
    raw["total_supply"] = tuple(supply)
    config = SimulationConfig(**raw)  # type: ignore[arg-type]
    config.validate()
    return config


def resolved_text(config: SimulationConfig) -> str:
    """Render a config as re-parseable `key = value` lines."""
    out = ["# resolved configuration"]
    for f in fields(SimulationConfig):
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            value = ",".join(str(v) for v in value)
        out.append(f"{f.name} = {value}")
    return "\n".join(out) + "\n"
