"""Analysis outputs: species complexity, committee sizes, net-worth tracking.

"Species" here means the output activation of an agent.  Complexity is
reported per species as the population standard deviation of hidden-unit
counts; the components are never summed into a single scalar because the
per-species spread is the quantity of interest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .neural import ActivationKind, Agent
from .players import Player, net_worth


def species_partition(agents) -> dict[ActivationKind, list[Agent]]:
    """Group agents by activation kind; only nonempty species appear."""
    partition: dict[ActivationKind, list[Agent]] = {}
    for agent in agents:
        partition.setdefault(agent.spec.activation, []).append(agent)
    return partition


def complexity(agents) -> dict[ActivationKind, float]:
    """Per-species population standard deviation of hidden-unit counts.

    Uses the population estimator (divide by the species count).  Empty
    species are absent from the result, not reported as zero.
    """
    partition = species_partition(agents)
    if not partition:
        raise ValueError("complexity needs at least one agent")
    return {
        kind: float(np.std([a.spec.hidden_units for a in group]))
        for kind, group in partition.items()
    }


def mean_hidden_units(player: Player) -> float:
    """Average hidden-unit count over every agent the player owns."""
    counts = [agent.spec.hidden_units for agent in player.iter_agents()]
    if not counts:
        raise ValueError(f"player {player.id} has no agents")
    return float(np.mean(counts))


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float


def linear_fit(xs, ys) -> LinearFit | None:
    """Ordinary least squares through (xs, ys); None when underdetermined."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) != len(ys):
        raise ValueError("xs and ys must have equal length")
    if len(xs) < 2:
        return None
    x_mean = xs.mean()
    y_mean = ys.mean()
    var_x = float(np.sum((xs - x_mean) ** 2))
    if var_x == 0.0:
        return None
    slope = float(np.sum((xs - x_mean) * (ys - y_mean)) / var_x)
    intercept = float(y_mean - slope * x_mean)
    ss_res = float(np.sum((ys - (slope * xs + intercept)) ** 2))
    ss_tot = float(np.sum((ys - y_mean) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return LinearFit(slope=slope, intercept=intercept, r_squared=r_squared)


@dataclass
class RunMetrics:
    """Row-oriented records accumulated over one simulation run."""

    networth_rows: list[tuple[int, int, float]] = field(default_factory=list)
    hidden_rows: list[tuple[int, int, float]] = field(default_factory=list)
    complexity_rows: list[tuple[int, str, float]] = field(default_factory=list)
    # (generation, mean validation MSE over every agent in the population)
    generation_error_rows: list[tuple[int, float]] = field(default_factory=list)


def record_networth(metrics: RunMetrics, players: list[Player], prices, day: int) -> None:
    """Append one (day, player, net worth) row per player."""
    for player in players:
        metrics.networth_rows.append((day, player.id, net_worth(player, prices)))


def record_generation(metrics: RunMetrics, generation: int, players: list[Player]) -> None:
    """Snapshot architecture statistics for the whole population."""
    for player in players:
        metrics.hidden_rows.append((generation, player.id, mean_hidden_units(player)))
    everyone = [agent for player in players for agent in player.iter_agents()]
    for kind, sigma in complexity(everyone).items():
        metrics.complexity_rows.append((generation, kind.value, sigma))
