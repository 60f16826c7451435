"""Runtime scaling benchmark over player and committee counts.

Each grid point runs the full simulation on shared synthetic data, with
one discarded warm-up run, and reports the median wall-clock time over
the requested repetitions.  Two sweeps are produced: player count with
the committee size held at a base value, and committee size with the
player count held at a base value; each sweep gets a least-squares line.
"""

from __future__ import annotations

import os
import tempfile
import time
from dataclasses import dataclass, field

from .config import SimulationConfig
from .data import DEFAULT_STOCKS, generate_series, write_prices_csv
from .errors import ConfigError
from .metrics import LinearFit, linear_fit
from .simulation import run_simulation

PLAYER_SWEEP = "players"
AGENT_SWEEP = "agents"


@dataclass(frozen=True)
class BenchmarkSample:
    sweep: str
    x: int
    seconds: float


@dataclass(frozen=True)
class SweepFit:
    sweep: str
    fit: LinearFit | None
    samples: int


@dataclass
class BenchmarkResult:
    samples: list[BenchmarkSample] = field(default_factory=list)
    fits: list[SweepFit] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def _median(values: list[float]) -> float:
    ordered = sorted(values)
    mid = len(ordered) // 2
    if len(ordered) % 2:
        return ordered[mid]
    return 0.5 * (ordered[mid - 1] + ordered[mid])


def scaling_benchmark(
    player_grid: list[int],
    agent_grid: list[int],
    base_players: int = 4,
    base_agents: int = 4,
    days: int = 120,
    window: int = 50,
    seed: int = 1,
    reps: int = 1,
) -> BenchmarkResult:
    """Time full runs across both sweeps on one synthetic data set."""
    if reps < 1:
        raise ConfigError(f"reps must be >= 1, got {reps}")
    if days < 1:
        raise ConfigError(f"days must be >= 1, got {days}")
    result = BenchmarkResult()
    rows = window + days + 2
    series = generate_series(rows, seed)
    with tempfile.TemporaryDirectory(prefix="gamarket-bench-") as tmp:
        csv_path = os.path.join(tmp, "prices.csv")
        write_prices_csv(csv_path, series)

        def timed_run(n_players: int, n_agents: int) -> float:
            config = SimulationConfig(
                seed=seed,
                input_path=csv_path,
                players=n_players,
                agents_per_stock=n_agents,
                stocks=DEFAULT_STOCKS,
                total_supply=(10_000,) * len(DEFAULT_STOCKS),
                window=window,
                days=days,
            )
            run_simulation(config)  # warm-up, discarded
            laps = []
            for _ in range(reps):
                started = time.perf_counter()
                run_simulation(config)
                laps.append(time.perf_counter() - started)
            return _median(laps)

        for sweep, grid in ((PLAYER_SWEEP, player_grid), (AGENT_SWEEP, agent_grid)):
            xs = []
            ys = []
            for x in grid:
                n_players = x if sweep == PLAYER_SWEEP else base_players
                n_agents = base_agents if sweep == PLAYER_SWEEP else x
                if n_players < 2 or n_agents < 1:
                    result.warnings.append(f"skipped infeasible point {sweep}={x}")
                    continue
                seconds = timed_run(n_players, n_agents)
                result.samples.append(BenchmarkSample(sweep=sweep, x=x, seconds=seconds))
                xs.append(x)
                ys.append(seconds)
            result.fits.append(SweepFit(sweep=sweep, fit=linear_fit(xs, ys), samples=len(xs)))
    return result
