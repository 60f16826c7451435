"""End-to-end simulation loop: train, predict, clear, record, evolve.

Trading starts once a full training window of history exists, so the
first traded day has index `window` in the price file.  Architectures
evolve every `evolution_cadence` trading days, after which every agent is
retrained on the window ending that day.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import SimulationConfig
from .data import NormalizationParams, PriceSeries, build_window, load_prices, normalize
from .errors import InsufficientHistoryError
from .evolution import evolve_generation
from .market import Market, Trade, advance_day, announce_price, run_clearing, split_endowment
from .metrics import RunMetrics, record_generation, record_networth
from .neural import Agent, TrainingWindow, evaluate_error, init_random, train
from .players import Player, committee_predict
from .rng import RandomStreams, make_streams


@dataclass
class RunOutput:
    config: SimulationConfig
    metrics: RunMetrics
    trades: list[Trade] = field(default_factory=list)
    players: list[Player] = field(default_factory=list)
    generations: int = 0


def _build_players(config: SimulationConfig, streams: RandomStreams) -> list[Player]:
    """Equal cash for everyone; share remainders go to the lowest ids."""
    per_stock = [split_endowment(q, config.players) for q in config.total_supply]
    players = []
    for pid in range(config.players):
        committees = [
            [
                init_random((1, 10), streams.init, config.weight_init_scale)
                for _ in range(config.agents_per_stock)
            ]
            for _ in config.stocks
        ]
        players.append(
            Player(
                id=pid,
                committees=committees,
                cash=float(config.initial_cash),
                holdings=[per_stock[m][pid] for m in range(len(config.stocks))],
            )
        )
    return players


def _train_population(
    players: list[Player],
    windows: list[TrainingWindow],
    config: SimulationConfig,
    jobs: int,
) -> None:
    """Retrain every agent on its stock's window, in place.

    Tasks are laid out player-major then stock-major, and results are
    merged back by index, so the outcome is identical for any job count.
    """
    hp = config.hyperparams()
    tasks: list[tuple[Agent, TrainingWindow]] = []
    slots: list[tuple[int, int, int]] = []
    for p, player in enumerate(players):
        for m, group in enumerate(player.committees):
            for j, agent in enumerate(group):
                tasks.append((agent, windows[m]))
                slots.append((p, m, j))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            trained = list(pool.map(lambda task: train(task[0], task[1], hp), tasks))
    else:
        trained = [train(agent, window, hp) for agent, window in tasks]
    for (p, m, j), agent in zip(slots, trained):
        players[p].committees[m][j] = agent


def _build_windows(
    series: list[PriceSeries], t: int, window: int
) -> tuple[list[TrainingWindow], list[NormalizationParams]]:
    windows = []
    params = []
    for s in series:
        w, p = build_window(s, t, window)
        windows.append(w)
        params.append(p)
    return windows, params


def _population_errors(players: list[Player], windows: list[TrainingWindow]) -> list[list[float]]:
    """Validation MSE per agent, committee order, one list per player."""
    return [
        [
            evaluate_error(agent, windows[m])
            for m, group in enumerate(player.committees)
            for agent in group
        ]
        for player in players
    ]


def run_simulation(config: SimulationConfig, jobs: int = 1) -> RunOutput:
    """Run the whole market simulation described by `config`.

    `jobs` only controls how many threads retrain agents; results are
    byte-identical for any value because training tasks are independent
    and merged in a fixed order.
    """
    config.validate()
    series = load_prices(config.input_path, config.stocks, config.window)
    needed = config.window + max(config.days, 1)
    if len(series[0]) < needed:
        raise InsufficientHistoryError(
            f"{config.input_path}: {len(series[0])} rows cannot cover window "
            f"{config.window} plus {config.days} trading days (need >= {needed})"
        )
    streams = make_streams(config.seed)
    market = Market.from_series(series, list(config.total_supply), t=config.window)
    players = _build_players(config, streams)
    metrics = RunMetrics()
    output = RunOutput(config=config, metrics=metrics, players=players)

    windows, norm_params = _build_windows(series, market.t, config.window)
    _train_population(players, windows, config, jobs)
    record_generation(metrics, 0, players)

    for day in range(1, config.days + 1):
        prices = announce_price(market)
        scaled = [normalize(float(prices[m]), norm_params[m]) for m in range(len(series))]
        predictions = [committee_predict(player, scaled, norm_params) for player in players]
        report = run_clearing(market, players, predictions, streams.shuffle)
        output.trades.extend(report.trades)
        record_networth(metrics, players, prices, market.t)

        if day % config.evolution_cadence == 0 and day < config.days:
            windows, norm_params = _build_windows(series, market.t, config.window)
            errors = _population_errors(players, windows)
            flat = [e for per_player in errors for e in per_player]
            metrics.generation_error_rows.append((output.generations, float(np.mean(flat))))
            for pid in range(len(players)):
                players[pid] = evolve_generation(
                    players[pid],
                    errors[pid],
                    config.ga_params(),
                    streams,
                    config.weight_init_scale,
                )
            output.generations += 1
            _train_population(players, windows, config, jobs)
            record_generation(metrics, output.generations, players)
        advance_day(market)

    if config.days >= 1:
        # Score the final population on the last completed day's window.
        windows, _ = _build_windows(series, market.t - 1, config.window)
        errors = _population_errors(players, windows)
        flat = [e for per_player in errors for e in per_player]
        metrics.generation_error_rows.append((output.generations, float(np.mean(flat))))
    output.players = players
    return output
