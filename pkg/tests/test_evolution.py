"""Tests for the genetic operators and generation turnover."""

import numpy as np
import pytest

from gamarket.errors import ConfigError
from gamarket.evolution import (
    CHROMOSOME_BITS,
    GRAY_BITS,
    Chromosome,
    FitnessRecord,
    GAParams,
    crossover_one_point,
    evolve_generation,
    gray_bits,
    gray_decode,
    gray_encode,
    gray_value,
    mutate_bit,
    roulette_select,
)
from gamarket.neural import HIDDEN_MAX, HIDDEN_MIN, ActivationKind, AgentSpec, new_agent
from gamarket.players import Player
from gamarket.rng import make_streams


def test_gray_round_trip_all_byte_values():
    for value in range(256):
        assert gray_value(gray_bits(value)) == value


def test_gray_adjacent_values_differ_in_one_bit():
    # The defining property of the reflected code.
    for value in range(255):
        a = gray_bits(value)
        b = gray_bits(value + 1)
        assert sum(x != y for x, y in zip(a, b)) == 1


def test_gray_frozen_examples():
    # 5 -> binary 00000101 -> gray 00000111.
    assert gray_bits(5) == (0, 0, 0, 0, 0, 1, 1, 1)
    # 10 -> binary 00001010 -> gray 00001111.
    assert gray_encode(10) == (0, 0, 0, 0, 1, 1, 1, 1)
    assert gray_value((0, 0, 0, 0, 0, 1, 1, 1)) == 5
    # All-ones decodes to 170 and clamps to the architecture ceiling.
    assert gray_value((1,) * 8) == 170
    assert gray_decode((1,) * 8) == HIDDEN_MAX
    # All-zeros decodes to 0 and clamps to the floor.
    assert gray_decode((0,) * 8) == HIDDEN_MIN


def test_gray_range_checks():
    with pytest.raises(ValueError):
        gray_bits(256)
    with pytest.raises(ValueError):
        gray_bits(-1)
    with pytest.raises(ValueError):
        gray_encode(HIDDEN_MAX + 1)
    with pytest.raises(ValueError):
        gray_encode(0)
    with pytest.raises(ValueError):
        gray_decode((0,) * 7)
    with pytest.raises(ValueError):
        gray_value((0, 2, 0))


def test_chromosome_spec_round_trip():
    for h in range(HIDDEN_MIN, HIDDEN_MAX + 1):
        for kind in ActivationKind:
            spec = AgentSpec(hidden_units=h, activation=kind)
            assert Chromosome.from_spec(spec).to_spec() == spec


def test_chromosome_validation():
    with pytest.raises(ValueError):
        Chromosome(bits=(0,) * (CHROMOSOME_BITS - 1))
    with pytest.raises(ValueError):
        Chromosome(bits=(0,) * (CHROMOSOME_BITS - 1) + (2,))


def test_crossover_frozen_example():
    a = Chromosome(bits=(0,) * 9)
    b = Chromosome(bits=(1,) * 9)
    child_a, child_b = crossover_one_point(a, b, cut=4)
    assert child_a.bits == (0, 0, 0, 0, 1, 1, 1, 1, 1)
    assert child_b.bits == (1, 1, 1, 1, 0, 0, 0, 0, 0)


def test_crossover_preserves_bit_multiset_at_every_cut():
    rng = np.random.default_rng(41)
    for _ in range(1000):
        a = Chromosome(bits=tuple(int(x) for x in rng.integers(0, 2, CHROMOSOME_BITS)))
        b = Chromosome(bits=tuple(int(x) for x in rng.integers(0, 2, CHROMOSOME_BITS)))
        for cut in range(1, CHROMOSOME_BITS):
            ca, cb = crossover_one_point(a, b, cut)
            # Position-wise, each child's bit comes from one of the parents,
            # and together they keep exactly the parents' bits per position.
            for i in range(CHROMOSOME_BITS):
                assert sorted((ca.bits[i], cb.bits[i])) == sorted((a.bits[i], b.bits[i]))
    with pytest.raises(ValueError):
        crossover_one_point(a, b, cut=0)
    with pytest.raises(ValueError):
        crossover_one_point(a, b, cut=CHROMOSOME_BITS)


def test_mutation_probability_extremes():
    rng = np.random.default_rng(43)
    base = Chromosome(bits=(0, 1, 0, 1, 0, 1, 0, 1, 0))
    # p_mut = 0 never mutates.
    for _ in range(100):
        assert mutate_bit(base, 0.0, rng) is base
    # p_mut = 1 always flips exactly one bit.
    for _ in range(500):
        mutant = mutate_bit(base, 1.0, rng)
        assert sum(x != y for x, y in zip(base.bits, mutant.bits)) == 1
    with pytest.raises(ValueError):
        mutate_bit(base, 1.5, rng)


def test_mutation_hits_every_position():
    rng = np.random.default_rng(44)
    base = Chromosome(bits=(0,) * CHROMOSOME_BITS)
    seen = set()
    for _ in range(2000):
        mutant = mutate_bit(base, 1.0, rng)
        seen.add(mutant.bits.index(1))
    assert seen == set(range(CHROMOSOME_BITS))


def test_fitness_is_inverse_error():
    rec = FitnessRecord.from_error(3, 0.25)
    assert rec.agent_index == 3
    assert rec.fitness == pytest.approx(1.0 / (1e-6 + 0.25))
    # Zero error stays finite thanks to the epsilon.
    assert FitnessRecord.from_error(0, 0.0).fitness == pytest.approx(1e6)
    with pytest.raises(ValueError):
        FitnessRecord.from_error(0, -0.1)


def test_roulette_matches_fitness_proportions():
    rng = np.random.default_rng(47)
    records = [
        FitnessRecord(agent_index=0, error=0.0, fitness=1.0),
        FitnessRecord(agent_index=1, error=0.0, fitness=2.0),
        FitnessRecord(agent_index=2, error=0.0, fitness=5.0),
    ]
    draws = 200_000
    counts = np.zeros(3)
    for _ in range(draws):
        counts[roulette_select(records, rng)] += 1
    freqs = counts / draws
    np.testing.assert_allclose(freqs, [1 / 8, 2 / 8, 5 / 8], atol=0.005)


def test_roulette_validation():
    rng = np.random.default_rng(1)
    with pytest.raises(ValueError):
        roulette_select([], rng)
    with pytest.raises(ValueError):
        roulette_select([FitnessRecord(agent_index=0, error=0.0, fitness=0.0)], rng)
    with pytest.raises(ValueError):
        roulette_select([FitnessRecord(agent_index=0, error=0.0, fitness=float("inf"))], rng)


def test_ga_params_validation():
    GAParams().validate()
    with pytest.raises(ConfigError):
        GAParams(p_cross=1.2, p_mut=0.03).validate()
    with pytest.raises(ConfigError):
        GAParams(p_cross=0.6, p_mut=-0.1).validate()
    # Mutation must stay rarer than crossover.
    with pytest.raises(ConfigError):
        GAParams(p_cross=0.1, p_mut=0.5).validate()


def _mixed_player(seed=0, stocks=2, per_stock=4):
    rng = np.random.default_rng(seed)
    committees = []
    for _ in range(stocks):
        group = []
        for _ in range(per_stock):
            h = int(rng.integers(HIDDEN_MIN, HIDDEN_MAX + 1))
            kind = ActivationKind.LINEAR if rng.integers(2) == 0 else ActivationKind.LOGISTIC
            group.append(new_agent(AgentSpec(h, kind), rng))
        committees.append(group)
    return Player(id=0, committees=committees, cash=5_000.0, holdings=[10] * stocks)


def test_evolve_generation_shape_and_legality():
    player = _mixed_player()
    errors = list(np.random.default_rng(7).uniform(0.01, 0.2, player.agent_count()))
    child = evolve_generation(player, errors, GAParams(), make_streams(99))
    assert child.id == player.id
    assert [len(g) for g in child.committees] == [len(g) for g in player.committees]
    for agent in child.iter_agents():
        assert HIDDEN_MIN <= agent.spec.hidden_units <= HIDDEN_MAX
        assert len(agent.weights) == agent.spec.weight_count()
    # Portfolio rides along untouched, as an independent copy.
    assert child.cash == player.cash
    assert child.holdings == player.holdings
    assert child.holdings is not player.holdings


def test_evolve_generation_keeps_parent_weights_when_spec_survives():
    # With mutation off and crossover vanishingly rare, children are parent copies.
    player = _mixed_player(seed=3)
    n = player.agent_count()
    errors = [0.1] * n
    params = GAParams(p_cross=1e-12, p_mut=0.0)
    child = evolve_generation(player, errors, params, make_streams(5))
    parents = list(player.iter_agents())
    by_key = {(a.spec, a.weights.tobytes()) for a in parents}
    for agent in child.iter_agents():
        assert (agent.spec, agent.weights.tobytes()) in by_key
        # Copies, not aliases: mutating a child cannot corrupt the parent.
        assert all(agent.weights is not p.weights for p in parents)


def test_evolve_generation_concentrates_on_fit_parent():
    # One agent vastly fitter than the rest should dominate the mating pool.
    player = _mixed_player(seed=8, stocks=1, per_stock=8)
    errors = [1e-9] + [10.0] * 7
    star_spec = list(player.iter_agents())[0].spec
    hits = 0
    trials = 200
    for seed in range(trials):
        child = evolve_generation(
            player, errors, GAParams(p_cross=1e-12, p_mut=0.0), make_streams(seed)
        )
        hits += sum(agent.spec == star_spec for agent in child.iter_agents())
    assert hits / (trials * 8) > 0.99


def test_evolve_generation_is_deterministic_per_seed():
    player = _mixed_player(seed=21)
    errors = list(np.random.default_rng(2).uniform(0.01, 0.5, player.agent_count()))
    a = evolve_generation(player, errors, GAParams(), make_streams(123))
    b = evolve_generation(_mixed_player(seed=21), errors, GAParams(), make_streams(123))
    for x, y in zip(a.iter_agents(), b.iter_agents()):
        assert x.spec == y.spec
        assert x.weights.tobytes() == y.weights.tobytes()


def test_evolve_generation_validation():
    player = _mixed_player()
    streams = make_streams(1)
    with pytest.raises(ConfigError):
        evolve_generation(player, [0.1], GAParams(), streams)
    single = Player(id=0, committees=[[new_agent(AgentSpec(2, ActivationKind.LINEAR), np.random.default_rng(0))]], cash=0.0, holdings=[0])
    with pytest.raises(ConfigError):
        evolve_generation(single, [0.1], GAParams(), streams)
