"""Seeded random streams.

One master seed is forked into named substreams so that extra draws in one
subsystem (say, weight initialisation) never perturb the others (say, the
clearing-loop shuffle).  Reproducibility contract: the same seed always
yields the same four streams, in the same order.
"""

from dataclasses import dataclass

import numpy as np

# Order matters: streams are spawned from the master seed in this sequence.
STREAM_NAMES = ("init", "shuffle", "ga", "mutation")


@dataclass
class RandomStreams:
    init: np.random.Generator  # weight initialisation
    shuffle: np.random.Generator  # player ordering in the clearing loop
    ga: np.random.Generator  # roulette selection and crossover
    mutation: np.random.Generator  # chromosome bit flips


def make_streams(seed: int) -> RandomStreams:
    """Fork `seed` into the named substreams used by a run."""
    children = np.random.SeedSequence(seed).spawn(len(STREAM_NAMES))
    return RandomStreams(*(np.random.default_rng(c) for c in children))
