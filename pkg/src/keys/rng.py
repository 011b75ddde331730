"""Portable seeded random generators.

Every random draw in the toolkit (keys, extractor weights, augmentation,
corpora, Monte-Carlo runs) goes through numpy's Philox4x64 counter-based
bit generator, whose output stream is specified independently of the
platform.
"""

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def spawn_rngs(seed: int, count: int) -> list:
    """Independent child generators, e.g. one per image of a corpus."""
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [np.random.Generator(np.random.Philox(child)) for child in children]
