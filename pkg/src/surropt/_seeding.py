"""Counter-based seed derivation.

Every randomized stage derives its own generator from (root seed, tag, indices)
through a SeedSequence spawn key, so results do not depend on execution order
or worker count.
"""

from __future__ import annotations

import numpy as np

# Stage tags. Values are arbitrary but frozen: changing them changes every
# seeded result downstream.
TAG_SAMPLE = 1
TAG_SPLIT = 2
TAG_CV_FOLD = 3
TAG_TUNE = 4
TAG_TRAIN = 5
TAG_MOO_INIT = 6
TAG_MOO_GEN = 7
TAG_XAI = 8
TAG_ENSEMBLE = 9


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Generator derived from a root seed and an integer key path."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def seed_for(seed: int, *key: int) -> int:
    """Plain integer seed derived from a root seed and an integer key path."""
    return int(np.random.SeedSequence(seed, spawn_key=tuple(key)).generate_state(1)[0])
