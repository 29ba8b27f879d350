"""Deterministic random substreams.

Every random draw in a trial comes from a Philox (counter-based) generator
keyed by ``(base_seed, trial_index, attempt, purpose)``. Results therefore
depend only on those keys and never on execution order or worker count.
"""

from __future__ import annotations

import enum

import numpy as np


class Purpose(enum.IntEnum):
    DEVICES = 0
    GATEWAYS = 1
    CHANNELS = 2
    FADES = 3
    RELAY = 4
    ANALYTIC = 5


def substream(base_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``base_seed`` and an integer key path."""
    seq = np.random.SeedSequence(entropy=int(base_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def trial_stream(base_seed: int, trial_index: int, purpose: Purpose, attempt: int = 0) -> np.random.Generator:
    return substream(base_seed, trial_index, attempt, int(purpose))
