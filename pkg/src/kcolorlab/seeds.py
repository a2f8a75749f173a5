"""Deterministic seed derivation for all randomized routines.

Every randomized entry point takes a single integer master seed.  Internal
components derive independent child streams from (master, *counters) so that

* the same master seed always reproduces the same results,
* adding more draws to one component never perturbs another, and
* parallel workers can be handed disjoint streams up front.

numpy's SeedSequence already implements a high quality hash based spawning
scheme, so we simply route every derivation through it.
"""

from __future__ import annotations

import numpy as np


def child_sequence(master: int, *counters: int) -> np.random.SeedSequence:
    """Return the SeedSequence for a (master, counters...) derivation path."""
    if master < 0:
        raise ValueError("master seed must be non negative")
    return np.random.SeedSequence(entropy=master, spawn_key=tuple(counters))


def rng_for(master: int, *counters: int) -> np.random.Generator:
    """Return a Generator seeded from the derivation path (master, counters...)."""
    return np.random.default_rng(child_sequence(master, *counters))
