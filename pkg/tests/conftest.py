"""Shared test helpers: random matrix factories and exact mini-oracles."""

from __future__ import annotations

import numpy as np

from kcolorlab.kernels import sinkhorn_balance


def random_doubly_stochastic(k: int, rng: np.random.Generator) -> np.ndarray:
    """Strictly positive doubly stochastic matrix via Sinkhorn scaling."""
    raw = rng.gamma(2.0, size=(k, k)) + 1e-3
    return sinkhorn_balance(raw, 400, 1e-13)


def random_interior(k: int, rng: np.random.Generator, floor: float = 1e-3) -> np.ndarray:
    """Doubly stochastic matrix with entries bounded away from 0."""
    arr = random_doubly_stochastic(k, rng)
    while arr.min() < floor:
        arr = 0.5 * arr + 0.5 / k
    return arr
