"""Gaussian reference processes on a uniform grid.

Brownian motion is built from i.i.d. N(0, 1/m) increments (numpy's exact
ziggurat normals); the pinned bridge is the one-pass transform
b(t) = B(t) - t*B(1), which makes the endpoint exactly zero and leaves
cov(b(s), b(t)) = s(1-t) for s <= t.
"""

from __future__ import annotations

import math

import numpy as np

from .empirical import GridFunction
from .rng import RngStream


def sample_brownian_motion(m: int, rng: RngStream) -> GridFunction:
    """Standard Brownian motion at times k/m, starting at 0."""
    if m < 1:
        raise ValueError("m must be >= 1")
    steps = rng.generator.standard_normal(m) / math.sqrt(m)
    values = np.concatenate(([0.0], np.cumsum(steps)))
    return GridFunction(m=m, values=values)


def sample_brownian_bridge(m: int, rng: RngStream) -> GridFunction:
    """Brownian bridge at times k/m; the endpoint is exactly 0."""
    motion = sample_brownian_motion(m, rng)
    t = np.arange(m + 1) / m
    values = motion.values - t * motion.values[-1]
    return GridFunction(m=m, values=values)


def brownian_motion_values(m: int, reps: int, rng: RngStream) -> np.ndarray:
    """Batch of motion paths as a (reps, m+1) value matrix."""
    steps = rng.generator.standard_normal((reps, m)) / math.sqrt(m)
    values = np.zeros((reps, m + 1))
    np.cumsum(steps, axis=1, out=values[:, 1:])
    return values


def brownian_bridge_values(m: int, reps: int, rng: RngStream) -> np.ndarray:
    """Batch of bridge paths as a (reps, m+1) value matrix."""
    values = brownian_motion_values(m, reps, rng)
    t = np.arange(m + 1) / m
    return values - t[None, :] * values[:, -1:]
