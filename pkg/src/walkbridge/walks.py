"""Centered unit-rate Poisson walks and their zero-conditioned versions.

The walk takes increments (P - 1) with P ~ Poisson(1), so it starts at 0
and each step is >= -1.  Conditioning on returning to 0 at time n turns
the increment vector (shifted back by +1) into a uniform multinomial
occupancy, which gives an exact O(n) sampler for the conditioned walk; a
rejection sampler is kept purely as an independent oracle for small n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import RngStream, sample_multinomial_uniform, sample_poisson1


class OracleExhaustedError(RuntimeError):
    """A rejection loop hit its attempt cap before accepting."""


@dataclass(frozen=True)
class LatticePath:
    """Integer path S_0..S_n with S_0 = 0 and steps >= -1."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64)
        object.__setattr__(self, "values", values)
        if self.n < 1 or values.size != self.n + 1:
            raise ValueError("values must have length n + 1 with n >= 1")
        if values[0] != 0:
            raise ValueError("path must start at 0")
        if np.any(np.diff(values) < -1):
            raise ValueError("steps must be >= -1")

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    @property
    def endpoint(self) -> int:
        return int(self.values[-1])


def _path_from_counts(counts: np.ndarray) -> LatticePath:
    n = counts.size
    values = np.concatenate(([0], np.cumsum(counts - 1)))
    return LatticePath(n=n, values=values)


def sample_walk(n: int, rng: RngStream) -> LatticePath:
    """Unconditioned walk: partial sums of (Poisson(1) - 1) increments."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _path_from_counts(sample_poisson1(rng, size=n))


def sample_conditioned_walk(n: int, rng: RngStream) -> LatticePath:
    """Walk conditioned to end at 0, sampled exactly.

    The conditioned increment counts are Mult(n, 1/n, ..., 1/n), so the
    path is built directly from one multinomial draw; no rejection.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    counts = sample_multinomial_uniform(n, n, rng)
    return _path_from_counts(counts.counts)


def rejection_oracle_conditioned_walk(
    n: int, rng: RngStream, max_attempts: int = 10**7
) -> LatticePath:
    """Resample the unconditioned walk until it ends at 0.

    Exact by construction but exponentially wasteful in sqrt(n); intended
    only as an independent oracle for small n (<= 8 or so).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    for _ in range(max_attempts):
        counts = sample_poisson1(rng, size=n)
        if int(counts.sum()) == n:
            return _path_from_counts(counts)
    raise OracleExhaustedError(
        f"no accepted path in {max_attempts} attempts at n={n}"
    )
