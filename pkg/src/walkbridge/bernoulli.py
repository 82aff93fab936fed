"""Uniform Bernoulli bridges by flipping surplus steps of a random walk.

Duchon's recipe: draw a +-1 walk of even length 2n; while the endpoint is
positive, pick indices uniformly with replacement and flip the step when
it is a +1 (do nothing on a -1, or on a step already flipped), stopping
after k = endpoint/2 flips.  The flipped set is then a uniform k-subset
of the +1 positions, and the output is uniform over all balanced +-1
paths.  A negative endpoint is handled by the mirror procedure.

``fast_flip`` skips the retries and picks the k distinct surplus positions
in one pass; it has the same output law (checked per input in the tests)
and is the one to use at large sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import RngStream


@dataclass(frozen=True)
class SignPath:
    """+-1 increments of a walk of even length."""

    two_n: int
    increments: np.ndarray

    def __post_init__(self):
        inc = np.asarray(self.increments, dtype=np.int8)
        object.__setattr__(self, "increments", inc)
        if self.two_n < 2 or self.two_n % 2 != 0:
            raise ValueError("two_n must be even and >= 2")
        if inc.size != self.two_n:
            raise ValueError("increments must have length two_n")
        if not np.all(np.abs(inc) == 1):
            raise ValueError("increments must be +-1")

    @property
    def endpoint(self) -> int:
        return int(self.increments.sum(dtype=np.int64))

    def is_bridge(self) -> bool:
        return self.endpoint == 0

    @property
    def values(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum(self.increments, dtype=np.int64)))


def sample_simple_walk(two_n: int, rng: RngStream) -> SignPath:
    """i.i.d. +-1 steps, each sign with probability 1/2."""
    if two_n < 2 or two_n % 2 != 0:
        raise ValueError("two_n must be even and >= 2")
    inc = rng.generator.integers(0, 2, size=two_n, dtype=np.int8) * 2 - 1
    return SignPath(two_n=two_n, increments=inc)


def _flip_with_replacement(inc: np.ndarray, gen, two_n: int) -> None:
    """In-place rebalancing core: uniform index draws with replacement."""
    total = int(inc.sum(dtype=np.int64))
    if total == 0:
        return
    target = np.int8(1) if total > 0 else np.int8(-1)
    k = abs(total) // 2
    flipped = 0
    # index draws are buffered for speed; law is unchanged
    buf_size = max(16, 4 * k)
    while flipped < k:
        for idx in gen.integers(0, two_n, size=buf_size):
            if inc[idx] == target:
                inc[idx] = -target
                flipped += 1
                if flipped == k:
                    break


def duchon_flip(path: SignPath, rng: RngStream) -> SignPath:
    """Rebalance by uniform index draws with replacement, as narrated.

    Indices are drawn uniformly from all positions; a draw only counts
    when it lands on a not-yet-flipped surplus step.  Stops after exactly
    |endpoint|/2 flips.  Already-balanced input is returned unchanged.
    """
    if path.endpoint == 0:
        return path
    inc = path.increments.copy()
    _flip_with_replacement(inc, rng.generator, path.two_n)
    return SignPath(two_n=path.two_n, increments=inc)


def fast_flip(path: SignPath, rng: RngStream) -> SignPath:
    """Flip a uniform k-subset of the surplus positions in one pass.

    Law-equivalent to the draw-with-replacement procedure: there the j-th
    flip is uniform over the surplus positions not yet flipped, so the
    flipped set is a uniform k-subset.
    """
    total = path.endpoint
    if total == 0:
        return path
    target = np.int8(1) if total > 0 else np.int8(-1)
    k = abs(total) // 2
    inc = path.increments.copy()
    positions = np.flatnonzero(inc == target)
    chosen = rng.generator.choice(positions, size=k, replace=False)
    inc[chosen] = -target
    return SignPath(two_n=path.two_n, increments=inc)


def sample_uniform_bridge(two_n: int, rng: RngStream, fast: bool = False) -> SignPath:
    """Uniform draw over all balanced +-1 paths of length two_n."""
    walk = sample_simple_walk(two_n, rng)
    return fast_flip(walk, rng) if fast else duchon_flip(walk, rng)
