"""Seedable random streams and exact base-distribution samplers.

Every sampler in the package is a pure function of an explicit
:class:`RngStream`; there is no hidden module-level state.  A stream is
identified by the pair ``(seed, stream_id)`` and wraps a counter-based
Philox generator, so the same pair reproduces the same draw sequence on
every run (for a fixed numpy version) and distinct stream ids give
statistically independent streams.  Replication drivers derive one stream
per replication chunk, which makes results independent of worker
scheduling.

Scalar samplers implement the documented laws exactly; most accept an
optional ``size`` for vectorised batches, and the two vector-valued
samplers have ``*_matrix`` companions used by the verification harness.
Batch draws consume the underlying stream differently from the equivalent
scalar sequence, so scalar and batch results are reproducible separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


class RngStream:
    """Deterministic random stream keyed by (seed, stream_id)."""

    __slots__ = ("seed", "stream_id", "_gen")

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        key = np.array(
            [self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64
        )
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def derive(self, stream_id: int) -> "RngStream":
        """Fresh, independent stream with the same seed and a new index."""
        return RngStream(self.seed, stream_id)

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


@dataclass(frozen=True)
class CountVector:
    """Occupancy counts of n cells together with their total."""

    counts: np.ndarray
    total: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        if counts.ndim != 1:
            raise ValueError("counts must be one-dimensional")
        if counts.size and counts.min() < 0:
            raise ValueError("counts must be non-negative")
        if int(counts.sum()) != self.total:
            raise ValueError(
                f"counts sum {int(counts.sum())} != declared total {self.total}"
            )

    @classmethod
    def from_counts(cls, counts) -> "CountVector":
        counts = np.asarray(counts, dtype=np.int64)
        return cls(counts=counts, total=int(counts.sum()))

    @property
    def n_cells(self) -> int:
        return int(self.counts.size)


def sample_uniform01(rng: RngStream, size: int | None = None):
    """Uniform draws on [0, 1) at full double resolution."""
    if size is None:
        return float(rng.generator.random())
    return rng.generator.random(size)


def _poisson1_cdf() -> np.ndarray:
    # CDF of Poisson(1); reaches 1.0 in double precision by k ~ 18.
    pmf = [math.exp(-1.0)]
    while pmf[-1] > 0.0 and len(pmf) < 64:
        pmf.append(pmf[-1] / len(pmf))
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    return cdf


_POISSON1_CDF = _poisson1_cdf()


def sample_poisson1(rng: RngStream, size: int | None = None):
    """Poisson(1) draws by CDF inversion of a single uniform."""
    u = rng.generator.random(size)
    k = np.searchsorted(_POISSON1_CDF, u, side="right")
    if size is None:
        return int(k)
    return k.astype(np.int64)


def sample_binomial(k: int, p: float, rng: RngStream, size: int | None = None):
    """Binomial(k, p) with the exact law; rejects p outside [0, 1]."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if size is None:
        return int(rng.generator.binomial(k, p))
    return rng.generator.binomial(k, p, size=size).astype(np.int64)


def sample_multinomial_uniform(total: int, n_cells: int, rng: RngStream) -> CountVector:
    """Mult(total, 1/n, ..., 1/n) via sequential conditional binomials.

    Cost is O(n_cells) regardless of total.
    """
    if total < 0:
        raise ValueError("total must be non-negative")
    if n_cells < 1:
        raise ValueError("n_cells must be >= 1")
    gen = rng.generator
    counts = np.zeros(n_cells, dtype=np.int64)
    remaining = total
    for i in range(n_cells - 1):
        x = int(gen.binomial(remaining, 1.0 / (n_cells - i)))
        counts[i] = x
        remaining -= x
    counts[n_cells - 1] = remaining
    return CountVector(counts=counts, total=total)


def multinomial_uniform_matrix(totals, n_cells: int, rng: RngStream) -> np.ndarray:
    """Row-wise Mult(totals[r], 1/n, ..., 1/n); same chained-binomial law.

    ``totals`` is an int array; the result has shape (len(totals), n_cells).
    """
    totals = np.asarray(totals, dtype=np.int64)
    if totals.ndim != 1:
        raise ValueError("totals must be a 1-d array")
    gen = rng.generator
    out = np.zeros((totals.size, n_cells), dtype=np.int64)
    remaining = totals.copy()
    for i in range(n_cells - 1):
        x = gen.binomial(remaining, 1.0 / (n_cells - i))
        out[:, i] = x
        remaining -= x
    out[:, n_cells - 1] = remaining
    return out


def sample_multivariate_hypergeometric(
    urn_counts: CountVector, draw: int, rng: RngStream
) -> CountVector:
    """Uniform removal of ``draw`` balls from urns, without replacement.

    The per-urn removal counts c satisfy 0 <= c_i <= p_i and sum(c) = draw,
    with probability C(p_1,c_1)...C(p_n,c_n) / C(sum p, draw).  Sampled by
    sequential conditional (scalar) hypergeometric draws.
    """
    if draw < 0:
        raise ValueError("draw must be non-negative")
    if draw > urn_counts.total:
        raise ValueError(
            f"cannot draw {draw} balls from {urn_counts.total} available"
        )
    gen = rng.generator
    p = urn_counts.counts
    n = urn_counts.n_cells
    out = np.zeros(n, dtype=np.int64)
    remaining_total = urn_counts.total
    remaining_draw = draw
    for i in range(n - 1):
        good = int(p[i])
        x = int(gen.hypergeometric(good, remaining_total - good, remaining_draw))
        out[i] = x
        remaining_total -= good
        remaining_draw -= x
    out[n - 1] = remaining_draw
    return CountVector(counts=out, total=draw)


def mv_hypergeometric_matrix(urns: np.ndarray, draws, rng: RngStream) -> np.ndarray:
    """Row-wise uniform ball removal; vectorised form of the scalar sampler.

    ``urns`` has shape (reps, n_cells); ``draws`` is a scalar or per-row
    array with draws[r] <= urns[r].sum().
    """
    urns = np.asarray(urns, dtype=np.int64)
    reps, n = urns.shape
    draws = np.broadcast_to(np.asarray(draws, dtype=np.int64), (reps,)).copy()
    if np.any(draws < 0):
        raise ValueError("draws must be non-negative")
    if np.any(draws > urns.sum(axis=1)):
        raise ValueError("draws exceed available balls in some row")
    gen = rng.generator
    out = np.zeros((reps, n), dtype=np.int64)
    remaining_total = urns.sum(axis=1)
    remaining_draw = draws
    for i in range(n - 1):
        good = urns[:, i]
        x = gen.hypergeometric(good, remaining_total - good, remaining_draw)
        out[:, i] = x
        remaining_total = remaining_total - good
        remaining_draw = remaining_draw - x
    out[:, n - 1] = remaining_draw
    return out
