"""The uniform empirical process on [0, 1].

Two constructions of the same object live here: the cadlag process built
directly from a sorted sample, and its restriction to the uniform grid
{k/n} computed from cell occupancy counts.  Both are exact; partial sums
are accumulated in integers and scaled by 1/sqrt(n) once at the end.

Cell convention: cell j is [(j-1)/n, j/n), with the last cell closed at 1.
A boundary point u == k/n therefore lands in cell k+1; such points have
probability zero for uniform draws and only matter for hand-crafted input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import CountVector, RngStream, sample_uniform01


@dataclass(frozen=True)
class EmpiricalSample:
    """n points of [0, 1], stored sorted."""

    n: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        object.__setattr__(self, "points", pts)
        if pts.size != self.n or self.n < 1:
            raise ValueError("need n >= 1 points")
        if pts.min() < 0.0 or pts.max() > 1.0:
            raise ValueError("points must lie in [0, 1]")
        if np.any(np.diff(pts) < 0):
            raise ValueError("points must be sorted nondecreasing")

    @classmethod
    def from_draws(cls, draws) -> "EmpiricalSample":
        draws = np.sort(np.asarray(draws, dtype=np.float64))
        return cls(n=draws.size, points=draws)


@dataclass(frozen=True)
class GridFunction:
    """Real values on the uniform grid {k/m}, linear between grid points."""

    m: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if self.m < 1 or values.size != self.m + 1:
            raise ValueError("values must have length m + 1 with m >= 1")

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.m + 1) / self.m

    def value_at(self, t) -> np.ndarray | float:
        out = np.interp(t, self.grid, self.values)
        return float(out) if np.isscalar(t) else out


def sample_empirical(n: int, rng: RngStream) -> EmpiricalSample:
    """n i.i.d. uniforms, sorted."""
    return EmpiricalSample.from_draws(sample_uniform01(rng, size=n))


def empirical_cdf(sample: EmpiricalSample, t: float) -> float:
    """F_n(t) = (number of points <= t) / n, right-continuous."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    return int(np.searchsorted(sample.points, t, side="right")) / sample.n


def empirical_process(sample: EmpiricalSample, t: float) -> float:
    """sqrt(n) * (F_n(t) - t)."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    n = sample.n
    c = int(np.searchsorted(sample.points, t, side="right"))
    return (c - n * t) / math.sqrt(n)


def cell_counts(sample: EmpiricalSample) -> CountVector:
    """Occupancy of the n cells [(j-1)/n, j/n) (last closed) by the sample."""
    n = sample.n
    idx = np.minimum((sample.points * n).astype(np.int64), n - 1)
    counts = np.bincount(idx, minlength=n)
    return CountVector(counts=counts.astype(np.int64), total=n)


def cell_count_matrix(u: np.ndarray) -> np.ndarray:
    """Row-wise cell counts for a (reps, n) matrix of uniforms."""
    reps, n = u.shape
    idx = np.minimum((u * n).astype(np.int64), n - 1)
    idx += (np.arange(reps, dtype=np.int64) * n)[:, None]
    flat = np.bincount(idx.ravel(), minlength=reps * n)
    return flat.reshape(reps, n)


def grid_process_from_counts(counts: CountVector) -> GridFunction:
    """Process value (sum of first k counts - k) / sqrt(n) at each k/n."""
    n = counts.n_cells
    partial = np.cumsum(counts.counts) - np.arange(1, n + 1)
    values = np.concatenate(([0.0], partial / math.sqrt(n)))
    return GridFunction(m=n, values=values)


def _process_at(sample: EmpiricalSample, t: np.ndarray, side: str) -> np.ndarray:
    c = np.searchsorted(sample.points, t, side=side)
    return (c - sample.n * t) / math.sqrt(sample.n)


def interpolation_gap(sample: EmpiricalSample) -> float:
    """Exact sup over [0, 1] of |interpolated process - cadlag process|.

    The difference is piecewise linear between grid points and jump points,
    so the sup is attained at those candidates (approaching jumps from the
    left).  Callers compare the result to max cell count / sqrt(n).
    """
    n = sample.n
    grid = np.arange(n + 1) / n
    grid_vals = _process_at(sample, grid, side="right")
    cand = np.unique(np.concatenate((grid, sample.points)))
    line = np.interp(cand, grid, grid_vals)
    gap_right = np.abs(line - _process_at(sample, cand, side="right"))
    gap_left = np.abs(line - _process_at(sample, cand, side="left"))
    return float(max(gap_right.max(), gap_left.max()))


def glivenko_cantelli_stat(sample: EmpiricalSample) -> float:
    """Exact sup over [0, 1] of |F_n(t) - t|."""
    n = sample.n
    pts = sample.points
    i = np.arange(1, n + 1)
    above = np.max(i / n - pts)
    below = np.max(pts - (i - 1) / n)
    return float(max(above, below, 0.0))


def gc_stat_rows(u: np.ndarray) -> np.ndarray:
    """Row-wise exact sup |F_n - t| for a (reps, n) matrix of uniforms."""
    srt = np.sort(u, axis=1)
    n = u.shape[1]
    i = np.arange(1, n + 1)
    above = (i / n - srt).max(axis=1)
    below = (srt - (i - 1) / n).max(axis=1)
    return np.maximum(np.maximum(above, below), 0.0)


def max_cell_tail_bound(n: int, eps: float) -> float:
    """Analytic bound n * (1 + (e-1)/n)^n * exp(-eps * sqrt(n)).

    Dominates P(max cell count >= eps * sqrt(n)) for n uniform points in
    n cells, by a Markov/Chernoff argument on a single Binomial(n, 1/n)
    count and a union bound.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    return n * (1.0 + (math.e - 1.0) / n) ** n * math.exp(-eps * math.sqrt(n))
