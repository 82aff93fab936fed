"""Correction coupling: turn an unconditioned Poisson walk into a bridge.

Interpret the walk's increment counts P_1..P_n as balls thrown into n
urns.  If the walk ends below 0 (deficit, total balls < n) the correction
throws the missing balls uniformly into the urns; if it ends above 0
(surplus) it removes the excess balls uniformly without replacement.  The
resulting correction path C is monotone with C_n = -S_n, and S + C has
exactly the law of the walk conditioned to end at 0.  Conditionally on
|S_n| = m, the one-dimensional marginals satisfy |C_k| ~ Binomial(m, k/n).

Batch samplers used by the verification harness live alongside the scalar
constructions; aggregated group-sum sampling (exact by Poisson/multinomial
aggregation, cross-checked in the tests) keeps large-n studies cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import stats
from .rng import (
    CountVector,
    RngStream,
    multinomial_uniform_matrix,
    mv_hypergeometric_matrix,
    sample_multinomial_uniform,
    sample_multivariate_hypergeometric,
    sample_poisson1,
)
from .walks import LatticePath, OracleExhaustedError

SIGN_DEFICIT = 1
SIGN_ZERO = 0
SIGN_SURPLUS = -1


@dataclass(frozen=True)
class CorrectionPath:
    """Monotone integer path C_0..C_n coupled to a walk; C_n = -S_n.

    ``sign`` is +1 when balls were added (walk ended below 0), -1 when
    balls were removed, 0 when no correction was needed.
    """

    n: int
    values: np.ndarray
    sign: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64)
        object.__setattr__(self, "values", values)
        if self.n < 1 or values.size != self.n + 1:
            raise ValueError("values must have length n + 1 with n >= 1")
        if values[0] != 0:
            raise ValueError("correction must start at 0")
        steps = np.diff(values)
        if self.sign == SIGN_DEFICIT and np.any(steps < 0):
            raise ValueError("deficit correction must be nondecreasing")
        if self.sign == SIGN_SURPLUS and np.any(steps > 0):
            raise ValueError("surplus correction must be nonincreasing")
        if self.sign == SIGN_ZERO and np.any(values != 0):
            raise ValueError("zero correction must be identically 0")

    @property
    def endpoint(self) -> int:
        return int(self.values[-1])


@dataclass(frozen=True)
class CoupledTriple:
    """A walk S, its correction C, and the bridge S + C (ends at 0)."""

    walk: LatticePath
    correction: CorrectionPath
    bridge: LatticePath

    def __post_init__(self):
        if not np.array_equal(
            self.bridge.values, self.walk.values + self.correction.values
        ):
            raise ValueError("bridge must equal walk + correction")
        if self.bridge.endpoint != 0:
            raise ValueError("bridge must end at 0")


def _cumulative(increments: np.ndarray, sign: int) -> CorrectionPath:
    values = np.concatenate(([0], np.cumsum(increments)))
    return CorrectionPath(n=increments.size, values=values, sign=sign)


def correct_deficit(counts: CountVector, s: int, rng: RngStream) -> CorrectionPath:
    """Throw -s missing balls uniformly into the n urns.

    The correction increments are Mult(-s, 1/n, ..., 1/n), independent of
    the urn contents given s, so C_k ~ Binomial(-s, k/n).
    """
    n = counts.n_cells
    if s >= 0 or counts.total - n != s:
        raise ValueError(f"expected deficit counts with total - n = s < 0, got s={s}")
    added = sample_multinomial_uniform(-s, n, rng)
    return _cumulative(added.counts, SIGN_DEFICIT)


def correct_surplus(counts: CountVector, s: int, rng: RngStream) -> CorrectionPath:
    """Remove the s excess balls uniformly without replacement.

    Conditionally on the urn contents, the per-urn removal counts follow
    the multivariate hypergeometric law; marginally C_k ~ -Binomial(s, k/n).
    """
    n = counts.n_cells
    if s <= 0 or counts.total - n != s:
        raise ValueError(f"expected surplus counts with total - n = s > 0, got s={s}")
    removed = sample_multivariate_hypergeometric(counts, s, rng)
    if np.any(removed.counts > counts.counts):
        raise AssertionError("removed more balls than an urn held")
    return _cumulative(-removed.counts, SIGN_SURPLUS)


def sample_coupled(n: int, rng: RngStream) -> CoupledTriple:
    """Draw the walk, apply the matching correction, return the triple."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = sample_poisson1(rng, size=n)
    counts = CountVector.from_counts(p)
    s = counts.total - n
    walk = LatticePath(n=n, values=np.concatenate(([0], np.cumsum(p - 1))))
    if s == 0:
        correction = CorrectionPath(n=n, values=np.zeros(n + 1, dtype=np.int64), sign=SIGN_ZERO)
    elif s < 0:
        correction = correct_deficit(counts, s, rng)
    else:
        correction = correct_surplus(counts, s, rng)
    bridge = LatticePath(n=n, values=walk.values + correction.values)
    return CoupledTriple(walk=walk, correction=correction, bridge=bridge)


def coupled_increment_matrices(
    n: int, reps: int, rng: RngStream
) -> tuple[np.ndarray, np.ndarray]:
    """Batch sampler: (P, dC) increment matrices of shape (reps, n).

    Row r carries one coupled draw: walk increments are P[r] - 1, the
    correction increments are dC[r], and P[r] + dC[r] sums to n.  Deficit
    rows are corrected before surplus rows, in a fixed order, so output is
    a pure function of (stream, n, reps).
    """
    p = sample_poisson1(rng, size=(reps, n))
    s = p.sum(axis=1) - n
    dc = np.zeros((reps, n), dtype=np.int64)
    deficit = np.flatnonzero(s < 0)
    if deficit.size:
        dc[deficit] = multinomial_uniform_matrix(-s[deficit], n, rng)
    surplus = np.flatnonzero(s > 0)
    if surplus.size:
        dc[surplus] = -mv_hypergeometric_matrix(p[surplus], s[surplus], rng)
    return p, dc


def correction_group_sums(
    group_counts: np.ndarray, s: np.ndarray, group_sizes, rng: RngStream
) -> np.ndarray:
    """Correction increments aggregated over consecutive cell groups.

    ``group_counts[r, j]`` is the total ball count of group j (sum of P_i
    over its cells), ``group_sizes`` the number of cells per group, and
    ``s[r]`` the walk endpoint.  Throwing balls uniformly into cells and
    aggregating by group is the same as throwing into groups with
    probability (group size / n); removing balls uniformly without
    replacement aggregates to group-level hypergeometric draws.  Both
    identities are exact, so the returned signed group sums of dC have
    exactly the law of the full construction aggregated over the groups.
    """
    group_counts = np.asarray(group_counts, dtype=np.int64)
    s = np.asarray(s, dtype=np.int64)
    sizes = np.asarray(group_sizes, dtype=np.int64)
    reps, n_groups = group_counts.shape
    if sizes.size != n_groups:
        raise ValueError("group_sizes must match group_counts columns")
    gen = rng.generator
    out = np.zeros((reps, n_groups), dtype=np.int64)

    deficit = np.flatnonzero(s < 0)
    if deficit.size:
        remaining = -s[deficit]
        cells_left = int(sizes.sum())
        for j in range(n_groups - 1):
            x = gen.binomial(remaining, sizes[j] / cells_left)
            out[deficit, j] = x
            remaining = remaining - x
            cells_left -= int(sizes[j])
        out[deficit, n_groups - 1] = remaining

    surplus = np.flatnonzero(s > 0)
    if surplus.size:
        remaining_draw = s[surplus]
        remaining_total = group_counts[surplus].sum(axis=1)
        for j in range(n_groups - 1):
            good = group_counts[surplus, j]
            x = gen.hypergeometric(good, remaining_total - good, remaining_draw)
            out[surplus, j] = -x
            remaining_total = remaining_total - good
            remaining_draw = remaining_draw - x
        out[surplus, n_groups - 1] = -remaining_draw
    return out


def conditioned_correction_values(
    n: int,
    k: int,
    s: int,
    reps: int,
    rng: RngStream,
    max_attempts: int = 10**7,
    chunk: int = 200_000,
) -> np.ndarray:
    """C_k for `reps` draws conditioned on the walk ending at s, by rejection.

    Raises OracleExhaustedError when the attempt cap is hit first.
    """
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if s == 0:
        raise ValueError("conditioning on s = 0 needs no correction")
    collected: list[np.ndarray] = []
    have = 0
    attempts = 0
    while have < reps:
        if attempts >= max_attempts:
            raise OracleExhaustedError(
                f"only {have}/{reps} conditioned draws in {max_attempts} attempts"
            )
        m = min(chunk, max_attempts - attempts)
        p = sample_poisson1(rng, size=(m, n))
        attempts += m
        hit = np.flatnonzero(p.sum(axis=1) - n == s)
        if hit.size == 0:
            continue
        if k == 0:
            vals = np.zeros(hit.size, dtype=np.int64)
        elif k == n:
            vals = np.full(hit.size, -s, dtype=np.int64)
        else:
            groups = np.stack([p[hit, :k].sum(axis=1), p[hit, k:].sum(axis=1)], axis=1)
            dc = correction_group_sums(groups, np.full(hit.size, s), [k, n - k], rng)
            vals = dc[:, 0]
        collected.append(vals)
        have += hit.size
    return np.concatenate(collected)[:reps]


def binomial_marginal_report(
    n: int, k: int, s: int, reps: int, rng: RngStream, max_attempts: int = 10**7
) -> stats.StatReport:
    """Chi-square C_k | S_n = s against the signed Binomial(|s|, k/n) law."""
    name = f"correction_marginal_n{n}_k{k}_s{s}"
    if k == 0 or k == n:
        # C_0 = 0 and C_n = -s are deterministic; degenerate but consistent
        vals = conditioned_correction_values(n, k, s, min(reps, 1000), rng, max_attempts)
        expected = 0 if k == 0 else -s
        ok = bool(np.all(vals == expected))
        return stats.report_bound(
            name, 0.0 if ok else 1.0, 0.0, vals.size, degenerate=True
        )
    vals = conditioned_correction_values(n, k, s, reps, rng, max_attempts)
    if s < 0 and np.any(vals < 0):
        raise AssertionError("deficit correction went negative")
    if s > 0 and np.any(vals > 0):
        raise AssertionError("surplus correction went positive")
    law = stats.binomial_law(abs(s), k, n)
    observed = np.bincount(np.abs(vals), minlength=abs(s) + 1)
    return stats.chi_square_gof(observed, law, name=name)


def decay_probability(
    n: int, t: float, eps: float, reps: int, rng: RngStream
) -> tuple[float, int]:
    """Estimate P(|C_{floor(nt)} + t*S_n| >= eps*sqrt(n)); returns (phat, hits).

    Uses the exact group aggregation: total balls in the first k cells and
    in the rest are independent Poisson(k) and Poisson(n-k), and the
    correction enters only through its group sums.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    k = int(math.floor(n * t))
    if k == 0 or k == n:
        # C_0 = 0 at t = 0 and C_n = -S_n at t = 1 make the statistic 0
        return 0.0, 0
    gen = rng.generator
    g1 = gen.poisson(float(k), reps).astype(np.int64)
    g2 = gen.poisson(float(n - k), reps).astype(np.int64)
    s = g1 + g2 - n
    dc = correction_group_sums(np.stack([g1, g2], axis=1), s, [k, n - k], rng)
    stat = np.abs(dc[:, 0] + t * s)
    hits = int((stat >= eps * math.sqrt(n)).sum())
    return hits / reps, hits


def decay_study(
    n_list, t: float, eps: float, reps: int, rng: RngStream, threshold: float = 0.05
) -> stats.StatReport:
    """Decay of the recentred correction across a sweep of n.

    The reported statistic is the final probability estimate when the
    estimates strictly decrease along ``n_list``, and +inf otherwise, so
    `passed` means: strictly decreasing and final estimate < threshold.
    """
    estimates = []
    for n in n_list:
        phat, _ = decay_probability(int(n), t, eps, reps, rng)
        estimates.append(phat)
    decreasing = all(b < a for a, b in zip(estimates, estimates[1:]))
    statistic = estimates[-1] if decreasing else math.inf
    return stats.report_bound(
        f"correction_decay_t{t}_eps{eps}",
        statistic,
        threshold,
        reps * len(list(n_list)),
        comparison="<",
        estimates=[float(e) for e in estimates],
        n_list=list(map(int, n_list)),
        strictly_decreasing=decreasing,
    )
