"""Pre-registered verification suites behind `walkbridge verify`.

Each check estimates one distributional identity or convergence statement
at desk scale and returns a StatReport.  Seeds are registered per check so
CI runs are deterministic; passing an explicit seed to `run_suite` swaps
every check onto that seed for fresh-seed exploration.

Replication work is split into fixed-size chunks, one derived stream per
chunk, and reduced in chunk order, so results do not depend on the number
of worker processes.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from . import coupling, stats
from .bernoulli import SignPath, _flip_with_replacement, duchon_flip, fast_flip
from .empirical import (
    cell_count_matrix,
    gc_stat_rows,
    interpolation_gap,
    max_cell_tail_bound,
    EmpiricalSample,
)
from .gaussian import brownian_bridge_values, brownian_motion_values
from .parallel import run_chunked
from .rng import RngStream
from .stats import StatReport

# -- registered scales (the acceptance contract) ---------------------------

BRIDGE_LAW_NS = (2, 3, 4)
BRIDGE_LAW_REPS = 10**6
BRIDGE_TV_BOUND = 0.005

MARGINAL_CONFIGS = ((4, 2, -1), (4, 2, 1), (4, 2, -2), (4, 2, 2), (4, 3, -2), (4, 3, 2))
MARGINAL_REPS = 10**5

IDENTITY_MAX_S = 4
IDENTITY_MAX_N = 4

DECAY_NS = (100, 1000, 10000)
DECAY_T = 0.5
DECAY_EPS = 0.5
DECAY_REPS = 10**4
DECAY_FINAL = 0.05

JOINT_COV_N = 10**4
JOINT_COV_TIMES = (0.25, 0.5, 0.75)
JOINT_COV_REPS = 10**5
JOINT_COV_TOL = 0.02

DUCHON_SIZES = (2, 4, 6, 8)
DUCHON_REPS = 10**6
FLIP_EQ_SIZES = (2, 4, 6)
FLIP_EQ_REPS = {2: 10**5, 4: 10**5, 6: 2 * 10**4}

INTERP_NS = (10, 100)
INTERP_SAMPLES = 10**3

TAIL_NS = (100, 1000, 10000)
TAIL_EPS = 1.0
TAIL_REPS = 10**5

EMP_COV_N = 4096
EMP_COV_TIMES = (0.25, 0.5, 0.75)
EMP_COV_REPS = 10**5
EMP_COV_TOL = 0.01

SUP_KS_N = 4096
SUP_KS_REPS = 10**4

GC_NS = (100, 1000, 10000)
GC_REPS = 10**3
GC_RATIO_LOW = 0.25
GC_RATIO_HIGH = 0.40

REF_TIMES = (0.25, 0.5, 0.75)
REF_REPS = 10**5
REF_BRIDGE_TOL = 0.01
REF_MOTION_TOL = 0.02

# per-check registered seeds; stream ids inside a check are derived from 0
CHECK_SEEDS = {
    "bridge_law": 411003,
    "binomial_marginals": 411010,
    "multinomial_identity": 0,  # exact, no randomness
    "decay": 411025,
    "joint_covariance": 411030,
    "duchon_uniformity": 411040,
    "flip_equivalence": 411050,
    "interpolation_bound": 411060,
    "tail_bound": 411070,
    "empirical_covariance": 411080,
    "sup_ks": 411090,
    "gc_rate": 411100,
    "reference_bridge": 411110,
    "reference_motion": 411120,
    "reference_endpoint": 411130,
}


def _seed(name: str, override: int | None) -> int:
    return CHECK_SEEDS[name] if override is None else override


# -- coupling suite ---------------------------------------------------------


def _bridge_tally_worker(chunk_idx, start, size, seed, n):
    rng = RngStream(seed, 1 + chunk_idx)
    p, dc = coupling.coupled_increment_matrices(n, size, rng)
    final = p + dc
    weights = (n + 1) ** np.arange(n, dtype=np.int64)
    codes = final @ weights
    return np.bincount(codes, minlength=(n + 1) ** n)


def check_bridge_law(
    n: int,
    reps: int = BRIDGE_LAW_REPS,
    seed: int | None = None,
    jobs: int = 1,
    chunk: int = 200_000,
) -> list[StatReport]:
    """Bridge increment law vs the exact enumerated conditioned-walk law."""
    seed = _seed("bridge_law", seed) + n
    tallies = run_chunked(_bridge_tally_worker, reps, chunk, jobs, (seed, n))
    counts = np.sum(tallies, axis=0)
    law = stats.enumerate_multinomial_law(n, n)
    weights = (n + 1) ** np.arange(n, dtype=np.int64)
    codes = [int(np.dot(outcome, weights)) for outcome in law.outcomes]
    observed = counts[codes]
    if int(observed.sum()) != reps:
        raise AssertionError("bridge produced an impossible increment vector")
    tv = stats.tv_distance(observed, law)
    tv_report = stats.report_bound(
        f"bridge_law_tv_n{n}", tv, BRIDGE_TV_BOUND, reps, comparison="<"
    )
    chi2 = stats.chi_square_gof(observed, law, name=f"bridge_law_chi2_n{n}")
    return [tv_report, chi2]


def check_binomial_marginals(
    configs=MARGINAL_CONFIGS,
    reps: int = MARGINAL_REPS,
    seed: int | None = None,
) -> list[StatReport]:
    """Conditioned correction marginal C_k | S_n = s vs +-Binomial(|s|, k/n)."""
    base = _seed("binomial_marginals", seed)
    reports = []
    for i, (n, k, s) in enumerate(configs):
        rng = RngStream(base, 1 + i)
        reports.append(coupling.binomial_marginal_report(n, k, s, reps, rng))
    return reports


def check_multinomial_identity(
    max_s: int = IDENTITY_MAX_S, max_n: int = IDENTITY_MAX_N
) -> StatReport:
    """Exact integer identity: sum of multinomial coefficients equals n^s."""
    mismatches = 0
    for n in range(1, max_n + 1):
        for s in range(0, max_s + 1):
            if stats.multinomial_coefficient_sum(s, n) != n**s:
                mismatches += 1
    return stats.report_bound(
        "multinomial_coefficient_identity",
        float(mismatches),
        0.0,
        (max_n) * (max_s + 1),
        max_s=max_s,
        max_n=max_n,
    )


def check_decay(
    n_list=DECAY_NS,
    t: float = DECAY_T,
    eps: float = DECAY_EPS,
    reps: int = DECAY_REPS,
    seed: int | None = None,
) -> StatReport:
    """Recentred correction vanishes: estimates decay strictly across n."""
    rng = RngStream(_seed("decay", seed), 1)
    return coupling.decay_study(n_list, t, eps, reps, rng, threshold=DECAY_FINAL)


def check_joint_covariance(
    n: int = JOINT_COV_N,
    times=JOINT_COV_TIMES,
    reps: int = JOINT_COV_REPS,
    seed: int | None = None,
    tol: float = JOINT_COV_TOL,
) -> StatReport:
    """cov(S_{nt}/sqrt(n), C_{nu}/sqrt(n)) against the -t*u limit surface."""
    rng = RngStream(_seed("joint_covariance", seed), 1)
    ks = [int(math.floor(n * t)) for t in times]
    sizes = np.diff([0, *ks, n])
    if np.any(sizes <= 0):
        raise ValueError("times must give distinct interior grid indices")
    gen = rng.generator
    groups = np.stack(
        [gen.poisson(float(g), reps).astype(np.int64) for g in sizes], axis=1
    )
    s = groups.sum(axis=1) - n
    dc = coupling.correction_group_sums(groups, s, sizes, rng)
    walk_at = np.cumsum(groups, axis=1)[:, : len(ks)] - np.asarray(ks)
    corr_at = np.cumsum(dc, axis=1)[:, : len(ks)]
    scale = math.sqrt(n)
    stacked = np.hstack([walk_at / scale, corr_at / scale])
    full = np.cov(stacked, rowvar=False)
    cross = full[: len(ks), len(ks) :]
    target = -np.outer(times, times)
    err = float(np.abs(cross - target).max())
    return stats.report_bound(
        f"joint_covariance_n{n}", err, tol, reps, times=list(times)
    )


def coupling_suite(seed: int | None = None, jobs: int = 1) -> list[StatReport]:
    reports: list[StatReport] = []
    for n in BRIDGE_LAW_NS:
        reports.extend(check_bridge_law(n, seed=seed, jobs=jobs))
    reports.extend(check_binomial_marginals(seed=seed))
    reports.append(check_multinomial_identity())
    reports.append(check_decay(seed=seed))
    reports.append(check_joint_covariance(seed=seed))
    return reports


# -- duchon suite -----------------------------------------------------------


def _bridge_codes(two_n: int) -> list[int]:
    codes = []
    for ups in combinations(range(two_n), two_n // 2):
        code = 0
        for i in ups:
            code |= 1 << i
        codes.append(code)
    return sorted(codes)


def _duchon_tally_worker(chunk_idx, start, size, seed, two_n):
    rng = RngStream(seed, 1 + chunk_idx)
    gen = rng.generator
    inc = gen.integers(0, 2, size=(size, two_n), dtype=np.int8) * 2 - 1
    counts = np.zeros(1 << two_n, dtype=np.int64)
    pow2 = (1 << np.arange(two_n)).astype(np.int64)
    for row in inc:
        _flip_with_replacement(row, gen, two_n)
        code = int(((row > 0) * pow2).sum())
        counts[code] += 1
    return counts


def check_duchon_uniformity(
    two_n: int,
    reps: int = DUCHON_REPS,
    seed: int | None = None,
    jobs: int = 1,
    chunk: int = 125_000,
) -> StatReport:
    """Flip-completed walks are uniform over all balanced paths."""
    seed = _seed("duchon_uniformity", seed) + two_n
    tallies = run_chunked(_duchon_tally_worker, reps, chunk, jobs, (seed, two_n))
    counts = np.sum(tallies, axis=0)
    codes = _bridge_codes(two_n)
    observed = counts[codes]
    if int(observed.sum()) != reps:
        raise AssertionError("flip produced an unbalanced path")
    n_out = len(codes)
    law = stats.DiscreteLaw(
        outcomes=tuple(codes), probabilities=np.full(n_out, 1.0 / n_out)
    )
    return stats.chi_square_gof(observed, law, name=f"duchon_uniform_2n{two_n}")


def _flip_eq_worker(chunk_idx, start, size, seed, two_n, reps):
    """Per-input two-sample comparison for input codes [start, start+size)."""
    results = []
    pow2 = (1 << np.arange(two_n)).astype(np.int64)
    for code in range(start, start + size):
        bits = (code >> np.arange(two_n)) & 1
        inc = (bits.astype(np.int8) * 2) - 1
        path = SignPath(two_n=two_n, increments=inc)
        if path.is_bridge():
            continue  # both algorithms are the identity here
        tallies = []
        for algo_idx, flip in enumerate((duchon_flip, fast_flip)):
            rng = RngStream(seed, 1 + 2 * code + algo_idx)
            counts = {}
            for _ in range(reps):
                out = flip(path, rng)
                key = int(((out.increments > 0) * pow2).sum())
                counts[key] = counts.get(key, 0) + 1
            tallies.append(counts)
        rep = stats.chi_square_two_sample(
            tallies[0], tallies[1], name=f"flip_eq_2n{two_n}_input{code}"
        )
        results.append((code, rep.pvalue))
    return results


def check_flip_equivalence(
    two_n: int,
    reps: int | None = None,
    seed: int | None = None,
    jobs: int = 1,
) -> StatReport:
    """duchon_flip and fast_flip agree in law on every input of this length.

    Statistic is the smallest per-input two-sample p-value; the check
    passes when it clears the 0.01 level for every input.
    """
    if reps is None:
        reps = FLIP_EQ_REPS[two_n]
    seed = _seed("flip_equivalence", seed) + two_n
    n_inputs = 1 << two_n
    span = max(1, n_inputs // 8)
    results = run_chunked(_flip_eq_worker, n_inputs, span, jobs, (seed, two_n, reps))
    pvalues = [(code, p) for part in results for code, p in part]
    worst_code, worst_p = min(pvalues, key=lambda cp: cp[1])
    return stats.report_pvalue(
        f"flip_equivalence_2n{two_n}",
        worst_p,
        worst_p,
        0.01,
        reps * len(pvalues) * 2,
        inputs_tested=len(pvalues),
        worst_input=worst_code,
    )


def duchon_suite(seed: int | None = None, jobs: int = 1) -> list[StatReport]:
    reports = [
        check_duchon_uniformity(two_n, seed=seed, jobs=jobs) for two_n in DUCHON_SIZES
    ]
    reports.extend(
        check_flip_equivalence(two_n, seed=seed, jobs=jobs) for two_n in FLIP_EQ_SIZES
    )
    return reports


# -- empirical suite --------------------------------------------------------


def check_interpolation_bound(
    n: int, n_samples: int = INTERP_SAMPLES, seed: int | None = None
) -> StatReport:
    """Exact check of gap <= max cell count / sqrt(n) on random samples."""
    rng = RngStream(_seed("interpolation_bound", seed) + n, 1)
    violations = 0
    worst_margin = -math.inf
    for _ in range(n_samples):
        u = rng.generator.random(n)
        sample = EmpiricalSample.from_draws(u)
        counts = cell_count_matrix(u[None, :])[0]
        gap = interpolation_gap(sample)
        bound = counts.max() / math.sqrt(n)
        worst_margin = max(worst_margin, gap - bound)
        if gap > bound:
            violations += 1
    return stats.report_bound(
        f"interpolation_bound_n{n}",
        float(violations),
        0.0,
        n_samples,
        worst_margin=worst_margin,
    )


def _tail_worker(chunk_idx, start, size, seed, n, threshold):
    rng = RngStream(seed, 1 + chunk_idx)
    hits = 0
    rows_per_block = max(1, 4_000_000 // n)
    done = 0
    while done < size:
        m = min(rows_per_block, size - done)
        u = rng.generator.random((m, n))
        counts = cell_count_matrix(u)
        hits += int((counts.max(axis=1) >= threshold).sum())
        done += m
    return hits


def check_tail_bound(
    n: int,
    eps: float = TAIL_EPS,
    reps: int = TAIL_REPS,
    seed: int | None = None,
    jobs: int = 1,
    chunk: int = 25_000,
) -> StatReport:
    """Empirical P(max cell count >= eps*sqrt(n)) lies under the analytic bound."""
    seed = _seed("tail_bound", seed) + n
    threshold = eps * math.sqrt(n)
    hits = sum(run_chunked(_tail_worker, reps, chunk, jobs, (seed, n, threshold)))
    bound = max_cell_tail_bound(n, eps)
    return stats.report_bound(
        f"cell_tail_bound_n{n}", hits / reps, bound, reps, hits=hits, eps=eps
    )


def _empirical_values_worker(chunk_idx, start, size, seed, n, times):
    rng = RngStream(seed, 1 + chunk_idx)
    u = rng.generator.random((size, n))
    t = np.asarray(times)
    counts = np.stack([(u <= tj).sum(axis=1) for tj in t], axis=1)
    return (counts / n - t[None, :]) * math.sqrt(n)


def check_empirical_covariance(
    n: int = EMP_COV_N,
    times=EMP_COV_TIMES,
    reps: int = EMP_COV_REPS,
    seed: int | None = None,
    jobs: int = 1,
    chunk: int = 12_500,
    tol: float = EMP_COV_TOL,
) -> StatReport:
    """Covariance of the empirical process matches s(1-t) at fixed times."""
    seed = _seed("empirical_covariance", seed)
    parts = run_chunked(_empirical_values_worker, reps, chunk, jobs, (seed, n, tuple(times)))
    values = np.concatenate(parts, axis=0)
    _, report = stats.covariance_report(
        values, times, tol=tol, name=f"empirical_covariance_n{n}"
    )
    return report


def _empirical_sup_worker(chunk_idx, start, size, seed, n):
    # exact cadlag sup: sqrt(n) * sup|F_n - t|, attained at the jump points
    rng = RngStream(seed, 1 + chunk_idx)
    sups = np.empty(size)
    rows_per_block = max(1, 4_000_000 // n)
    done = 0
    while done < size:
        m = min(rows_per_block, size - done)
        u = rng.generator.random((m, n))
        sups[done : done + m] = gc_stat_rows(u) * math.sqrt(n)
        done += m
    return sups


def _bridge_sup_worker(chunk_idx, start, size, seed, m):
    rng = RngStream(seed, 1001 + chunk_idx)
    values = brownian_bridge_values(m, size, rng)
    return np.abs(values).max(axis=1)


def check_sup_ks(
    n: int = SUP_KS_N,
    grid: int | None = None,
    reps: int = SUP_KS_REPS,
    seed: int | None = None,
    jobs: int = 1,
    chunk: int = 2_500,
) -> StatReport:
    """Two-sample KS: sup of the empirical process vs sup of the bridge.

    The empirical side is the exact cadlag sup (continuously distributed);
    the reference side is the bridge read on a grid of matching size.
    """
    if grid is None:
        grid = n
    seed = _seed("sup_ks", seed)
    emp_parts = run_chunked(_empirical_sup_worker, reps, chunk, jobs, (seed, n))
    ref_parts = run_chunked(_bridge_sup_worker, reps, chunk, jobs, (seed, grid))
    emp = np.concatenate(emp_parts)
    ref = np.concatenate(ref_parts)
    return stats.ks_two_sample(emp, ref, name=f"sup_ks_n{n}_grid{grid}")


def check_gc_rate(
    n_list=GC_NS, reps: int = GC_REPS, seed: int | None = None
) -> StatReport:
    """Median sup|F_n - t| shrinks like 1/sqrt(n) across a decade sweep."""
    base = _seed("gc_rate", seed)
    medians = []
    for i, n in enumerate(n_list):
        rng = RngStream(base, 1 + i)
        stats_rows = gc_stat_rows(rng.generator.random((reps, int(n))))
        medians.append(float(np.median(stats_rows)))
    ratios = [b / a for a, b in zip(medians, medians[1:])]
    worst = max(
        max(r - GC_RATIO_HIGH for r in ratios), max(GC_RATIO_LOW - r for r in ratios)
    )
    return stats.report_bound(
        "glivenko_cantelli_rate",
        worst,
        0.0,
        reps * len(medians),
        medians=medians,
        ratios=ratios,
    )


def empirical_suite(seed: int | None = None, jobs: int = 1) -> list[StatReport]:
    reports = [check_interpolation_bound(n, seed=seed) for n in INTERP_NS]
    reports.append(check_multinomial_identity())
    reports.extend(check_tail_bound(n, seed=seed, jobs=jobs) for n in TAIL_NS)
    reports.append(check_empirical_covariance(seed=seed, jobs=jobs))
    reports.append(check_sup_ks(seed=seed, jobs=jobs))
    reports.append(check_gc_rate(seed=seed))
    return reports


# -- reference suite --------------------------------------------------------


def check_reference_bridge_covariance(
    times=REF_TIMES,
    reps: int = REF_REPS,
    seed: int | None = None,
    tol: float = REF_BRIDGE_TOL,
) -> StatReport:
    rng = RngStream(_seed("reference_bridge", seed), 1)
    m = 4
    values = brownian_bridge_values(m, reps, rng)
    idx = [int(round(t * m)) for t in times]
    _, report = stats.covariance_report(
        values[:, idx], times, tol=tol, name="reference_bridge_covariance"
    )
    return report


def check_reference_motion_covariance(
    times=(0.25, 0.75, 1.0),
    reps: int = REF_REPS,
    seed: int | None = None,
    tol: float = REF_MOTION_TOL,
) -> StatReport:
    rng = RngStream(_seed("reference_motion", seed), 1)
    m = 4
    values = brownian_motion_values(m, reps, rng)
    idx = [int(round(t * m)) for t in times]
    t = np.asarray(times)
    target = np.minimum.outer(t, t)
    _, report = stats.covariance_report(
        values[:, idx], times, target=target, tol=tol, name="reference_motion_covariance"
    )
    return report


def check_reference_endpoint(
    reps: int = 1000, m: int = 64, seed: int | None = None
) -> StatReport:
    rng = RngStream(_seed("reference_endpoint", seed), 1)
    values = brownian_bridge_values(m, reps, rng)
    worst = float(np.abs(values[:, -1]).max())
    return stats.report_bound("reference_bridge_endpoint", worst, 0.0, reps)


def reference_suite(seed: int | None = None, jobs: int = 1) -> list[StatReport]:
    return [
        check_reference_bridge_covariance(seed=seed),
        check_reference_motion_covariance(seed=seed),
        check_reference_endpoint(seed=seed),
    ]


# -- front door -------------------------------------------------------------

SUITES = {
    "coupling": coupling_suite,
    "duchon": duchon_suite,
    "empirical": empirical_suite,
    "reference": reference_suite,
}


def run_suite(name: str, seed: int | None = None, jobs: int = 1) -> list[StatReport]:
    """Run one named suite (or 'all'); unknown names raise KeyError."""
    if name == "all":
        reports = []
        for suite in ("coupling", "duchon", "empirical", "reference"):
            reports.extend(SUITES[suite](seed=seed, jobs=jobs))
        return reports
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](seed=seed, jobs=jobs)
