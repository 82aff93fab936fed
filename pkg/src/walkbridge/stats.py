"""Statistical machinery: exact enumeration laws, goodness-of-fit tests,
distances, and self-describing pass/fail reports.

Numeric conventions, fixed here once: chi-square p-values come from the
regularized incomplete gamma, two-sample KS p-values from the asymptotic
Kolmogorov series (accurate for sample sizes >= ~1000), and enumeration
laws are computed in exact rational arithmetic before conversion to float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import special

_COMPARISONS = {
    "<=": lambda s, t: s <= t,
    "<": lambda s, t: s < t,
    ">": lambda s, t: s > t,
    ">=": lambda s, t: s >= t,
}


@dataclass(frozen=True)
class StatReport:
    """One named check: statistic, threshold, and the resulting verdict.

    ``passed`` is always ``comparison(statistic, threshold)``; for p-value
    style checks the statistic field holds the test statistic and the
    p-value is compared instead (stored in ``pvalue``).
    """

    name: str
    statistic: float
    threshold: float
    passed: bool
    pvalue: float | None = None
    n_samples: int = 0
    comparison: str = "<="
    metadata: dict[str, str] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "pvalue": self.pvalue,
            "threshold": self.threshold,
            "n_samples": self.n_samples,
            "passed": self.passed,
            "metadata": dict(self.metadata),
        }


def report_pvalue(
    name: str, statistic: float, pvalue: float, level: float, n_samples: int, **meta
) -> StatReport:
    """Check passes when pvalue > level."""
    return StatReport(
        name=name,
        statistic=float(statistic),
        threshold=float(level),
        passed=bool(pvalue > level),
        pvalue=float(pvalue),
        n_samples=int(n_samples),
        comparison=">",
        metadata={k: str(v) for k, v in meta.items()},
    )


def report_bound(
    name: str,
    statistic: float,
    bound: float,
    n_samples: int,
    comparison: str = "<=",
    **meta,
) -> StatReport:
    """Check passes when ``comparison(statistic, bound)`` holds."""
    ok = _COMPARISONS[comparison](float(statistic), float(bound))
    return StatReport(
        name=name,
        statistic=float(statistic),
        threshold=float(bound),
        passed=bool(ok),
        pvalue=None,
        n_samples=int(n_samples),
        comparison=comparison,
        metadata={k: str(v) for k, v in meta.items()},
    )


@dataclass(frozen=True)
class DiscreteLaw:
    """Finite discrete law over opaque outcome keys.

    ``exact`` optionally carries the rational probabilities the float
    vector was derived from.
    """

    outcomes: tuple
    probabilities: np.ndarray
    exact: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=np.float64)
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        if len(self.outcomes) != probs.size:
            raise ValueError("outcomes and probabilities must align")
        if probs.size and probs.min() < 0:
            raise ValueError("probabilities must be non-negative")
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1 within 1e-12")

    def index(self) -> dict:
        return {o: i for i, o in enumerate(self.outcomes)}


def compositions(total: int, parts: int):
    """All tuples of `parts` non-negative integers summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def multinomial_coefficient_sum(s: int, n: int) -> int:
    """Exact integer sum of s!/prod(a_i!) over compositions of s into n parts.

    Equals n**s (multinomial theorem); used as an enumeration cross-check.
    """
    fact_s = math.factorial(s)
    total = 0
    for comp in compositions(s, n):
        denom = 1
        for a in comp:
            denom *= math.factorial(a)
        total += fact_s // denom
    return total


def enumerate_multinomial_law(total: int, n_cells: int, max_outcomes: int = 10**6) -> DiscreteLaw:
    """Exact Mult(total, 1/n, ..., 1/n) over all count vectors, as Fractions."""
    n_out = math.comb(total + n_cells - 1, n_cells - 1)
    if n_out > max_outcomes:
        raise ValueError(f"state space too large: {n_out} outcomes")
    fact_total = math.factorial(total)
    denom_pow = Fraction(1, n_cells**total)
    outcomes = []
    exact = []
    for comp in compositions(total, n_cells):
        coef = fact_total
        for a in comp:
            coef //= math.factorial(a)
        outcomes.append(comp)
        exact.append(coef * denom_pow)
    probs = np.array([float(p) for p in exact])
    return DiscreteLaw(outcomes=tuple(outcomes), probabilities=probs, exact=tuple(exact))


def binomial_law(m: int, p_num: int, p_den: int) -> DiscreteLaw:
    """Exact Binomial(m, p_num/p_den) over outcomes 0..m."""
    p = Fraction(p_num, p_den)
    exact = [math.comb(m, k) * p**k * (1 - p) ** (m - k) for k in range(m + 1)]
    probs = np.array([float(q) for q in exact])
    return DiscreteLaw(outcomes=tuple(range(m + 1)), probabilities=probs, exact=tuple(exact))


def _align_counts(observed, law: DiscreteLaw) -> np.ndarray:
    if isinstance(observed, dict):
        idx = law.index()
        counts = np.zeros(len(law.outcomes), dtype=np.float64)
        extra = 0.0
        for key, c in observed.items():
            if key in idx:
                counts[idx[key]] = c
            else:
                extra += c
        if extra:
            raise ValueError(f"{extra:.0f} observations fall outside the law's support")
        return counts
    counts = np.asarray(observed, dtype=np.float64)
    if counts.size != len(law.outcomes):
        raise ValueError("observed counts do not align with the law's outcomes")
    return counts


def _merge_small_bins(observed: np.ndarray, expected: np.ndarray, min_expected: float = 5.0):
    """Greedily merge the two smallest-expected bins until all >= min_expected."""
    obs = list(observed)
    exp = list(expected)
    while len(exp) > 1 and min(exp) < min_expected:
        order = sorted(range(len(exp)), key=lambda i: (exp[i], i))
        i, j = sorted(order[:2])
        exp[i] += exp.pop(j)
        obs[i] += obs.pop(j)
    return np.array(obs), np.array(exp)


def chi_square_gof(observed, law: DiscreteLaw, level: float = 0.01, name: str = "chi_square_gof") -> StatReport:
    """Pearson goodness-of-fit of observed counts against an exact law.

    Bins with expected count < 5 are merged (smallest first, deterministic)
    before computing the statistic; p-value is the chi-square upper tail.
    """
    counts = _align_counts(observed, law)
    n = float(counts.sum())
    if n <= 0:
        raise ValueError("no observations")
    expected = law.probabilities * n
    obs, exp = _merge_small_bins(counts, expected)
    if exp.size < 2:
        raise ValueError("degenerate test: fewer than 2 bins after merging")
    stat = float(((obs - exp) ** 2 / exp).sum())
    df = exp.size - 1
    pvalue = float(special.gammaincc(df / 2.0, stat / 2.0))
    return report_pvalue(name, stat, pvalue, level, int(n), df=df, bins=exp.size)


def chi_square_two_sample(
    counts_a, counts_b, level: float = 0.01, name: str = "chi_square_two_sample"
) -> StatReport:
    """Pearson homogeneity test for two count vectors over shared outcomes.

    Accepts aligned arrays or outcome->count dicts (aligned over the union).
    """
    if isinstance(counts_a, dict) or isinstance(counts_b, dict):
        keys = sorted(set(counts_a) | set(counts_b))
        a = np.array([counts_a.get(k, 0) for k in keys], dtype=np.float64)
        b = np.array([counts_b.get(k, 0) for k in keys], dtype=np.float64)
    else:
        a = np.asarray(counts_a, dtype=np.float64)
        b = np.asarray(counts_b, dtype=np.float64)
        if a.size != b.size:
            raise ValueError("count vectors must align")
    na, nb = float(a.sum()), float(b.sum())
    if na <= 0 or nb <= 0:
        raise ValueError("both samples must be non-empty")
    # shared deterministic merge, driven by the pooled frequencies, until
    # the expected count clears 5 in the smaller sample
    pooled = (a + b) / (na + nb)
    obs_a_l = list(a)
    obs_b_l = list(b)
    exp_l = list(pooled)
    min_n = min(na, nb)
    while len(exp_l) > 1 and min(exp_l) * min_n < 5.0:
        idx = sorted(range(len(exp_l)), key=lambda i: (exp_l[i], i))
        i, j = sorted(idx[:2])
        exp_l[i] += exp_l.pop(j)
        obs_a_l[i] += obs_a_l.pop(j)
        obs_b_l[i] += obs_b_l.pop(j)
    if len(exp_l) < 2:
        raise ValueError("degenerate test: fewer than 2 bins after merging")
    stat = 0.0
    for obs_vec, n_tot in ((obs_a_l, na), (obs_b_l, nb)):
        for o, pf in zip(obs_vec, exp_l):
            e = pf * n_tot
            stat += (o - e) ** 2 / e
    df = len(exp_l) - 1
    pvalue = float(special.gammaincc(df / 2.0, stat / 2.0))
    return report_pvalue(name, stat, pvalue, level, int(na + nb), df=df, bins=len(exp_l))


def ks_statistic(samples: np.ndarray, cdf) -> float:
    """Exact one-sample KS distance sup |ECDF - cdf| for a callable cdf."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = x.size
    if n == 0:
        raise ValueError("empty sample")
    f = np.asarray(cdf(x), dtype=np.float64)
    i = np.arange(1, n + 1)
    return float(max((i / n - f).max(), (f - (i - 1) / n).max(), 0.0))


def ks_two_sample(a, b, level: float = 0.01, name: str = "ks_two_sample") -> StatReport:
    """Two-sample KS test with the asymptotic Kolmogorov p-value."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    everything = np.concatenate((a, b))
    cdf_a = np.searchsorted(a, everything, side="right") / a.size
    cdf_b = np.searchsorted(b, everything, side="right") / b.size
    stat = float(np.abs(cdf_a - cdf_b).max())
    en = math.sqrt(a.size * b.size / (a.size + b.size))
    pvalue = float(special.kolmogorov(en * stat))
    return report_pvalue(name, stat, pvalue, level, int(a.size + b.size))


def bridge_covariance(times) -> np.ndarray:
    """Target covariance min(s,t)*(1 - max(s,t)) on a list of times."""
    t = np.asarray(times, dtype=np.float64)
    return np.minimum.outer(t, t) * (1.0 - np.maximum.outer(t, t))


def covariance_report(
    paths,
    times,
    target: np.ndarray | None = None,
    tol: float = 0.01,
    name: str = "covariance",
) -> tuple[np.ndarray, StatReport]:
    """Empirical covariance at the given times against a target matrix.

    ``paths`` is either a sequence of GridFunction-like objects (anything
    with ``value_at``) or an ndarray of shape (reps, len(times)) already
    evaluated at ``times``.  Default target is the pinned-bridge covariance
    min(s,t)(1-max(s,t)).  Passes when max |empirical - target| <= tol.
    """
    times = np.asarray(times, dtype=np.float64)
    if isinstance(paths, np.ndarray):
        vals = paths
        if vals.shape[1] != times.size:
            raise ValueError("value matrix does not match times")
    else:
        vals = np.stack([np.asarray(p.value_at(times), dtype=np.float64) for p in paths])
    if vals.shape[0] < 2:
        raise ValueError("need an ensemble to estimate covariance")
    if target is None:
        target = bridge_covariance(times)
    emp = np.cov(vals, rowvar=False)
    emp = np.atleast_2d(emp)
    err = float(np.abs(emp - target).max())
    report = report_bound(name, err, tol, vals.shape[0], times=list(map(float, times)))
    return emp, report


def tv_distance(observed, law: DiscreteLaw) -> float:
    """Total variation (1/2) sum |phat - p| between counts and a law.

    ``observed`` is an aligned count array or an outcome->count dict; dict
    outcomes outside the law's support contribute their full mass.
    """
    if isinstance(observed, dict):
        idx = law.index()
        counts = np.zeros(len(law.outcomes), dtype=np.float64)
        extra = 0.0
        for key, c in observed.items():
            if key in idx:
                counts[idx[key]] = c
            else:
                extra += c
        total = float(counts.sum() + extra)
        if total <= 0:
            raise ValueError("no observations")
        return float(0.5 * (np.abs(counts / total - law.probabilities).sum() + extra / total))
    counts = np.asarray(observed, dtype=np.float64)
    if counts.size != len(law.outcomes):
        raise ValueError("observed counts do not align with the law's outcomes")
    total = float(counts.sum())
    if total <= 0:
        raise ValueError("no observations")
    return float(0.5 * np.abs(counts / total - law.probabilities).sum())


def modulus_of_continuity(f, delta: float) -> float:
    """Largest |f(x) - f(y)| over grid pairs with |x - y| <= delta.

    Works on the grid values; for piecewise-linear grid functions with
    delta a multiple of the grid step this equals the continuum modulus.
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    values = np.asarray(f.values, dtype=np.float64)
    m = f.m
    window = int(math.floor(delta * m + 1e-12))
    if window <= 0:
        return 0.0
    best = 0.0
    for lag in range(1, window + 1):
        d = float(np.abs(values[lag:] - values[:-lag]).max())
        if d > best:
            best = d
    return best
