"""Monte Carlo driver and statistics for torus-vs-RP^n intersection
counts under Haar-random isometries.

Each trial uses its own Philox stream derived from (seed, trial index,
retry index), so a run is a pure function of (n, samples, seed) and is
independent of any parallel execution schedule.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .bounds import expected_count, min_intersections
from .core import RngState, haar_unitary
from .counting import (
    clifford_quadric_system,
    count_clifford_multistart,
    count_conic_pencil,
)
from .errors import BudgetExceededError, DegenerateError, InsufficientCellsError

MAX_RESAMPLES = 100

# stream layout: low 32 bits trial index, bits 32..47 retry counter,
# bit 48 distinguishes the Haar draw from the Newton-start draw
_RETRY_SHIFT = 32
_PURPOSE_SHIFT = 48


@dataclass
class Tally:
    """Histogram of intersection counts over a Monte Carlo run."""

    n: int
    samples: int
    histogram: dict = field(default_factory=dict)
    degenerate_resamples: int = 0
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "degenerate_resamples": self.degenerate_resamples,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass
class DistributionReport:
    """Estimated intersection-count law with Wilson intervals and the
    derived surplusection statistics."""

    n: int
    probabilities: dict  # count -> (estimate, wilson_lo, wilson_hi)
    mean: float
    mean_se: float
    expected_mean: float
    mean_surplusection: float
    ss_locus_measure: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "probabilities": {
                str(k): {"estimate": p, "wilson95": [lo, hi]}
                for k, (p, lo, hi) in sorted(self.probabilities.items())
            },
            "mean": self.mean,
            "mean_se": self.mean_se,
            "expected_mean": self.expected_mean,
            "mean_surplusection": self.mean_surplusection,
            "ss_locus_measure": self.ss_locus_measure,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _trial_stream(k: int, retry: int, purpose: int = 0) -> int:
    return k | (retry << _RETRY_SHIFT) | (purpose << _PURPOSE_SHIFT)


def clifford_count_trial(
    n: int, seed: int, k: int, retry: int = 0, starts_per_dim: int = 200
) -> int:
    """One certified-transverse count for trial (seed, k, retry); raises
    DegenerateError when the sampled isometry is numerically non-generic."""
    g = haar_unitary(n + 1, RngState(seed, _trial_stream(k, retry, 0)))
    sys = clifford_quadric_system(g)
    if n == 2:
        return count_conic_pencil(sys).count
    rng = RngState(seed, _trial_stream(k, retry, 1))
    return count_clifford_multistart(sys, starts_per_dim=starts_per_dim, rng=rng).count


def _run_range(n: int, seed: int, lo: int, hi: int, starts_per_dim: int) -> Tally:
    """Tally over the trial-index range [lo, hi)."""
    histogram: dict[int, int] = {}
    resamples = 0
    for k in range(lo, hi):
        for retry in range(MAX_RESAMPLES + 1):
            try:
                count = clifford_count_trial(n, seed, k, retry, starts_per_dim)
                break
            except DegenerateError:
                resamples += 1
        else:
            raise BudgetExceededError(f"trial {k} exceeded {MAX_RESAMPLES} resamples")
        histogram[count] = histogram.get(count, 0) + 1
    return Tally(
        n=n,
        samples=hi - lo,
        histogram=histogram,
        degenerate_resamples=resamples,
        seed=seed,
    )


def _run_range_star(args) -> Tally:
    return _run_range(*args)


def run_clifford_trials(
    n: int, samples: int, seed: int, starts_per_dim: int = 200, threads: int = 1
) -> Tally:
    """Tally of #(torus intersect g RP^n) over Haar samples.

    Degenerate trials are resampled from a fresh derived stream (and
    disclosed in the tally) rather than discarded, so the sample size
    stays exact.  Trials parallelise over the stream index, so the
    result is identical for any thread count.
    """
    if not (1 <= n <= 4):
        raise ValueError("supported dimensions are 1 <= n <= 4")
    if samples < 1 or samples >= 2**32:
        raise ValueError("samples must be in [1, 2^32)")
    if threads < 1:
        raise ValueError("threads must be >= 1")
    if threads == 1 or samples < 2 * threads:
        return _run_range(n, seed, 0, samples, starts_per_dim)
    from concurrent.futures import ProcessPoolExecutor

    edges = np.linspace(0, samples, threads + 1, dtype=int)
    jobs = [
        (n, seed, int(lo), int(hi), starts_per_dim)
        for lo, hi in zip(edges[:-1], edges[1:])
        if hi > lo
    ]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(_run_range_star, jobs))
    tally = parts[0]
    for part in parts[1:]:
        tally = merge_tallies(tally, part)
    return tally


def merge_tallies(a: Tally, b: Tally) -> Tally:
    """Commutative merge of two tallies from disjoint stream ranges."""
    if a.n != b.n or a.seed != b.seed:
        raise ValueError("tallies come from different runs")
    hist = dict(a.histogram)
    for key, val in b.histogram.items():
        hist[key] = hist.get(key, 0) + val
    return Tally(
        n=a.n,
        samples=a.samples + b.samples,
        histogram=hist,
        degenerate_resamples=a.degenerate_resamples + b.degenerate_resamples,
        seed=a.seed,
    )


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """Wilson 95% score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (phat + z2 / (2 * trials)) / denom
    half = (
        z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    )
    return max(0.0, centre - half), min(1.0, centre + half)


def distribution_report(tally: Tally) -> DistributionReport:
    """Probabilities with Wilson intervals, empirical mean with its
    standard error, the closed-form expected mean, and the empirical
    surplusection statistics (excess over the minimal count)."""
    if tally.samples < 1 or not tally.histogram:
        raise ValueError("tally is empty")
    total = sum(tally.histogram.values())
    probabilities = {}
    for count, occ in tally.histogram.items():
        lo, hi = wilson_interval(occ, total)
        probabilities[count] = (occ / total, lo, hi)
    counts = np.array(sorted(tally.histogram))
    occs = np.array([tally.histogram[c] for c in counts], dtype=float)
    mean = float((counts * occs).sum() / total)
    var = float(((counts - mean) ** 2 * occs).sum() / max(1, total - 1))
    mean_se = math.sqrt(var / total)
    minimal = min_intersections(tally.n)
    ss_measure = float(occs[counts > minimal].sum() / total)
    return DistributionReport(
        n=tally.n,
        probabilities=probabilities,
        mean=mean,
        mean_se=mean_se,
        expected_mean=expected_count(tally.n),
        mean_surplusection=mean - minimal,
        ss_locus_measure=ss_measure,
    )


def chi_square_consistency(tally: Tally, reference: dict) -> float:
    """Pearson chi-square p-value of the tally against a reference law
    given as {count: probability}."""
    if abs(sum(reference.values()) - 1.0) > 1e-9:
        raise ValueError("reference probabilities must sum to 1")
    total = sum(tally.histogram.values())
    keys = sorted(set(tally.histogram) | set(reference))
    observed = np.array([tally.histogram.get(k, 0) for k in keys], dtype=float)
    expected = np.array([reference.get(k, 0.0) * total for k in keys])
    if np.any(expected < 5.0):
        raise InsufficientCellsError(
            "expected cell counts below 5; increase the sample size"
        )
    chi2 = float(((observed - expected) ** 2 / expected).sum())
    return float(sps.chi2.sf(chi2, df=len(keys) - 1))
