"""Observed/expected distance samples and the three agreement measures.

Observed distances compare annotations of the same item from different
annotators; expected distances compare annotations of different items and
estimate the chance level. Measures:

  alpha  = 1 - mean(observed) / mean(expected); 1 perfect, 0 chance, < 0 worse.
  sigma  = fraction of observed distances d with CDF_expected(d) < p, the CDF
           estimated by Gaussian KDE; a lower bound on the share of
           annotation pairs distinguishable from chance.
  ks     = one-sided two-sample Kolmogorov-Smirnov test that observed
           distances are stochastically smaller; the measure is 1 - p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dataset import AnnotationRecord, Dataset, validate_dataset
from .errors import DataError, NumericError
from .kde import KdeModel, fit_kde, kde_cdf
from .registry import DistanceSpec

HISTOGRAM_BINS = 50


@dataclass(frozen=True)
class DistanceSamples:
    observed: np.ndarray
    expected: np.ndarray
    distance_name: str
    de_sample_size: int
    seed: int
    # (number of observed pairs, number of cross-item pairs available)
    pair_counts: tuple[int, int]

    def __post_init__(self) -> None:
        for name in ("observed", "expected"):
            arr = np.asarray(getattr(self, name), dtype=float).ravel()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
            if arr.size and arr.min() < 0:
                raise DataError(f"{name} distances contain negative values")


def observed_pairs(dataset: Dataset) -> list[tuple[AnnotationRecord, AnnotationRecord]]:
    """All unordered same-item pairs from distinct annotators, in canonical order."""
    by_item: dict[str, list[AnnotationRecord]] = {}
    for rec in dataset.records:
        by_item.setdefault(rec.item_id, []).append(rec)
    pairs = []
    for item_id in sorted(by_item):
        recs = sorted(by_item[item_id], key=lambda r: r.annotator_id)
        for i in range(len(recs)):
            for j in range(i + 1, len(recs)):
                pairs.append((recs[i], recs[j]))
    if not pairs:
        raise DataError("no observed pairs: no item has two or more annotations")
    return pairs


def count_expected_pairs(dataset: Dataset, exclude_same_annotator: bool = False) -> int:
    n = len(dataset.records)
    total = n * (n - 1) // 2
    per_item: dict[str, int] = {}
    per_annotator: dict[str, int] = {}
    for rec in dataset.records:
        per_item[rec.item_id] = per_item.get(rec.item_id, 0) + 1
        per_annotator[rec.annotator_id] = per_annotator.get(rec.annotator_id, 0) + 1
    total -= sum(c * (c - 1) // 2 for c in per_item.values())
    if exclude_same_annotator:
        # (item, annotator) uniqueness means same-annotator pairs are all cross-item
        total -= sum(c * (c - 1) // 2 for c in per_annotator.values())
    return total


def expected_pairs(
    dataset: Dataset,
    sample_size: int,
    seed: int,
    exclude_same_annotator: bool = False,
) -> list[tuple[AnnotationRecord, AnnotationRecord]]:
    """Uniform sample, without replacement, of cross-item annotation pairs.

    Returns every available pair when sample_size covers them all. The result
    is deterministic given the seed and sorted canonically.
    """
    records = dataset.records
    n = len(records)
    if len({r.item_id for r in records}) < 2:
        raise DataError("expected pairs require at least two items")
    available = count_expected_pairs(dataset, exclude_same_annotator)
    if available <= 0:
        raise DataError("no cross-item pairs available")

    def admissible(i: int, j: int) -> bool:
        if records[i].item_id == records[j].item_id:
            return False
        if exclude_same_annotator and records[i].annotator_id == records[j].annotator_id:
            return False
        return True

    rng = np.random.default_rng(seed)
    total_pairs = n * (n - 1) // 2
    want = min(int(sample_size), available)

    if want >= available or total_pairs <= 2_000_000:
        idx_pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if admissible(i, j)]
        if want < available:
            chosen = rng.choice(len(idx_pairs), size=want, replace=False)
            idx_pairs = [idx_pairs[t] for t in sorted(chosen)]
    else:
        # rejection-sample linear indices of the i<j triangle; dataset is too
        # large to enumerate all pairs in memory
        picked: set[int] = set()
        out: list[tuple[int, int]] = []
        while len(out) < want:
            batch = rng.integers(0, total_pairs, size=max(1024, 2 * (want - len(out))))
            for t in batch.tolist():
                if t in picked:
                    continue
                i = int((1 + math.isqrt(1 + 8 * t)) // 2)
                j = t - i * (i - 1) // 2
                if admissible(j, i):
                    picked.add(t)
                    out.append((j, i))
                    if len(out) >= want:
                        break
        idx_pairs = sorted(out)
    return [(records[i], records[j]) for i, j in idx_pairs]


def build_samples(
    dataset: Dataset,
    spec: DistanceSpec,
    de_sample_size: Optional[int] = None,
    seed: int = 0,
    exclude_same_annotator: bool = False,
) -> DistanceSamples:
    """Evaluate the distance over observed and sampled expected pairs.

    de_sample_size defaults to min(10 * observed pairs, all available) so the
    chance estimate's sampling error stays small relative to the observed side.
    """
    obs_pairs = observed_pairs(dataset)
    available = count_expected_pairs(dataset, exclude_same_annotator)
    if de_sample_size is None:
        de_sample_size = min(10 * len(obs_pairs), available)
    exp_pairs = expected_pairs(dataset, de_sample_size, seed, exclude_same_annotator)
    observed = np.array([spec.fn(a.payload, b.payload) for a, b in obs_pairs])
    expected = np.array([spec.fn(a.payload, b.payload) for a, b in exp_pairs])
    return DistanceSamples(
        observed=observed,
        expected=expected,
        distance_name=spec.name,
        de_sample_size=len(exp_pairs),
        seed=seed,
        pair_counts=(len(obs_pairs), available),
    )


def krippendorff_alpha(samples: DistanceSamples) -> float:
    """1 - mean(observed) / mean(expected); reported even when negative."""
    if samples.observed.size == 0 or samples.expected.size == 0:
        raise DataError("alpha requires nonempty observed and expected samples")
    mean_e = float(samples.expected.mean())
    if mean_e <= 0:
        raise NumericError("degenerate expected distances: mean is zero")
    return 1.0 - float(samples.observed.mean()) / mean_e


def fit_expected_kde(
    samples: DistanceSamples,
    bounds: Optional[tuple[float, float]] = (0.0, 1.0),
    bandwidth: Optional[float] = None,
) -> KdeModel:
    return fit_kde(samples.expected, bounds=bounds, bandwidth=bandwidth)


def sigma_measure(
    samples: DistanceSamples,
    p: float = 0.05,
    bounds: Optional[tuple[float, float]] = (0.0, 1.0),
    bandwidth: Optional[float] = None,
) -> float:
    """Fraction of observed distances below the p-tail of the expected KDE."""
    if samples.observed.size == 0 or samples.expected.size == 0:
        raise DataError("sigma requires nonempty observed and expected samples")
    model = fit_expected_kde(samples, bounds=bounds, bandwidth=bandwidth)
    cdf = kde_cdf(model, samples.observed)
    return float(np.mean(cdf < p))


def ks_statistic(observed: np.ndarray, expected: np.ndarray) -> float:
    """One-sided statistic: sup_x ECDF_observed(x) - ECDF_expected(x)."""
    obs = np.sort(np.asarray(observed, dtype=float))
    exp = np.sort(np.asarray(expected, dtype=float))
    xs = np.concatenate([obs, exp])
    f_obs = np.searchsorted(obs, xs, side="right") / obs.size
    f_exp = np.searchsorted(exp, xs, side="right") / exp.size
    return float(np.max(f_obs - f_exp))


@dataclass(frozen=True)
class KsResult:
    statistic: float
    pvalue: float
    measure: float


def ks_measure(samples: DistanceSamples, n_permutations: int = 0) -> KsResult:
    """One-sided KS test of observed stochastically smaller than expected.

    p defaults to the asymptotic exp(-2 m n D^2 / (m + n)); with
    n_permutations > 0 it is a pooled permutation estimate instead. The
    measure is exactly 1 - p.
    """
    if samples.observed.size == 0 or samples.expected.size == 0:
        raise DataError("ks requires nonempty observed and expected samples")
    m, n = samples.observed.size, samples.expected.size
    stat = ks_statistic(samples.observed, samples.expected)
    if n_permutations > 0:
        p = _permutation_pvalue(samples, stat, n_permutations)
    else:
        p = math.exp(-2.0 * m * n * stat * stat / (m + n))
        p = min(1.0, max(0.0, p))
    return KsResult(statistic=stat, pvalue=p, measure=1.0 - p)


def _permutation_pvalue(samples: DistanceSamples, stat: float, n_permutations: int) -> float:
    m = samples.observed.size
    pooled = np.sort(np.concatenate([samples.observed, samples.expected]))
    total = pooled.size
    # right boundaries of runs of tied values; the ECDF difference can only
    # peak there, and which tied slots belong to which sample cannot matter
    boundary = np.ones(total, dtype=bool)
    boundary[:-1] = pooled[:-1] != pooled[1:]
    rng = np.random.default_rng([samples.seed, 0x4B53])
    exceed = 0
    done = 0
    while done < n_permutations:
        batch = min(1000, n_permutations - done)
        is_obs = np.argsort(rng.random((batch, total)), axis=1) < m
        cum_obs = np.cumsum(is_obs, axis=1)
        positions = np.arange(1, total + 1)
        diffs = cum_obs / m - (positions - cum_obs) / (total - m)
        stats = diffs[:, boundary].max(axis=1)
        exceed += int(np.sum(stats >= stat - 1e-12))
        done += batch
    return (1 + exceed) / (n_permutations + 1)


def histogram(values: np.ndarray, lo: float, hi: float) -> list[list[float]]:
    """Fixed 50-bin histogram over [lo, hi] as [bin_lo, bin_hi, count] rows."""
    if hi <= lo:
        hi = lo + 1e-9
    counts, edges = np.histogram(values, bins=HISTOGRAM_BINS, range=(lo, hi))
    return [
        [float(edges[i]), float(edges[i + 1]), int(counts[i])]
        for i in range(HISTOGRAM_BINS)
    ]


def _local_maxima_over(counts: Sequence[int], threshold: float) -> int:
    """Number of plateau-collapsed local maxima with count above the threshold."""
    runs: list[int] = []
    for c in counts:
        if not runs or runs[-1] != c:
            runs.append(int(c))
    peaks = 0
    for i, c in enumerate(runs):
        left = runs[i - 1] if i > 0 else -1
        right = runs[i + 1] if i + 1 < len(runs) else -1
        if c > left and c > right and c > threshold:
            peaks += 1
    return peaks


def diagnostics_flags(
    observed_hist: list[list[float]], expected_hist: list[list[float]]
) -> list[str]:
    """Pathology flags over the shared-range histograms.

    expected_mode_low: the expected mode sits in the lowest decile of bins,
    so the chance distribution piles up near zero distance. observed_mode_high:
    the observed mode sits in the highest decile. *_multimodal: two or more
    local maxima each hold over 10% of that sample.
    """
    flags = []
    obs_counts = [row[2] for row in observed_hist]
    exp_counts = [row[2] for row in expected_hist]
    decile = HISTOGRAM_BINS // 10
    if sum(exp_counts) and max(exp_counts) and exp_counts.index(max(exp_counts)) < decile:
        flags.append("expected_mode_low")
    if sum(obs_counts) and max(obs_counts) and obs_counts.index(max(obs_counts)) >= HISTOGRAM_BINS - decile:
        flags.append("observed_mode_high")
    if _local_maxima_over(obs_counts, 0.1 * sum(obs_counts)) >= 2:
        flags.append("observed_multimodal")
    if _local_maxima_over(exp_counts, 0.1 * sum(exp_counts)) >= 2:
        flags.append("expected_multimodal")
    return flags


@dataclass(frozen=True)
class AgreementReport:
    alpha: float
    sigma: float
    ks_statistic: float
    ks_pvalue: float
    ks_measure: float
    p_threshold: float
    diagnostics: tuple[str, ...]
    observed_hist: tuple
    expected_hist: tuple
    distance_name: str
    distance_params: dict
    counts: dict
    seed: int

    def to_dict(self) -> dict:
        return {
            "distance": {"name": self.distance_name, "params": dict(self.distance_params)},
            "alpha": self.alpha,
            "sigma": self.sigma,
            "ks": {
                "statistic": self.ks_statistic,
                "pvalue": self.ks_pvalue,
                "measure": self.ks_measure,
            },
            "p_threshold": self.p_threshold,
            "counts": dict(self.counts),
            "diagnostics": list(self.diagnostics),
            "histograms": {
                "observed": [list(row) for row in self.observed_hist],
                "expected": [list(row) for row in self.expected_hist],
            },
            "seed": self.seed,
        }


def agreement_report(
    dataset: Dataset,
    spec: DistanceSpec,
    p: float = 0.05,
    de_sample_size: Optional[int] = None,
    seed: int = 0,
    bandwidth: Optional[float] = None,
    n_permutations: int = 0,
    exclude_same_annotator: bool = False,
) -> AgreementReport:
    """Full pipeline: pairs, distances, alpha, sigma, KS, and diagnostics."""
    summary = validate_dataset(dataset.records, dataset.meta)
    samples = build_samples(
        dataset,
        spec,
        de_sample_size=de_sample_size,
        seed=seed,
        exclude_same_annotator=exclude_same_annotator,
    )
    bounds = (0.0, spec.upper_bound) if spec.upper_bound is not None else None
    alpha = krippendorff_alpha(samples)
    sigma = sigma_measure(samples, p=p, bounds=bounds, bandwidth=bandwidth)
    ks = ks_measure(samples, n_permutations=n_permutations)

    pooled_lo = float(min(samples.observed.min(), samples.expected.min()))
    pooled_hi = float(max(samples.observed.max(), samples.expected.max()))
    obs_hist = histogram(samples.observed, pooled_lo, pooled_hi)
    exp_hist = histogram(samples.expected, pooled_lo, pooled_hi)
    flags = diagnostics_flags(obs_hist, exp_hist)

    return AgreementReport(
        alpha=alpha,
        sigma=sigma,
        ks_statistic=ks.statistic,
        ks_pvalue=ks.pvalue,
        ks_measure=ks.measure,
        p_threshold=p,
        diagnostics=tuple(flags),
        observed_hist=tuple(tuple(row) for row in obs_hist),
        expected_hist=tuple(tuple(row) for row in exp_hist),
        distance_name=spec.name,
        distance_params=dict(spec.params),
        counts={
            "items": summary.items,
            "annotators": summary.annotators,
            "annotations": summary.annotations,
            "observed_pairs": samples.pair_counts[0],
            "expected_pairs_available": samples.pair_counts[1],
            "expected_pairs_used": int(samples.expected.size),
        },
        seed=seed,
    )
