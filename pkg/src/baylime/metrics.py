"""Evaluation measures for explanation quality.

Two questions are answered about an explainer on a given instance:

* how consistent are repeated explanations that differ only in sampling
  seed? Measured by an importance-weighted index of dispersion of the
  per-feature ranks, plus Kendall's coefficient of concordance W;
* how robust is the explanation to the kernel-width setting? Measured by
  the median, over sampled width pairs (l1, l2), of
  ||h(l1) - h(l2)||_2 / |l1 - l2|, where h(l) is the normalized importance
  vector produced at width l.

Both work on normalized importances, so they compare the direction of
explanations, not their regression scale.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

import numpy as np

from .blackbox import PredictorHandle, with_class
from .errors import ConfigError, FitError, UndefinedMetricError
from .explainer import BayLime, ExplainConfig, LimeRidge
from .kernel import KernelConfig, apply_weights
from .perturb import build_perturbation_set
from .regression import fit_surrogate, ridge_fit
from .types import (
    ExplanationEnsemble,
    Instance,
    PerturbationSet,
    normalize_coefficients,
)

# Width pairs closer than this fraction of the sampled range are redrawn;
# the ratio divides by |l1 - l2|.
PAIR_GAP_FRACTION = 1e-6


@dataclass(frozen=True)
class MetricReport:
    """Computed metric values; unset halves stay None/empty.

    ``robustness_r`` is the lower-middle order statistic of the sample
    ratios (for an even count the smaller of the two central values), so
    it is always one of the observed ratios.
    """

    inconsistency: float | None = None
    kendalls_w: float | None = None
    robustness_samples: tuple[tuple[float, float, float], ...] = ()
    robustness_r: float | None = None

    def __post_init__(self):
        if self.inconsistency is not None and self.inconsistency < 0:
            raise ConfigError("inconsistency cannot be negative")
        if self.kendalls_w is not None and not (
                -1e-9 <= self.kendalls_w <= 1 + 1e-9):
            raise ConfigError("kendalls_w must lie in [0, 1]")
        if self.robustness_r is not None and self.robustness_samples:
            ratios = [s[2] for s in self.robustness_samples]
            if self.robustness_r not in ratios:
                raise ConfigError("robustness_r must be one of the sample "
                                  "ratios")


def inconsistency(ensemble: ExplanationEnsemble) -> float:
    """Importance-weighted dispersion of feature ranks across runs.

    Per feature i: E(g_i) is the mean normalized importance over runs and
    IoD(f_i) the population variance of its ranks divided by their mean.
    The result is sum_i [E(g_i) / sum_j E(g_j)] * IoD(f_i), so disagreement
    about important features costs more than disagreement about marginal
    ones. Zero exactly when every feature keeps one rank in every run.

    Raises:
        UndefinedMetricError: every importance in every run is zero, so the
            weights have a zero normalizer.
    """
    importances = ensemble.importance_matrix()
    mean_importance = importances.mean(axis=0)
    total = float(mean_importance.sum())
    if total == 0.0:
        raise UndefinedMetricError(
            "all runs carry zero importances; rank weights are undefined"
        )
    ranks = ensemble.rank_matrix().astype(float)
    iod = ranks.var(axis=0) / ranks.mean(axis=0)
    return float(np.sum(mean_importance / total * iod))


def kendalls_w(ensemble: ExplanationEnsemble) -> float:
    """Kendall's coefficient of concordance over the per-run rankings.

    W = 12 S / (k^2 (m^3 - m) - k sum_j T_j), where S is the sum of squared
    deviations of per-feature rank sums from their mean and T_j the tie
    correction sum(t^3 - t) over tied groups in run j. 0 means no
    agreement, 1 complete agreement. When every run ties every feature the
    formula degenerates to 0/0; the runs are then identical, so 1 is
    returned.

    Raises:
        UndefinedMetricError: fewer than two features to rank.
    """
    if ensemble.m < 2:
        raise UndefinedMetricError("rank agreement needs at least two "
                                   "features")
    ranks = ensemble.rank_matrix().astype(float)
    k, m = ranks.shape
    rank_sums = ranks.sum(axis=0)
    s = float(np.sum((rank_sums - rank_sums.mean()) ** 2))
    ties = 0.0
    for row in ranks:
        _, counts = np.unique(row, return_counts=True)
        ties += float(np.sum(counts**3 - counts))
    denominator = k * k * (m**3 - m) - k * ties
    if denominator == 0.0:
        return 1.0
    w = 12.0 * s / denominator
    return float(min(max(w, 0.0), 1.0))


def width_pairs(pairs: int, bounds: tuple[float, float],
                seed: int) -> list[tuple[float, float]]:
    """Draw width pairs i.i.d. uniform on the bounds, no near-equal pairs.

    A pair whose gap is below 1e-6 of the range is discarded and redrawn,
    keeping the change ratio's denominator away from zero.
    """
    lo, up = float(bounds[0]), float(bounds[1])
    if not (np.isfinite(lo) and np.isfinite(up) and 0 < lo < up):
        raise ConfigError("width bounds must satisfy 0 < lower < upper")
    if pairs < 1:
        raise ConfigError("need at least one width pair")
    rng = np.random.default_rng(seed)
    gap = PAIR_GAP_FRACTION * (up - lo)
    out: list[tuple[float, float]] = []
    while len(out) < pairs:
        l1, l2 = rng.uniform(lo, up, size=2)
        if abs(l1 - l2) < gap:
            continue
        out.append((float(l1), float(l2)))
    return out


def _importances_at(pset: PerturbationSet, instance: Instance,
                    surrogate: LimeRidge | BayLime,
                    width: float) -> np.ndarray:
    weighted = apply_weights(pset, KernelConfig(width=width), instance)
    if isinstance(surrogate, LimeRidge):
        coefficients = ridge_fit(weighted, surrogate.r)
    else:
        coefficients = fit_surrogate(weighted, surrogate.prior).mu_n
    return np.abs(normalize_coefficients(coefficients))


def pair_ratio(pset: PerturbationSet, instance: Instance,
               surrogate: LimeRidge | BayLime, l1: float,
               l2: float) -> float:
    """Explanation change per unit of kernel-width change for one pair.

    Both widths reuse the same perturbation set, so only the weighting
    differs between the two fits.
    """
    h1 = _importances_at(pset, instance, surrogate, l1)
    h2 = _importances_at(pset, instance, surrogate, l2)
    return float(np.linalg.norm(h1 - h2) / abs(l1 - l2))


def robustness_from_pset(pset: PerturbationSet, instance: Instance,
                         surrogate: LimeRidge | BayLime,
                         pair_list: list[tuple[float, float]]) -> MetricReport:
    """Robustness over pre-sampled width pairs and a pre-built sample set.

    A fit failure at any pair aborts the sweep; the raised error carries
    the completed samples on its ``partial_samples`` attribute.
    """
    samples: list[tuple[float, float, float]] = []
    for l1, l2 in pair_list:
        try:
            ratio = pair_ratio(pset, instance, surrogate, l1, l2)
        except FitError as exc:
            exc.partial_samples = tuple(samples)
            raise
        samples.append((l1, l2, ratio))
    r = statistics.median_low([s[2] for s in samples])
    return MetricReport(robustness_samples=tuple(samples), robustness_r=r)


def robustness(instance: Instance, predictor: PredictorHandle,
               config: ExplainConfig, *, pairs: int = 100,
               bounds: tuple[float, float] = (0.2, 5.0),
               seed: int = 0) -> MetricReport:
    """Median sensitivity of the explanation to the kernel width.

    One perturbation set is drawn and probed (with the seed in
    ``config.perturb``), then refit at both widths of every sampled pair;
    the configured kernel width plays no role. ``seed`` drives only the
    width sampling.
    """
    handle = predictor
    if config.target_class is not None:
        handle = with_class(predictor, config.target_class)
    pset = build_perturbation_set(instance, config.perturb, handle)
    pair_list = width_pairs(pairs, bounds, seed)
    return robustness_from_pset(pset, instance, config.surrogate, pair_list)
