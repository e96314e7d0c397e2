"""End-to-end explanation runs: perturb, probe, weight, fit, rank.

Also houses prior elicitation: turning explanations of similar instances
into a prior for the next one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .blackbox import PredictorHandle, with_class
from .errors import ConfigError, InvalidInputError, ShapeError
from .kernel import KernelConfig, apply_weights
from .perturb import PerturbConfig, build_perturbation_set
from .regression import PriorSpec, fit_surrogate, ridge_fit
from .types import Explanation, ExplanationEnsemble, Instance


@dataclass(frozen=True)
class LimeRidge:
    """Plain weighted-ridge surrogate with regularizer ``r``."""

    r: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.r) and self.r >= 0):
            raise ConfigError("ridge regularizer must be finite and >= 0")


@dataclass(frozen=True)
class BayLime:
    """Bayesian surrogate governed by a prior-knowledge spec."""

    prior: PriorSpec

    def __post_init__(self):
        if not isinstance(self.prior, PriorSpec):
            raise ConfigError("BayLime needs a PriorSpec")


@dataclass(frozen=True)
class ExplainConfig:
    """Everything one explanation run needs besides instance and predictor."""

    perturb: PerturbConfig
    kernel: KernelConfig
    surrogate: LimeRidge | BayLime
    target_class: int | None = None

    def __post_init__(self):
        if not isinstance(self.surrogate, (LimeRidge, BayLime)):
            raise ConfigError("surrogate must be LimeRidge or BayLime")
        if self.target_class is not None and self.target_class < 0:
            raise ConfigError("target_class must be non-negative")

    def with_seed(self, seed: int) -> "ExplainConfig":
        perturb = PerturbConfig(
            n=self.perturb.n, seed=seed,
            numeric_scale=self.perturb.numeric_scale,
            categorical_frequencies=self.perturb.categorical_frequencies,
            binary_off_values=self.perturb.binary_off_values,
        )
        return ExplainConfig(perturb, self.kernel, self.surrogate,
                             self.target_class)

    def with_n(self, n: int) -> "ExplainConfig":
        perturb = PerturbConfig(
            n=n, seed=self.perturb.seed,
            numeric_scale=self.perturb.numeric_scale,
            categorical_frequencies=self.perturb.categorical_frequencies,
            binary_off_values=self.perturb.binary_off_values,
        )
        return ExplainConfig(perturb, self.kernel, self.surrogate,
                             self.target_class)

    def with_kernel(self, kernel: KernelConfig) -> "ExplainConfig":
        return ExplainConfig(self.perturb, kernel, self.surrogate,
                             self.target_class)

    def with_surrogate(self, surrogate: LimeRidge | BayLime) -> "ExplainConfig":
        return ExplainConfig(self.perturb, self.kernel, surrogate,
                             self.target_class)


def explain(instance: Instance, predictor: PredictorHandle,
            config: ExplainConfig) -> Explanation:
    """Explain one instance: sample, probe, weight, fit, rank.

    The perturbation seed fully determines the run given the config, so
    repeating the call reproduces the explanation bit for bit.
    """
    handle = predictor
    if config.target_class is not None:
        handle = with_class(predictor, config.target_class)
    pset = build_perturbation_set(instance, config.perturb, handle)
    pset = apply_weights(pset, config.kernel, instance)
    notes: list[str] = []
    if pset.n < pset.m:
        notes.append(
            f"only {pset.n} samples for {pset.m} features; coefficients "
            f"lean on the prior or regularizer"
        )
    if isinstance(config.surrogate, LimeRidge):
        coefficients = ridge_fit(pset, config.surrogate.r)
        posterior = None
    else:
        posterior = fit_surrogate(pset, config.surrogate.prior)
        coefficients = posterior.mu_n
    return Explanation.from_coefficients(
        coefficients,
        kernel_width=config.kernel.resolved_width(pset.m),
        n_samples=pset.n,
        posterior=posterior,
        seed=config.perturb.seed,
        warnings=notes,
    )


def explain_repeated(instance: Instance, predictor: PredictorHandle,
                     config: ExplainConfig, k: int, *,
                     seed_base: int = 0) -> ExplanationEnsemble:
    """k runs differing only in seed (seed_base, seed_base+1, ...).

    Runs are ordered by seed in the returned ensemble.
    """
    if k < 2:
        raise ConfigError("repeated explanation needs k >= 2 runs")
    runs = [explain(instance, predictor, config.with_seed(seed_base + i))
            for i in range(k)]
    return ExplanationEnsemble(tuple(runs))


def elicit_prior(previous: ExplanationEnsemble | Iterable[Explanation], *,
                 alpha: float | None = None) -> PriorSpec:
    """Turn explanations of similar instances into a prior for the next one.

    The prior mean is the elementwise mean of the previous raw (signed,
    pre-normalization) coefficient vectors, since that is the scale the
    posterior combines it on. The prior precision is the number of previous
    explanations: each one counts as a pseudo-observation of the mean.
    Without ``alpha`` the result is a partial prior (noise precision still
    fitted); supplying ``alpha`` upgrades it to a full prior.
    """
    if isinstance(previous, ExplanationEnsemble):
        runs: Sequence[Explanation] = previous.runs
    else:
        runs = tuple(previous)
    if not runs:
        raise InvalidInputError("prior elicitation needs at least one "
                                "previous explanation")
    m = runs[0].m
    for run in runs[1:]:
        if run.m != m:
            raise ShapeError("previous explanations disagree on feature count")
    mu0 = np.mean([run.coefficients for run in runs], axis=0)
    lam = float(len(runs))
    if alpha is None:
        return PriorSpec.partial(mu0, lam)
    return PriorSpec.full(mu0, lam, alpha)
