"""Core value types: instances, perturbation datasets and explanations.

Every container here is a frozen dataclass backed by read-only numpy arrays,
so instances are immutable after construction and safe to share across
threads. No algorithmic logic lives in this module beyond ranking and
coefficient normalization, which every other module depends on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import InvalidInputError, ShapeError

if TYPE_CHECKING:  # pragma: no cover
    from .regression import SurrogateFit

NUMERICAL = "numerical"
CATEGORICAL = "categorical"
BINARY_MASK = "binary_mask"
FEATURE_KINDS = (NUMERICAL, CATEGORICAL, BINARY_MASK)


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def rank_features(coefficients: Sequence[float] | np.ndarray) -> np.ndarray:
    """Rank features by coefficient magnitude, rank 1 = largest |value|.

    Ties are broken in favour of the lower feature index, so the result is
    deterministic. The all-zero vector is degenerate: every feature gets
    rank 1 (there is no ordering information to encode).

    Args:
        coefficients: length-m vector of finite reals.

    Returns:
        Integer array of length m with ``ranks[i]`` = rank of feature i.
    """
    c = np.asarray(coefficients, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise InvalidInputError("coefficients must be a non-empty 1-D vector")
    if not np.all(np.isfinite(c)):
        raise InvalidInputError("coefficients contain non-finite values")
    m = c.size
    if not c.any():
        return np.ones(m, dtype=int)
    # lexsort: last key is primary. Sort by descending |c|, then by index.
    order = np.lexsort((np.arange(m), -np.abs(c)))
    ranks = np.empty(m, dtype=int)
    ranks[order] = np.arange(1, m + 1)
    return ranks


def normalize_coefficients(coefficients: Sequence[float] | np.ndarray) -> np.ndarray:
    """Scale a coefficient vector to unit Euclidean norm (zero stays zero)."""
    c = np.asarray(coefficients, dtype=float)
    norm = float(np.linalg.norm(c))
    if norm == 0.0:
        return np.zeros_like(c)
    return c / norm


@dataclass(frozen=True)
class Instance:
    """A single point to explain: m feature values plus their kinds and names.

    Categorical features are pre-encoded as category indices; binary-mask
    features carry the "on" value of the feature.
    """

    values: np.ndarray
    feature_kinds: tuple[str, ...]
    feature_names: tuple[str, ...]

    def __post_init__(self):
        values = _frozen_array(self.values)
        kinds = tuple(self.feature_kinds)
        names = tuple(self.feature_names)
        if values.ndim != 1 or values.size == 0:
            raise InvalidInputError("instance needs at least one feature value")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("instance values must be finite")
        if len(kinds) != values.size or len(names) != values.size:
            raise ShapeError(
                f"values ({values.size}), feature_kinds ({len(kinds)}) and "
                f"feature_names ({len(names)}) must have equal length"
            )
        for kind in kinds:
            if kind not in FEATURE_KINDS:
                raise InvalidInputError(f"unknown feature kind {kind!r}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "feature_kinds", kinds)
        object.__setattr__(self, "feature_names", names)

    @property
    def m(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class PerturbationSet:
    """Perturbed samples in the interpretable space with labels and weights.

    ``rows`` is the n-by-m interpretable-representation matrix, ``labels``
    the black-box outputs for the matching original-space rows, ``weights``
    the proximity weights (the diagonal of the weighting matrix, each in
    (0, 1]). ``seed`` records the RNG seed the rows were drawn with.
    """

    rows: np.ndarray
    labels: np.ndarray
    weights: np.ndarray
    seed: int

    def __post_init__(self):
        rows = _frozen_array(self.rows)
        labels = _frozen_array(self.labels)
        weights = _frozen_array(self.weights)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise InvalidInputError("rows must be a non-empty n-by-m matrix")
        n = rows.shape[0]
        if labels.shape != (n,) or weights.shape != (n,):
            raise ShapeError(
                f"labels {labels.shape} and weights {weights.shape} must both "
                f"have shape ({n},)"
            )
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise InvalidInputError("weights must be finite and strictly positive")
        if int(self.seed) < 0:
            raise InvalidInputError("seed must be a non-negative integer")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def m(self) -> int:
        return self.rows.shape[1]

    def with_weights(self, weights: np.ndarray) -> "PerturbationSet":
        """Copy of this set with new weights; rows and labels untouched."""
        return PerturbationSet(self.rows, self.labels, weights, self.seed)


@dataclass(frozen=True)
class Explanation:
    """A fitted local explanation of one instance.

    ``coefficients`` is the raw signed coefficient vector from the surrogate;
    ``importances`` its unit-normalized magnitudes; ``ranks`` the magnitude
    ranking (1 = most important). ``posterior`` optionally carries the full
    surrogate fit backing the coefficients. ``seed`` and ``warnings`` record
    what is needed to reproduce and audit the run.
    """

    coefficients: np.ndarray
    importances: np.ndarray
    ranks: np.ndarray
    kernel_width: float
    n_samples: int
    posterior: "SurrogateFit | None" = None
    seed: int | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        coeffs = _frozen_array(self.coefficients)
        importances = _frozen_array(self.importances)
        ranks = _frozen_array(self.ranks, dtype=int)
        m = coeffs.size
        if m == 0 or coeffs.ndim != 1:
            raise InvalidInputError("coefficients must be a non-empty vector")
        if importances.shape != (m,) or ranks.shape != (m,):
            raise ShapeError("coefficients, importances and ranks must share length")
        sq = float(np.sum(importances**2))
        if coeffs.any():
            if abs(sq - 1.0) > 1e-9:
                raise InvalidInputError(
                    f"importances must form a unit vector (sum of squares {sq})"
                )
        elif sq != 0.0:
            raise InvalidInputError("zero coefficients require zero importances")
        if np.any(ranks < 1) or np.any(ranks > m):
            raise InvalidInputError("ranks must lie in [1, m]")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "importances", importances)
        object.__setattr__(self, "ranks", ranks)
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @classmethod
    def from_coefficients(cls, coefficients, *, kernel_width: float,
                          n_samples: int, posterior=None, seed=None,
                          warnings: Sequence[str] = ()) -> "Explanation":
        """Build an explanation, deriving importances and ranks."""
        coeffs = np.asarray(coefficients, dtype=float)
        importances = np.abs(normalize_coefficients(coeffs))
        ranks = rank_features(coeffs)
        return cls(coeffs, importances, ranks, float(kernel_width),
                   int(n_samples), posterior=posterior, seed=seed,
                   warnings=tuple(warnings))

    @property
    def m(self) -> int:
        return self.coefficients.size


@dataclass(frozen=True)
class ExplanationEnsemble:
    """k repeated explanations of one instance, identical apart from seeds."""

    runs: tuple[Explanation, ...] = field(default_factory=tuple)

    def __post_init__(self):
        runs = tuple(self.runs)
        if len(runs) < 2:
            raise InvalidInputError("an ensemble needs at least two runs")
        m = runs[0].m
        for run in runs[1:]:
            if run.m != m:
                raise ShapeError("all runs in an ensemble must share m")
        object.__setattr__(self, "runs", runs)

    @property
    def k(self) -> int:
        return len(self.runs)

    @property
    def m(self) -> int:
        return self.runs[0].m

    def importance_matrix(self) -> np.ndarray:
        """k-by-m matrix of normalized importances, one row per run."""
        return np.stack([run.importances for run in self.runs])

    def rank_matrix(self) -> np.ndarray:
        """k-by-m matrix of ranks, one row per run."""
        return np.stack([run.ranks for run in self.runs])

    def coefficient_matrix(self) -> np.ndarray:
        """k-by-m matrix of raw signed coefficients."""
        return np.stack([run.coefficients for run in self.runs])
