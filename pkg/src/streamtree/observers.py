"""Per-leaf attribute statistics and split-candidate enumeration.

Nominal attributes keep exact per-value class counts; numeric attributes
keep one running Gaussian per class (one-pass mean/variance) plus the
global observed range, and candidate thresholds are scored through the
class-conditional normal CDF.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, xlogy

from .core import Attribute, ClassDistribution, ContractViolation, entropy

# Point-mass window for zero-variance Gaussians when used as NB densities.
_POINT_MASS_TOL = 1e-9


@dataclass(slots=True)
class SplitCandidate:
    """One possible split of a leaf: an attribute test plus its merit.

    ``threshold`` is None for nominal (multiway) tests.  ``post_split``
    holds the estimated class distribution of each branch: [<=, >] for
    numeric tests, one entry per value for nominal ones.
    """

    attribute: int
    threshold: float | None
    merit: float
    post_split: list[ClassDistribution] = field(default_factory=list)

    @property
    def is_nominal(self) -> bool:
        return self.threshold is None

    @property
    def n_branches(self) -> int:
        return len(self.post_split)


class NominalObserver:
    """Exact per-class, per-value counts for one nominal attribute."""

    __slots__ = ("attribute", "arity", "counts")

    def __init__(self, attribute: int, n_classes: int, arity: int):
        self.attribute = attribute
        self.arity = arity
        self.counts = [[0.0] * arity for _ in range(n_classes)]

    def observe(self, value, class_index: int, weight: float = 1.0) -> None:
        v = int(value)
        if not 0 <= v < self.arity:
            raise ContractViolation(
                f"nominal value {value!r} out of range [0, {self.arity})"
            )
        self.counts[class_index][v] += weight

    def best_split(self, pre_dist: ClassDistribution) -> SplitCandidate | None:
        """Single multiway candidate with exact information gain, if any data seen."""
        counts = self.counts
        branch_totals = [0.0] * self.arity
        seen = 0.0
        for row in counts:
            for v, w in enumerate(row):
                branch_totals[v] += w
                seen += w
        if seen <= 0.0:
            return None
        n = pre_dist.total
        gain = entropy(pre_dist)
        post = []
        for v in range(self.arity):
            branch = ClassDistribution.from_weights([row[v] for row in counts])
            post.append(branch)
            if branch.total > 0.0:
                gain -= (branch.total / n) * entropy(branch)
        return SplitCandidate(self.attribute, None, gain, post)

    def nb_likelihood(self, value, class_index: int) -> float:
        """Laplace-smoothed P(value | class) from the observed counts."""
        row = self.counts[class_index]
        return (row[int(value)] + 1.0) / (sum(row) + self.arity)


class GaussianNumericObserver:
    """Class-conditional running Gaussians for one numeric attribute.

    Candidate thresholds are ``bins`` equally spaced points strictly between
    the observed min and max; each side's per-class weight is the class count
    scaled by the normal CDF (a point mass when the class variance is zero).
    """

    __slots__ = ("attribute", "bins", "counts", "means", "m2", "vmin", "vmax")

    def __init__(self, attribute: int, n_classes: int, bins: int = 100):
        if bins < 1:
            raise ContractViolation(f"bins must be >= 1, got {bins}")
        self.attribute = attribute
        self.bins = bins
        self.counts = [0.0] * n_classes
        self.means = [0.0] * n_classes
        self.m2 = [0.0] * n_classes
        self.vmin = math.inf
        self.vmax = -math.inf

    def observe(self, value, class_index: int, weight: float = 1.0) -> None:
        x = float(value)
        n = self.counts[class_index] + weight
        self.counts[class_index] = n
        delta = x - self.means[class_index]
        self.means[class_index] += delta * weight / n
        self.m2[class_index] += weight * delta * (x - self.means[class_index])
        if x < self.vmin:
            self.vmin = x
        if x > self.vmax:
            self.vmax = x

    def variance(self, class_index: int) -> float:
        """Unbiased per-class variance; zero until two observations exist."""
        n = self.counts[class_index]
        if n <= 1.0:
            return 0.0
        return self.m2[class_index] / (n - 1.0)

    def best_split(self, pre_dist: ClassDistribution) -> SplitCandidate | None:
        lo, hi = self.vmin, self.vmax
        if not lo < hi:  # no observations, or a single repeated value
            return None
        n_classes = len(self.counts)
        steps = np.arange(1, self.bins + 1, dtype=float) / (self.bins + 1)
        thresholds = lo + (hi - lo) * steps
        below = np.zeros((n_classes, self.bins))
        for c in range(n_classes):
            n_c = self.counts[c]
            if n_c <= 0.0:
                continue  # unseen class contributes no weight to either side
            sd = math.sqrt(self.variance(c))
            if sd == 0.0:
                below[c] = np.where(self.means[c] <= thresholds, n_c, 0.0)
            else:
                below[c] = n_c * ndtr((thresholds - self.means[c]) / sd)
        totals = np.asarray(self.counts)
        above = totals[:, None] - below

        n = pre_dist.total
        gains = (
            entropy(pre_dist)
            - _column_entropies(below) * (below.sum(axis=0) / n)
            - _column_entropies(above) * (above.sum(axis=0) / n)
        )
        best = int(np.argmax(gains))
        post = [
            ClassDistribution.from_weights(below[:, best]),
            ClassDistribution.from_weights(above[:, best]),
        ]
        return SplitCandidate(self.attribute, float(thresholds[best]), float(gains[best]), post)

    def nb_likelihood(self, value, class_index: int) -> float:
        """Gaussian density of ``value`` under the class; point mass if variance is 0."""
        n = self.counts[class_index]
        if n <= 0.0:
            return 1.0
        var = self.variance(class_index)
        diff = float(value) - self.means[class_index]
        if var <= 0.0:
            return 1.0 if abs(diff) <= _POINT_MASS_TOL else 0.0
        return math.exp(-diff * diff / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)


def _column_entropies(matrix: np.ndarray) -> np.ndarray:
    """Entropy in bits of each column of a (classes x columns) weight matrix."""
    totals = matrix.sum(axis=0)
    safe = np.where(totals > 0.0, totals, 1.0)
    p = matrix / safe
    h = -xlogy(p, p).sum(axis=0) / math.log(2.0)
    return np.where(totals > 0.0, h, 0.0)


def make_observer(attribute_index: int, attribute: Attribute, n_classes: int, bins: int):
    if attribute.is_nominal:
        return NominalObserver(attribute_index, n_classes, attribute.arity)
    return GaussianNumericObserver(attribute_index, n_classes, bins)
