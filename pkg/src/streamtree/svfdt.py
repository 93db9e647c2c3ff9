"""Strict growth gating on top of the Hoeffding tree.

The strict learner keeps constant-size running statistics over every split
attempt that satisfied the plain VFDT condition (entropy, best gain, and
leaf weight at those moments) plus a registry of the tree's current leaves.
A split that VFDT would perform is only executed when the attempting leaf
also looks "hard enough" against that history: its entropy and gain must
not fall more than one standard deviation below the historical means, its
entropy must hold up against the current leaves, and it must have seen at
least the average weight.  Variant II adds a skip branch that waves
through exceptionally hard leaves without consulting the gates.
"""
from __future__ import annotations

import math
from typing import NamedTuple

from .core import ContractViolation, Schema, entropy
from .tree import HoeffdingTree, LeafNode, SplitCandidate, TreeConfig, vfdt_split_condition


class StatSnapshot(NamedTuple):
    count: int
    mean: float
    std: float


class RunningStat:
    """One-pass mean / unbiased standard deviation accumulator."""

    __slots__ = ("count", "_mean", "_m2")

    def __init__(self):
        self.count = 0
        self._mean = 0.0
        self._m2 = 0.0

    def push(self, x: float) -> None:
        self.count += 1
        delta = x - self._mean
        self._mean += delta / self.count
        self._m2 += delta * (x - self._mean)

    @property
    def mean(self) -> float:
        if self.count == 0:
            raise ContractViolation("mean of an empty statistic is undefined")
        return self._mean

    @property
    def std(self) -> float:
        if self.count == 0:
            raise ContractViolation("std of an empty statistic is undefined")
        if self.count == 1:
            return 0.0
        return math.sqrt(self._m2 / (self.count - 1))

    def snapshot(self) -> StatSnapshot:
        if self.count == 0:
            return StatSnapshot(0, 0.0, 0.0)
        return StatSnapshot(self.count, self.mean, self.std)


def _sample_stats(values) -> tuple[float, float]:
    """Mean and unbiased sigma of a non-empty sample (sigma 0 for a singleton)."""
    xs = list(values)
    n = len(xs)
    mean = math.fsum(xs) / n
    if n == 1:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2 for x in xs) / (n - 1)
    return mean, math.sqrt(var)


def phi(x: float, stat_or_sample) -> bool:
    """True when x is no more than one sigma below the mean (or no history exists)."""
    if isinstance(stat_or_sample, RunningStat):
        if stat_or_sample.count == 0:
            return True
        return x >= stat_or_sample.mean - stat_or_sample.std
    sample = list(stat_or_sample)
    if not sample:
        return True
    mean, std = _sample_stats(sample)
    return x >= mean - std


def varpi(x: float, stat_or_sample) -> bool:
    """True when x reaches mean + sigma; an empty history never fires."""
    if isinstance(stat_or_sample, RunningStat):
        if stat_or_sample.count == 0:
            return False
        return x >= stat_or_sample.mean + stat_or_sample.std
    sample = list(stat_or_sample)
    if not sample:
        return False
    mean, std = _sample_stats(sample)
    return x >= mean + std


class GrowthStatistics:
    """Split-attempt history plus the live-leaf registry.

    The three running statistics are updated together, once per attempt at
    which the VFDT condition held, so their counts always agree.
    """

    def __init__(self):
        self.h_stats = RunningStat()
        self.ig_stats = RunningStat()
        self.n_stats = RunningStat()
        self.leaves: dict[int, LeafNode] = {}

    @property
    def satisfy_count(self) -> int:
        return self.h_stats.count

    def record_satisfy(self, leaf_entropy: float, best_gain: float, leaf_weight: float) -> None:
        self.h_stats.push(leaf_entropy)
        self.ig_stats.push(best_gain)
        self.n_stats.push(leaf_weight)

    def register(self, leaf: LeafNode) -> None:
        self.leaves[leaf.leaf_id] = leaf

    def unregister(self, leaf: LeafNode) -> None:
        self.leaves.pop(leaf.leaf_id, None)


def leaf_entropy_stats(leaves: dict[int, LeafNode]) -> tuple[float, float]:
    """Mean and sigma of the current leaves' entropies, recomputed on demand."""
    return _sample_stats(entropy(leaf.dist) for leaf in leaves.values())


def can_split(
    merits: list[float],
    epsilon: float,
    tiebreak: float,
    leaf: LeafNode,
    stats: GrowthStatistics,
    variant: int,
    skip_requires_both: bool = True,
) -> bool:
    """Full strict split check for one attempt.

    Order matters and is pinned by tests: (1) bail out before touching any
    statistic if the VFDT condition fails; (2) snapshot the historical and
    current-leaf statistics; (3) record this attempt into the history;
    (4) variant II may skip the gates outright; (5) evaluate the four gates
    against the *snapshot*, not the just-updated history.  The weight gate
    compares against the mean alone: a leaf can always satisfy it by
    waiting, which is what keeps the gate deadlock-free.
    """
    if not vfdt_split_condition(merits, epsilon, tiebreak):
        return False
    best_gain = merits[0]
    h_leaf = entropy(leaf.dist)
    n_leaf = leaf.weight_seen

    lh_mean, lh_std = leaf_entropy_stats(stats.leaves)
    h_snap = stats.h_stats.snapshot()
    ig_snap = stats.ig_stats.snapshot()
    n_snap = stats.n_stats.snapshot()

    stats.record_satisfy(h_leaf, best_gain, n_leaf)

    if variant == 2:
        skip_h = h_snap.count > 0 and h_leaf >= h_snap.mean + h_snap.std
        skip_ig = ig_snap.count > 0 and best_gain >= ig_snap.mean + ig_snap.std
        fired = (skip_h and skip_ig) if skip_requires_both else (skip_h or skip_ig)
        if fired:
            return True

    rho = h_leaf >= lh_mean - lh_std
    xi = h_snap.count == 0 or h_leaf >= h_snap.mean - h_snap.std
    kappa = ig_snap.count == 0 or best_gain >= ig_snap.mean - ig_snap.std
    psi = n_snap.count == 0 or n_leaf >= n_snap.mean
    return rho and xi and kappa and psi


class StrictHoeffdingTree(HoeffdingTree):
    """Hoeffding tree whose split decisions pass through the strict gates.

    ``variant`` 1 applies the four gates; variant 2 additionally enables
    the skip branch.  Everything else (training loop, refusal handling,
    feature deactivation) is inherited unchanged.
    """

    def __init__(self, schema: Schema, config: TreeConfig | None = None, variant: int = 1):
        if variant not in (1, 2):
            raise ContractViolation(f"variant must be 1 or 2, got {variant!r}")
        self.variant = variant
        self.growth = GrowthStatistics()
        super().__init__(schema, config)

    def _on_leaf_created(self, leaf: LeafNode) -> None:
        self.growth.register(leaf)

    def _on_leaf_removed(self, leaf: LeafNode) -> None:
        self.growth.unregister(leaf)

    def _should_split(self, leaf: LeafNode, rank: list[SplitCandidate], epsilon: float) -> bool:
        merits = [c.merit for c in rank]
        return can_split(
            merits,
            epsilon,
            self.config.tiebreak,
            leaf,
            self.growth,
            self.variant,
            self.config.skip_requires_both,
        )
