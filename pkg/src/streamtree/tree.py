"""Incremental Hoeffding-tree classifier.

Training is test-then-train: each labelled instance is routed to a leaf,
predicted from that leaf's pre-update state, and only then absorbed into
the leaf's distribution and attribute observers.  A leaf attempts a split
when its class distribution is impure and it has accumulated more than
``grace_period`` weight since the last check; the split fires when the
best candidate's gain beats the runner-up by more than the Hoeffding
bound, or when the bound itself has shrunk below the tiebreak threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    ClassDistribution,
    ConfigError,
    ContractViolation,
    Instance,
    Schema,
    hoeffding_bound,
)
from .observers import SplitCandidate, make_observer

LEAF_PREDICTION_MODES = ("mc", "nb")
MERIT_RANGE_MODES = ("unit", "log2c")


@dataclass(frozen=True)
class TreeConfig:
    """Hyperparameters shared by the plain and strict learners.

    ``skip_requires_both`` only matters for the strict variant II gate: when
    True (default) the skip fires only if both the entropy and the gain
    clear their historical mean+sigma; when False either one suffices.
    """

    grace_period: int = 200
    delta: float = 1e-5
    tiebreak: float = 0.05
    leaf_prediction: str = "mc"
    numeric_bins: int = 100
    merit_range: str = "unit"
    skip_requires_both: bool = True

    def __post_init__(self) -> None:
        if self.grace_period < 1:
            raise ConfigError(f"grace_period must be >= 1, got {self.grace_period}")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.tiebreak < 0.0:
            raise ConfigError(f"tiebreak must be >= 0, got {self.tiebreak}")
        if self.leaf_prediction not in LEAF_PREDICTION_MODES:
            raise ConfigError(f"leaf_prediction must be one of {LEAF_PREDICTION_MODES}")
        if self.numeric_bins < 1:
            raise ConfigError(f"numeric_bins must be >= 1, got {self.numeric_bins}")
        if self.merit_range not in MERIT_RANGE_MODES:
            raise ConfigError(f"merit_range must be one of {MERIT_RANGE_MODES}")

    def bound_range(self, class_count: int) -> float:
        """Range R fed to the Hoeffding bound when comparing gain merits.

        "unit" treats the merit gap as a range-1 variable, which is the
        reading that reproduces the published tie-explosion thresholds on
        multi-class streams; "log2c" uses the information-theoretic range
        of the gain itself.
        """
        if self.merit_range == "unit":
            return 1.0
        return math.log2(class_count)


class LeafNode:
    """A growing leaf: class counts, observers, and split-check bookkeeping.

    ``dist`` includes the weight inherited from the parent's post-split
    estimate; ``observed`` counts only instances this leaf has actually
    seen, which is exactly the population the observers describe.
    """

    __slots__ = (
        "leaf_id",
        "dist",
        "observed",
        "observers",
        "available",
        "disabled",
        "weight_seen",
        "last_check_weight",
        "_obs_items",
    )

    def __init__(
        self,
        leaf_id: int,
        schema: Schema,
        available: tuple[int, ...],
        bins: int,
        initial_dist: ClassDistribution | None = None,
    ):
        self.leaf_id = leaf_id
        k = schema.class_count
        self.dist = initial_dist.copy() if initial_dist is not None else ClassDistribution(k)
        self.observed = ClassDistribution(k)
        self.available = available
        self.disabled: set[int] = set()
        self.observers = {
            a: make_observer(a, schema.attributes[a], k, bins) for a in available
        }
        self._obs_items = list(self.observers.items())
        self.weight_seen = self.dist.total
        self.last_check_weight = self.weight_seen

    def learn(self, values, label: int, weight: float = 1.0) -> None:
        self.dist.add(label, weight)
        self.observed.add(label, weight)
        self.weight_seen += weight
        for a, obs in self._obs_items:
            obs.observe(values[a], label, weight)

    def disable_attribute(self, attribute: int) -> None:
        self.disabled.add(attribute)
        self.observers.pop(attribute, None)
        self._obs_items = list(self.observers.items())

    def __repr__(self) -> str:
        return f"LeafNode(id={self.leaf_id}, n={self.weight_seen:.1f})"


class SplitNode:
    """Internal decision node: numeric binary test or nominal fan-out."""

    __slots__ = ("attribute", "threshold", "children")

    def __init__(self, attribute: int, threshold: float | None, children: list):
        self.attribute = attribute
        self.threshold = threshold
        self.children = children

    def branch_for(self, values) -> int:
        if self.threshold is None:
            return int(values[self.attribute])
        return 0 if values[self.attribute] <= self.threshold else 1

    def __repr__(self) -> str:
        test = "multiway" if self.threshold is None else f"<= {self.threshold:.4g}"
        return f"SplitNode(attr={self.attribute}, {test})"


def vfdt_split_condition(merits: list[float], epsilon: float, tiebreak: float) -> bool:
    """Split test on a descending merit ranking: clear winner, or tie-broken.

    A single-candidate ranking competes against an implicit second-best of 0.
    """
    best = merits[0]
    second = merits[1] if len(merits) > 1 else 0.0
    return (best - second > epsilon) or (epsilon < tiebreak)


def feature_selection(rank: list[SplitCandidate], epsilon: float, leaf: LeafNode) -> set[int]:
    """Drop attributes whose merit trails the best by more than epsilon.

    Runs only after a refused split check.  The top-ranked attribute can
    never trail itself, so it always survives.  Returns the leaf's
    deactivated-attribute set.
    """
    best = rank[0].merit
    for cand in rank[1:]:
        if best - cand.merit > epsilon:
            leaf.disable_attribute(cand.attribute)
    return leaf.disabled


class HoeffdingTree:
    """Plain VFDT learner over a fixed schema."""

    def __init__(self, schema: Schema, config: TreeConfig | None = None):
        self.schema = schema
        self.config = config if config is not None else TreeConfig()
        self._hb_range = self.config.bound_range(schema.class_count)
        self._next_leaf_id = 0
        self.instances_trained = 0
        # (instances_trained at the moment of the split, attribute index)
        self.split_log: list[tuple[int, int]] = []
        self.root = self._new_leaf(tuple(range(schema.n_attributes)), None)

    # -- structure -----------------------------------------------------

    def _new_leaf(self, available, initial_dist) -> LeafNode:
        leaf = LeafNode(
            self._next_leaf_id, self.schema, available, self.config.numeric_bins, initial_dist
        )
        self._next_leaf_id += 1
        self._on_leaf_created(leaf)
        return leaf

    def _on_leaf_created(self, leaf: LeafNode) -> None:
        pass

    def _on_leaf_removed(self, leaf: LeafNode) -> None:
        pass

    def _sort_path(self, values):
        """Follow split tests down to a leaf, tracking where to re-attach it."""
        node = self.root
        parent = None
        branch = -1
        while not isinstance(node, LeafNode):
            parent = node
            branch = node.branch_for(values)
            node = node.children[branch]
        return node, parent, branch

    def sort_to_leaf(self, instance: Instance) -> LeafNode:
        return self._sort_path(instance.values)[0]

    def tree_size(self) -> tuple[int, int, int]:
        """(node count, leaf count, depth) of the current tree."""
        nodes = leaves = depth = 0
        stack = [(self.root, 0)]
        while stack:
            node, d = stack.pop()
            nodes += 1
            depth = max(depth, d)
            if isinstance(node, LeafNode):
                leaves += 1
            else:
                stack.extend((child, d + 1) for child in node.children)
        return nodes, leaves, depth

    def iter_leaves(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, LeafNode):
                yield node
            else:
                stack.extend(node.children)

    # -- prediction ----------------------------------------------------

    def predict(self, instance: Instance) -> tuple[int, list[float]]:
        leaf = self.sort_to_leaf(instance)
        return self._predict_leaf(leaf, instance.values)

    def _predict_leaf(self, leaf: LeafNode, values) -> tuple[int, list[float]]:
        dist = leaf.dist
        k = len(dist)
        if dist.total <= 0.0:
            return 0, [1.0 / k] * k
        if self.config.leaf_prediction == "mc":
            scores = [w / dist.total for w in dist.weights]
            return dist.argmax(), scores
        return self._predict_nb(leaf, values)

    def _predict_nb(self, leaf: LeafNode, values) -> tuple[int, list[float]]:
        dist = leaf.dist
        scores = []
        for c, prior in enumerate(dist.weights):
            if prior <= 0.0:
                scores.append(0.0)
                continue
            s = prior / dist.total
            for a, obs in leaf._obs_items:
                s *= obs.nb_likelihood(values[a], c)
                if s == 0.0:
                    break
            scores.append(s)
        total = math.fsum(scores)
        if total <= 0.0:  # every class annihilated; fall back to the priors
            scores = [w / dist.total for w in dist.weights]
            total = 1.0
        scores = [s / total for s in scores]
        return scores.index(max(scores)), scores

    # -- training ------------------------------------------------------

    def train_one(self, instance: Instance, weight: float = 1.0) -> int:
        """Predict from the pre-update leaf, then absorb the instance.

        Returns the prediction, which never depends on the instance's label.
        """
        label = instance.label
        if label is None:
            raise ContractViolation("training requires a labelled instance")
        values = instance.values
        leaf, parent, branch = self._sort_path(values)
        prediction = self._predict_leaf(leaf, values)[0]
        leaf.learn(values, label, weight)
        self.instances_trained += 1
        if leaf.dist.impure and (
            leaf.weight_seen - leaf.last_check_weight > self.config.grace_period
        ):
            self._attempt_split(leaf, parent, branch)
        return prediction

    def train_many(self, instances) -> None:
        for instance in instances:
            self.train_one(instance)

    def _rank_candidates(self, leaf: LeafNode) -> list[SplitCandidate]:
        pre = leaf.observed
        candidates = []
        for _, obs in leaf._obs_items:
            cand = obs.best_split(pre)
            if cand is not None:
                candidates.append(cand)
        candidates.sort(key=lambda c: -c.merit)  # stable: merit ties keep attr order
        return candidates

    def _attempt_split(self, leaf: LeafNode, parent, branch: int) -> None:
        rank = self._rank_candidates(leaf)
        if not rank:
            leaf.last_check_weight = leaf.weight_seen
            return
        epsilon = hoeffding_bound(self._hb_range, self.config.delta, leaf.weight_seen)
        if self._should_split(leaf, rank, epsilon):
            self._split(leaf, parent, branch, rank[0])
        else:
            leaf.last_check_weight = leaf.weight_seen
            feature_selection(rank, epsilon, leaf)

    def _should_split(self, leaf: LeafNode, rank: list[SplitCandidate], epsilon: float) -> bool:
        merits = [c.merit for c in rank]
        return vfdt_split_condition(merits, epsilon, self.config.tiebreak)

    def _split(self, leaf: LeafNode, parent, branch: int, winner: SplitCandidate) -> None:
        self._on_leaf_removed(leaf)
        if winner.is_nominal:
            child_attrs = tuple(a for a in leaf.available if a != winner.attribute)
        else:
            child_attrs = leaf.available
        children = [self._new_leaf(child_attrs, dist) for dist in winner.post_split]
        node = SplitNode(winner.attribute, winner.threshold, children)
        if parent is None:
            self.root = node
        else:
            parent.children[branch] = node
        self.split_log.append((self.instances_trained, winner.attribute))
