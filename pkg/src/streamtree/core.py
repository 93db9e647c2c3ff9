"""Stream data model plus the entropy / information-gain / Hoeffding-bound formulas.

Everything downstream (attribute observers, tree learners, growth gates)
works in terms of the types defined here.  All information measures are in
bits (base-2 logs) and class weights are reals, because split estimates for
numeric attributes produce fractional per-class weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


class ContractViolation(ValueError):
    """An argument broke a documented precondition."""


class ConfigError(ValueError):
    """A configuration value is invalid or missing."""


_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class Attribute:
    """Descriptor of one stream attribute: either nominal (fixed arity) or numeric."""

    name: str
    kind: str  # "nominal" | "numeric"
    arity: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("nominal", "numeric"):
            raise ConfigError(f"unknown attribute kind {self.kind!r}")
        if self.kind == "nominal":
            if self.arity is None or self.arity < 2:
                raise ConfigError(f"nominal attribute {self.name!r} needs arity >= 2")
        elif self.arity is not None:
            raise ConfigError(f"numeric attribute {self.name!r} must not declare an arity")

    @staticmethod
    def nominal(name: str, arity: int) -> "Attribute":
        return Attribute(name, "nominal", arity)

    @staticmethod
    def numeric(name: str) -> "Attribute":
        return Attribute(name, "numeric")

    @property
    def is_nominal(self) -> bool:
        return self.kind == "nominal"


@dataclass(frozen=True)
class Schema:
    """Attribute typing and class labelling for a stream."""

    attributes: tuple[Attribute, ...]
    class_count: int
    class_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if not self.attributes:
            raise ConfigError("schema needs at least one attribute")
        if self.class_count < 2:
            raise ConfigError("schema needs class_count >= 2")
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise ConfigError("attribute names must be unique")
        if self.class_names is None:
            object.__setattr__(
                self, "class_names", tuple(str(c) for c in range(self.class_count))
            )
        elif len(self.class_names) != self.class_count:
            raise ConfigError("class_names length must equal class_count")

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    def validate_instance(self, instance: "Instance") -> None:
        """Raise ContractViolation unless the instance conforms to this schema."""
        if len(instance.values) != len(self.attributes):
            raise ContractViolation(
                f"instance has {len(instance.values)} values, schema expects "
                f"{len(self.attributes)}"
            )
        for attr, value in zip(self.attributes, instance.values):
            if attr.is_nominal:
                v = int(value)
                if v != value or not 0 <= v < attr.arity:
                    raise ContractViolation(
                        f"value {value!r} out of range for nominal attribute "
                        f"{attr.name!r} (arity {attr.arity})"
                    )
            elif not math.isfinite(value):
                raise ContractViolation(
                    f"non-finite value for numeric attribute {attr.name!r}"
                )
        if instance.label is not None and not 0 <= instance.label < self.class_count:
            raise ContractViolation(
                f"label {instance.label} out of range for {self.class_count} classes"
            )


@dataclass(slots=True)
class Instance:
    """One observation: a value vector aligned to a schema, optionally labelled."""

    values: tuple
    label: int | None = None


class ClassDistribution:
    """Per-class weight vector with a cached total.

    Mutable: leaves increment it in place while training.  Weights never go
    negative; ``impure`` means at least two classes carry positive weight.
    """

    __slots__ = ("weights", "total", "_nonzero")

    def __init__(self, n_classes: int):
        self.weights = [0.0] * n_classes
        self.total = 0.0
        self._nonzero = 0

    @classmethod
    def from_weights(cls, weights) -> "ClassDistribution":
        dist = cls(len(weights))
        for i, w in enumerate(weights):
            if w < 0:
                raise ContractViolation(f"negative class weight {w!r}")
            if w > 0:
                dist.weights[i] = float(w)
                dist._nonzero += 1
        dist.total = math.fsum(dist.weights)
        return dist

    def add(self, class_index: int, weight: float = 1.0) -> None:
        if weight < 0:
            raise ContractViolation(f"negative weight {weight!r}")
        w = self.weights[class_index]
        if w == 0.0 and weight > 0.0:
            self._nonzero += 1
        self.weights[class_index] = w + weight
        self.total += weight

    def copy(self) -> "ClassDistribution":
        dup = ClassDistribution(len(self.weights))
        dup.weights = list(self.weights)
        dup.total = self.total
        dup._nonzero = self._nonzero
        return dup

    @property
    def impure(self) -> bool:
        return self._nonzero >= 2

    def argmax(self) -> int:
        """Index of the heaviest class; ties resolve to the lowest index."""
        ws = self.weights
        return ws.index(max(ws))

    def __len__(self) -> int:
        return len(self.weights)

    def __repr__(self) -> str:
        return f"ClassDistribution({self.weights!r})"


def _weights_of(dist) -> list[float]:
    return dist.weights if isinstance(dist, ClassDistribution) else list(dist)


def entropy(dist) -> float:
    """Shannon entropy in bits of a class distribution (or raw weight sequence).

    Zero-weight classes contribute nothing (0*log 0 := 0); an empty or
    all-zero distribution has entropy 0.
    """
    weights = _weights_of(dist)
    total = dist.total if isinstance(dist, ClassDistribution) else math.fsum(weights)
    if total <= 0.0:
        return 0.0
    h = 0.0
    for w in weights:
        if w > 0.0:
            p = w / total
            if p > 0.0:  # guards subnormal weights that underflow to 0
                h -= p * math.log(p)
    return h / _LOG2


def information_gain(pre, partitions) -> float:
    """Entropy reduction of splitting ``pre`` into ``partitions``, in bits.

    The partitions must exactly re-distribute ``pre``'s weight (their totals
    must sum to pre's total within 1e-6 relative); empty partitions
    contribute zero.
    """
    pre_weights = _weights_of(pre)
    pre_total = math.fsum(pre_weights)
    part_weights = [_weights_of(p) for p in partitions]
    part_totals = [math.fsum(ws) for ws in part_weights]
    combined = math.fsum(part_totals)
    if abs(combined - pre_total) > 1e-6 * max(abs(pre_total), abs(combined), 1e-300):
        raise ContractViolation(
            f"partition totals {combined!r} do not match pre-split total {pre_total!r}"
        )
    if pre_total <= 0.0:
        return 0.0
    gain = entropy(pre_weights)
    for ws, total in zip(part_weights, part_totals):
        if total > 0.0:
            gain -= (total / pre_total) * entropy(ws)
    return gain


def hoeffding_bound(value_range: float, delta: float, n: float) -> float:
    """Deviation bound for the mean of a range-R variable after n observations.

    For information gain over c classes the caller passes R = log2(c).
    ``n`` may be fractional because leaves accumulate instance *weight*.
    """
    if value_range <= 0:
        raise ContractViolation(f"range must be positive, got {value_range!r}")
    if not 0.0 < delta < 1.0:
        raise ContractViolation(f"delta must lie in (0, 1), got {delta!r}")
    if n <= 0:
        raise ContractViolation(f"n must be positive, got {n!r}")
    return math.sqrt(value_range * value_range * math.log(1.0 / delta) / (2.0 * n))
