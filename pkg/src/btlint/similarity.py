"""Attribute and unit similarity under a configurable integration strategy.

Similarity between two attributes is 0 when their (alias-canonicalised)
names differ, and otherwise the value of a similarity function chosen per
attribute: scalar comparison (equal -> 1, matrix-compatible -> beta,
else 0) or set comparison (subset/superset -> 1, overlap -> Jaccard,
all-pairs-compatible -> beta, else 0). Unit similarity is the weighted
average over name-aligned attributes; two units are equivalent when it
reaches the threshold alpha.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping

from .model import Attribute, AttributeValue, BEHAVIOR_TYPES, BehavioralUnit

log = logging.getLogger(__name__)

SCALAR = "scalar"
SET = "set"

# Comparison mode used for an attribute when the strategy does not override
# it. Any other name must either be configured or be inferable from the
# values at hand.
DEFAULT_XI_MODES: Mapping[str, str] = {
    "cname": SCALAR,
    "bname": SCALAR,
    "btype": SCALAR,
    "status": SCALAR,
    "op": SCALAR,
    "label": SCALAR,
    "tlink": SET,
    "rel": SET,
}

# Attribute names whose values are identifiers of components; compared
# case-insensitively so naming-case noise cannot silently block a relation.
_CASEFOLDED = ("cname", "bname")


class StrategyInvalid(Exception):
    pass


class ZeroWeightSum(StrategyInvalid):
    pass


class UnknownAttribute(Exception):
    pass


class ValueNotAllowed(Exception):
    pass


class CompatibilityMatrix:
    """Symmetric compatibility lookup over an attribute's allowed values.

    Stored as the upper triangle of the value-order matrix; lookups
    normalise index order. Equal values never reach the matrix (the
    similarity functions short-circuit them to 1).
    """

    __slots__ = ("values", "_index", "_pairs")

    def __init__(self, values, pairs) -> None:
        self.values = tuple(values)
        if len(set(self.values)) != len(self.values):
            raise StrategyInvalid("compatibility matrix values must be unique")
        self._index = {v: i for i, v in enumerate(self.values)}
        upper: set[tuple[int, int]] = set()
        for a, b in pairs:
            if a not in self._index or b not in self._index:
                raise StrategyInvalid(f"compatibility pair ({a!r}, {b!r}) outside allowed values")
            i, j = self._index[a], self._index[b]
            if i == j:
                raise StrategyInvalid(f"compatibility pair may not repeat a value: {a!r}")
            upper.add((min(i, j), max(i, j)))
        self._pairs = frozenset(upper)

    def compatible(self, v1: str, v2: str) -> bool:
        try:
            i, j = self._index[v1], self._index[v2]
        except KeyError:
            bad = v1 if v1 not in self._index else v2
            raise ValueNotAllowed(f"value {bad!r} is outside the allowed set") from None
        if i == j:
            return True
        return (min(i, j), max(i, j)) in self._pairs

    def to_dict(self) -> dict:
        pairs = sorted(
            [self.values[i], self.values[j]] for i, j in self._pairs
        )
        return {"values": list(self.values), "pairs": pairs}


@dataclass(frozen=True)
class Strategy:
    """Immutable integration strategy: weights, thresholds and matrices."""

    weights: Mapping[str, float]
    alpha: float = 1.0
    beta: float = 0.5
    xi_mode: Mapping[str, str] = field(default_factory=dict)
    name_aliases: Mapping[str, str] = field(default_factory=dict)
    compat: Mapping[str, CompatibilityMatrix] = field(default_factory=dict)

    def __post_init__(self) -> None:
        weights = dict(self.weights)
        if any(w < 0 for w in weights.values()):
            raise StrategyInvalid("weights must be non-negative")
        if any(w > 1 for w in weights.values()):
            # Percent scale: accept 0..100 and normalise.
            if any(w > 100 for w in weights.values()):
                raise StrategyInvalid("weights must lie in [0, 1] (or percent scale [0, 100])")
            weights = {k: w / 100.0 for k, w in weights.items()}
        if sum(weights.values()) <= 0:
            raise ZeroWeightSum("the weight sum must be positive")
        object.__setattr__(self, "weights", weights)
        if not 0.0 <= self.alpha <= 1.0:
            raise StrategyInvalid(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 < self.beta < 1.0:
            raise StrategyInvalid(f"beta must lie in (0, 1), got {self.beta}")
        for mode_name, mode in self.xi_mode.items():
            if mode not in (SCALAR, SET):
                raise StrategyInvalid(f"xi_mode[{mode_name!r}] must be 'scalar' or 'set'")
        for alias, target in self.name_aliases.items():
            if self.name_aliases.get(target, target) != target:
                raise StrategyInvalid(
                    f"alias map is not idempotent: {alias!r} -> {target!r} -> "
                    f"{self.name_aliases[target]!r}"
                )

    def canonical_name(self, name: str) -> str:
        return self.name_aliases.get(name, name)

    def weight_of(self, name: str) -> float:
        return self.weights.get(self.canonical_name(name), 0.0)

    def mode_of(self, name: str) -> str | None:
        name = self.canonical_name(name)
        return self.xi_mode.get(name, DEFAULT_XI_MODES.get(name))

    def matrix_of(self, name: str) -> CompatibilityMatrix | None:
        return self.compat.get(self.canonical_name(name))

    def to_dict(self) -> dict:
        return {
            "weights": dict(sorted(self.weights.items())),
            "alpha": self.alpha,
            "beta": self.beta,
            "xi_mode": dict(sorted(self.xi_mode.items())),
            "aliases": dict(sorted(self.name_aliases.items())),
            "compat": {k: m.to_dict() for k, m in sorted(self.compat.items())},
        }


_STRATEGY_KEYS = {"weights", "alpha", "beta", "xi_mode", "aliases", "compat"}


def strategy_from_dict(data: dict) -> Strategy:
    if not isinstance(data, dict):
        raise StrategyInvalid("strategy config must be a JSON object")
    unknown = set(data) - _STRATEGY_KEYS
    if unknown:
        raise StrategyInvalid(f"unknown strategy keys: {sorted(unknown)}")
    try:
        weights = data["weights"]
    except KeyError:
        raise StrategyInvalid("strategy config requires 'weights'") from None
    compat = {}
    for name, spec in data.get("compat", {}).items():
        extra = set(spec) - {"values", "pairs"}
        if extra:
            raise StrategyInvalid(f"unknown compat keys for {name!r}: {sorted(extra)}")
        compat[name] = CompatibilityMatrix(spec.get("values", ()), spec.get("pairs", ()))
    try:
        return Strategy(
            weights={str(k): float(v) for k, v in weights.items()},
            alpha=float(data.get("alpha", 1.0)),
            beta=float(data.get("beta", 0.5)),
            xi_mode=dict(data.get("xi_mode", {})),
            name_aliases=dict(data.get("aliases", {})),
            compat=compat,
        )
    except (TypeError, ValueError, AttributeError) as exc:
        raise StrategyInvalid(f"malformed strategy config: {exc}") from exc


def load_strategy(path) -> Strategy:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise StrategyInvalid(f"{path}: not valid JSON: {exc}") from exc
    return strategy_from_dict(data)


def default_strategy() -> Strategy:
    """The shipped default: weights 50/35/15 on cname/bname/btype, alpha 1,
    beta 0.5, and a btype matrix marking only state-realisation/selection
    compatible."""
    text = resources.files("btlint.data").joinpath("default.strategy.json").read_text("utf-8")
    return strategy_from_dict(json.loads(text))


def _norm_scalar(name: str, value: str) -> str:
    value = value.strip()
    if name in _CASEFOLDED:
        return value.casefold()
    return value


def _norm_value(canonical: str, value: AttributeValue) -> AttributeValue:
    if isinstance(value, str):
        return _norm_scalar(canonical, value)
    if canonical == "rel":
        return frozenset(v.strip().casefold() for v in value)
    return frozenset(v.strip() for v in value)


def xi_scalar(v1, v2, beta: float, matrix: CompatibilityMatrix | None = None) -> float:
    """1 when equal, beta when matrix-compatible, else 0."""
    if v1 == v2:
        return 1.0
    if matrix is not None and isinstance(v1, str) and isinstance(v2, str):
        if matrix.compatible(v1, v2):
            return beta
    return 0.0


def xi_set(s1, s2, beta: float, matrix: CompatibilityMatrix | None = None) -> float:
    """Subset/superset -> 1, overlap -> Jaccard ratio, otherwise beta when
    every cross pair is matrix-compatible, else 0."""
    s1 = s1 if isinstance(s1, frozenset) else frozenset([s1]) if isinstance(s1, str) else frozenset(s1)
    s2 = s2 if isinstance(s2, frozenset) else frozenset([s2]) if isinstance(s2, str) else frozenset(s2)
    if s1 <= s2 or s1 >= s2:
        return 1.0
    common = s1 & s2
    if common:
        return len(common) / len(s1 | s2)
    if matrix is not None and all(matrix.compatible(a, b) for a in s1 for b in s2):
        return beta
    return 0.0


def attribute_similarity(a1: Attribute, a2: Attribute, strategy: Strategy) -> float:
    """Similarity of two attributes; 0 when their canonical names differ."""
    n1 = strategy.canonical_name(a1.name)
    n2 = strategy.canonical_name(a2.name)
    if n1 != n2:
        return 0.0
    v1 = _norm_value(n1, a1.value)
    v2 = _norm_value(n1, a2.value)
    mode = strategy.mode_of(n1)
    if mode is None:
        # Fall back on the shape of the values themselves.
        if isinstance(v1, frozenset) or isinstance(v2, frozenset):
            mode = SET
        elif isinstance(v1, str) and isinstance(v2, str):
            mode = SCALAR
        else:  # pragma: no cover - _norm_value only produces str/frozenset
            raise UnknownAttribute(f"no comparison mode known for attribute {n1!r}")
    matrix = strategy.matrix_of(n1)
    if mode == SET:
        return xi_set(v1, v2, strategy.beta, matrix)
    result = xi_scalar(v1, v2, strategy.beta, matrix)
    if (
        result == 1.0
        and n1 in _CASEFOLDED
        and isinstance(a1.value, str)
        and isinstance(a2.value, str)
        and a1.value.strip() != a2.value.strip()
    ):
        log.info(
            "attribute %r values %r and %r match only after case folding",
            n1, a1.value, a2.value,
        )
    return result


def unit_similarity(w1: BehavioralUnit, w2: BehavioralUnit, strategy: Strategy) -> float:
    """Weighted average of attribute similarities, paired by canonical name.

    Attributes with zero weight contribute nothing; an attribute missing
    from a unit compares as an empty set.
    """
    num = 0.0
    den = 0.0
    for name, weight in strategy.weights.items():
        if weight <= 0:
            continue
        v1 = _lookup(w1, name, strategy)
        v2 = _lookup(w2, name, strategy)
        if v1 is None and v2 is None and name not in DEFAULT_XI_MODES:
            raise UnknownAttribute(
                f"strategy weights name {name!r}, which neither unit carries and "
                f"no default covers"
            )
        a1 = Attribute(name, v1 if v1 is not None else frozenset())
        a2 = Attribute(name, v2 if v2 is not None else frozenset())
        num += attribute_similarity(a1, a2, strategy) * weight
        den += weight
    if den <= 0:
        raise ZeroWeightSum("the weight sum must be positive")
    return num / den


def _lookup(unit: BehavioralUnit, canonical: str, strategy: Strategy) -> AttributeValue | None:
    value = unit.attrs.get(canonical)
    if value is not None:
        return value
    for name, raw in unit.attrs.items():
        if strategy.canonical_name(name) == canonical:
            return raw
    return None


def equivalent(w1: BehavioralUnit, w2: BehavioralUnit, strategy: Strategy) -> bool:
    """Whether the weighted similarity reaches the threshold alpha."""
    return unit_similarity(w1, w2, strategy) >= strategy.alpha
