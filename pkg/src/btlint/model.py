"""Core behavioral-model data structures.

A behavioral model is a rooted tree of behavioral units. Each unit is a bag
of named attributes (component name, behavior name, behavior type,
traceability links, node status, related nodes, plus optional operator and
label). Edges carry a control-flow kind and may hold further attributes,
which are stored but never analysed.

Models are immutable after :func:`build_model` and safe to share between
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

# Scalar token or finite set of tokens.
AttributeValue = str | frozenset[str]

BEHAVIOR_TYPES = (
    "state-realisation",
    "selection",
    "event",
    "guard",
    "internal-input",
    "internal-output",
    "external-input",
    "external-output",
)

EDGE_TYPES = ("sequential", "parallel", "atomic", "alternative")

NODE_STATUSES = ("original", "implied", "missing", "design", "updated", "deleted")

NODE_OPERATORS = (
    "synchronise",
    "reversion",
    "reference",
    "kill",
    "may",
    "conjunction",
    "disjunction",
    "xor",
)

# Attribute names every unit carries (empty-set valued when absent from the
# source). ``op`` and ``label`` are optional extras.
CANONICAL_ATTRS = ("cname", "bname", "btype", "tlink", "status", "rel")
OPTIONAL_ATTRS = ("op", "label")

ROOT = "root"
BRANCH = "branch"
LEAF = "leaf"


class ModelError(Exception):
    """Base class for structural model errors."""


class NoRoot(ModelError):
    pass


class MultipleRoots(ModelError):
    pass


class Cycle(ModelError):
    pass


class DuplicateChildEdge(ModelError):
    pass


class DanglingReference(ModelError):
    pass


class UnknownUnit(ModelError):
    pass


class DuplicateModelId(ModelError):
    pass


@dataclass(frozen=True)
class SourceSpan:
    """Location of a parsed construct, for diagnostics."""

    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Attribute:
    """A named value pair on a unit or edge."""

    name: str
    value: "str | frozenset[str]"

    def __post_init__(self) -> None:
        if not self.name.strip():
            raise ValueError("attribute name must be non-empty")


def _freeze_value(value) -> "str | frozenset[str]":
    if isinstance(value, str):
        return value
    if isinstance(value, frozenset):
        return value
    if isinstance(value, (set, list, tuple)):
        return frozenset(value)
    raise TypeError(f"unsupported attribute value: {value!r}")


class BehavioralUnit:
    """One node of a model: a set of uniquely named attributes.

    The six canonical attribute names are always present; names missing at
    construction are filled with an empty set value.
    """

    __slots__ = ("id", "attrs", "span")

    def __init__(
        self,
        unit_id: str,
        attrs: Mapping[str, "str | frozenset[str] | set | list | tuple"],
        span: SourceSpan | None = None,
    ) -> None:
        self.id = unit_id
        frozen: dict[str, "str | frozenset[str]"] = {}
        for name, value in attrs.items():
            if not name.strip():
                raise ValueError(f"empty attribute name on unit {unit_id}")
            frozen[name] = _freeze_value(value)
        for name in CANONICAL_ATTRS:
            frozen.setdefault(name, frozenset())
        self.attrs = frozen
        self.span = span

    def get(self, name: str) -> "str | frozenset[str] | None":
        return self.attrs.get(name)

    def attribute(self, name: str) -> Attribute | None:
        value = self.attrs.get(name)
        if value is None:
            return None
        return Attribute(name, value)

    def structure(self):
        return (self.id, tuple(sorted(
            (k, v if isinstance(v, str) else tuple(sorted(v)))
            for k, v in self.attrs.items()
        )))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"BehavioralUnit({self.id!r}, {self.attrs!r})"


class Edge:
    """Control-flow edge; always carries ``etype``, may carry extras."""

    __slots__ = ("attrs",)

    def __init__(self, etype: str = "sequential", **extra) -> None:
        if etype not in EDGE_TYPES:
            raise ValueError(f"unknown edge type {etype!r}")
        attrs: dict[str, "str | frozenset[str]"] = {"etype": etype}
        for name, value in extra.items():
            attrs[name] = _freeze_value(value)
        self.attrs = attrs

    @property
    def etype(self) -> str:
        value = self.attrs["etype"]
        assert isinstance(value, str)
        return value

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Edge({self.etype!r})"


@dataclass(frozen=True)
class Triple:
    """Parent-to-child edge occurrence inside one model."""

    parent: str
    edge: Edge
    child: str


class BehavioralModel:
    """A validated rooted tree of units. Use :func:`build_model`."""

    __slots__ = (
        "model_id",
        "is_init",
        "units",
        "triples",
        "root",
        "_children",
        "_parent",
        "_positions",
        "span",
    )

    def __init__(
        self,
        model_id: str,
        is_init: bool,
        units: dict[str, BehavioralUnit],
        triples: tuple[Triple, ...],
        root: str,
        children: dict[str, tuple[str, ...]],
        parent: dict[str, "str | None"],
        positions: dict[str, str],
        span: SourceSpan | None,
    ) -> None:
        self.model_id = model_id
        self.is_init = is_init
        self.units = units
        self.triples = triples
        self.root = root
        self._children = children
        self._parent = parent
        self._positions = positions
        self.span = span

    def __iter__(self) -> Iterator[BehavioralUnit]:
        return iter(self.units.values())

    def unit(self, unit_id: str) -> BehavioralUnit:
        try:
            return self.units[unit_id]
        except KeyError:
            raise UnknownUnit(f"{self.model_id}: unknown unit {unit_id!r}") from None

    def children_of(self, unit_id: str) -> tuple[str, ...]:
        self.unit(unit_id)
        return self._children.get(unit_id, ())

    def parent_of(self, unit_id: str) -> "str | None":
        self.unit(unit_id)
        return self._parent.get(unit_id)

    def branch_ids(self) -> tuple[str, ...]:
        return tuple(u for u in self.units if self._positions[u] == BRANCH)

    def leaf_ids(self) -> tuple[str, ...]:
        return tuple(u for u in self.units if self._positions[u] == LEAF)

    def structure(self):
        return (
            self.model_id,
            self.is_init,
            tuple(u.structure() for u in self.units.values()),
            tuple((t.parent, t.edge.etype, t.child) for t in self.triples),
        )

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"BehavioralModel({self.model_id!r}, units={len(self.units)})"


def position_of(model: BehavioralModel, unit_id: str) -> str:
    """Classify a unit as ``root``, ``branch`` or ``leaf``.

    The sole unit of a single-node model is a root only; it is never
    additionally counted as a leaf, so relation detection binds it solely
    through root-directed relations.
    """
    model.unit(unit_id)
    return model._positions[unit_id]


def build_model(
    model_id: str,
    is_init: bool,
    units: Iterable[BehavioralUnit],
    triples: Iterable[Triple],
    span: SourceSpan | None = None,
) -> BehavioralModel:
    """Validate and assemble a model, inferring the root.

    Raises :class:`DanglingReference`, :class:`DuplicateChildEdge`,
    :class:`NoRoot`, :class:`MultipleRoots` or :class:`Cycle` when the
    (units, triples) pair does not describe a rooted tree.
    """
    unit_map: dict[str, BehavioralUnit] = {}
    for u in units:
        if u.id in unit_map:
            raise ModelError(f"{model_id}: duplicate unit id {u.id!r}")
        unit_map[u.id] = u
    if not unit_map:
        raise NoRoot(f"{model_id}: model has no units")

    triple_list = tuple(triples)
    children: dict[str, list[str]] = {}
    parent: dict[str, "str | None"] = {u: None for u in unit_map}
    for t in triple_list:
        if t.parent not in unit_map or t.child not in unit_map:
            missing = t.parent if t.parent not in unit_map else t.child
            raise DanglingReference(f"{model_id}: edge references unknown unit {missing!r}")
        if t.parent == t.child:
            raise Cycle(f"{model_id}: unit {t.child!r} is its own parent")
        if parent[t.child] is not None:
            raise DuplicateChildEdge(f"{model_id}: unit {t.child!r} has two parents")
        parent[t.child] = t.parent
        children.setdefault(t.parent, []).append(t.child)

    parentless = [u for u in unit_map if parent[u] is None]
    if not parentless:
        raise Cycle(f"{model_id}: every unit has a parent, so the edges contain a cycle")
    if len(parentless) > 1:
        raise MultipleRoots(f"{model_id}: multiple root candidates {parentless}")
    root = parentless[0]

    # A unit not reachable from the root sits in a component whose parent
    # chain never terminates, i.e. a cycle.
    reached = {root}
    stack = [root]
    while stack:
        for child in children.get(stack.pop(), ()):
            if child not in reached:
                reached.add(child)
                stack.append(child)
    if len(reached) != len(unit_map):
        lost = sorted(set(unit_map) - reached)
        raise Cycle(f"{model_id}: units {lost} are unreachable from the root (cycle)")

    positions = {}
    for u in unit_map:
        if u == root:
            positions[u] = ROOT
        elif children.get(u):
            positions[u] = BRANCH
        else:
            positions[u] = LEAF

    return BehavioralModel(
        model_id=model_id,
        is_init=is_init,
        units=unit_map,
        triples=triple_list,
        root=root,
        children={p: tuple(cs) for p, cs in children.items()},
        parent=parent,
        positions=positions,
        span=span,
    )


def downward_paths(model: BehavioralModel, min_len: int) -> list[list[str]]:
    """Every parent-to-descendant chain with at least ``min_len`` units.

    Chains follow consecutive edges downward. Order is deterministic:
    start units in document order, then depth-first extension with children
    in document order, each chain emitted as soon as it is long enough.
    """
    if min_len < 1:
        raise ValueError("min_len must be >= 1")
    out: list[list[str]] = []

    def extend(chain: list[str]) -> None:
        if len(chain) >= min_len:
            out.append(list(chain))
        for child in model._children.get(chain[-1], ()):
            chain.append(child)
            extend(chain)
            chain.pop()

    for start in model.units:
        extend([start])
    return out


class ModelSet:
    """Ordered collection of models with unique ids."""

    __slots__ = ("models",)

    def __init__(self, models: Iterable[BehavioralModel]) -> None:
        ordered: dict[str, BehavioralModel] = {}
        for m in models:
            if m.model_id in ordered:
                raise DuplicateModelId(f"duplicate model id {m.model_id!r}")
            ordered[m.model_id] = m
        self.models = ordered

    def __iter__(self) -> Iterator[BehavioralModel]:
        return iter(self.models.values())

    def __len__(self) -> int:
        return len(self.models)

    def __getitem__(self, model_id: str) -> BehavioralModel:
        return self.models[model_id]

    def model_index(self, model_id: str) -> int:
        return list(self.models).index(model_id)

    def has_init(self) -> bool:
        return any(m.is_init for m in self)

    def warnings(self) -> list[str]:
        if not self.has_init() and len(self.models) > 0:
            return [
                "no model is marked 'init'; incompleteness analysis assumes "
                "at least one initialisation model"
            ]
        return []

    def structure(self):
        return tuple(m.structure() for m in self)
