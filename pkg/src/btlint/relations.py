"""Detection and classification of integration relations between models.

A unit of one model that is equivalent to the root of another forms a
primary relation (root-root, branch-root or leaf-root). On top of those,
three special shapes are detected: multi-preconditions (two or more units
of one model equivalent to another's root), sub-path (two downward chains,
at least three units long, pointwise equivalent) and non-root (equivalent
pairs of non-root units: branch-branch, leaf-branch, leaf-leaf).

All detectors are pure functions of (models, strategy). Detection over a
model set runs pair by pair; per-pair results are independent and the
final graph is merged by canonical candidate id, so the outcome does not
depend on completion order when pairs are processed concurrently.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .model import BRANCH, LEAF, ROOT, BehavioralModel, ModelSet, downward_paths, position_of
from .similarity import Strategy, unit_similarity

KIND_ROOT_ROOT = "root-root"
KIND_BRANCH_ROOT = "branch-root"
KIND_LEAF_ROOT = "leaf-root"
KIND_MULTI_PRECONDITIONS = "multi-preconditions"
KIND_SUB_PATH = "sub-path"
KIND_BRANCH_BRANCH = "branch-branch"
KIND_LEAF_BRANCH = "leaf-branch"
KIND_LEAF_LEAF = "leaf-leaf"

KINDS = (
    KIND_ROOT_ROOT,
    KIND_BRANCH_ROOT,
    KIND_LEAF_ROOT,
    KIND_MULTI_PRECONDITIONS,
    KIND_SUB_PATH,
    KIND_BRANCH_BRANCH,
    KIND_LEAF_BRANCH,
    KIND_LEAF_LEAF,
)
_KIND_RANK = {kind: i for i, kind in enumerate(KINDS)}

PRIMARY_KINDS = (KIND_ROOT_ROOT, KIND_BRANCH_ROOT, KIND_LEAF_ROOT)
NON_ROOT_KINDS = (KIND_BRANCH_BRANCH, KIND_LEAF_BRANCH, KIND_LEAF_LEAF)

# Kinds whose definition does not distinguish the two models; the graph
# keeps one candidate per unordered model pair, parented on the
# lexicographically smaller model id.
SYMMETRIC_KINDS = frozenset({KIND_ROOT_ROOT, KIND_BRANCH_BRANCH, KIND_LEAF_LEAF, KIND_SUB_PATH})

SUB_PATH_MIN_LEN = 3


@dataclass(frozen=True)
class RelationCandidate:
    """One detected relation between two distinct models.

    ``pairs`` lists (parent unit, child unit) matches; for sub-path
    candidates the pairs are the aligned chain positions in order.
    ``swapped`` marks a leaf-branch candidate that was detected with the
    branch on the parent side and normalised so the leaf is the parent.
    """

    kind: str
    parent_model: str
    child_model: str
    pairs: tuple[tuple[str, str], ...]
    pair_scores: tuple[float, ...]
    swapped: bool = False

    @property
    def id(self) -> str:
        parents = "+".join(dict.fromkeys(p for p, _ in self.pairs))
        children = "+".join(dict.fromkeys(c for _, c in self.pairs))
        return f"{self.parent_model}.{parents}~{self.child_model}.{children}#{self.kind}"

    @property
    def similarity(self) -> float:
        return min(self.pair_scores)

    def models(self) -> frozenset[str]:
        return frozenset((self.parent_model, self.child_model))

    def mirrored(self) -> "RelationCandidate":
        return replace(
            self,
            parent_model=self.child_model,
            child_model=self.parent_model,
            pairs=tuple((c, p) for p, c in self.pairs),
        )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "parent": self.parent_model,
            "child": self.child_model,
            "pairs": [[p, c] for p, c in self.pairs],
            "similarity": self.similarity,
        }


def _check_distinct(b1: BehavioralModel, b2: BehavioralModel) -> None:
    if b1.model_id == b2.model_id:
        raise ValueError("relation detection needs two distinct models")


def _equivalence(b1, b2, strategy) -> dict[tuple[str, str], float]:
    """Scores of every equivalent (unit of b1, unit of b2) pair."""
    eq = {}
    for u in b1:
        for v in b2:
            score = unit_similarity(u, v, strategy)
            if score >= strategy.alpha:
                eq[(u.id, v.id)] = score
    return eq


def primary_relations(
    b1: BehavioralModel, b2: BehavioralModel, strategy: Strategy
) -> list[tuple[str, str]]:
    """Pairs (unit of b1, root of b2) that are equivalent, in document order."""
    _check_distinct(b1, b2)
    root = b2.units[b2.root]
    return [
        (u.id, b2.root)
        for u in b1
        if unit_similarity(u, root, strategy) >= strategy.alpha
    ]


def classify_primary(pair: tuple[str, str], b1: BehavioralModel, b2: BehavioralModel) -> str:
    """Which primary kind a (parent unit, child root) pair belongs to."""
    position = position_of(b1, pair[0])
    if position == ROOT:
        return KIND_ROOT_ROOT
    if position == BRANCH:
        return KIND_BRANCH_ROOT
    return KIND_LEAF_ROOT


def multi_preconditions(b1: BehavioralModel, b2: BehavioralModel, strategy: Strategy) -> bool:
    """Whether at least two distinct units of b1 match the root of b2."""
    return len({p for p, _ in primary_relations(b1, b2, strategy)}) >= 2


def _sub_paths_from_eq(b1, b2, eq, min_len):
    if min_len < SUB_PATH_MIN_LEN:
        raise ValueError(f"min_len must be >= {SUB_PATH_MIN_LEN}")
    chains1 = downward_paths(b1, min_len)
    by_len: dict[int, list[list[str]]] = {}
    for c in downward_paths(b2, min_len):
        by_len.setdefault(len(c), []).append(c)

    results = []
    for c1 in chains1:
        for c2 in by_len.get(len(c1), ()):
            if all((u, v) in eq for u, v in zip(c1, c2)):
                if not _extendable(b1, b2, c1, c2, eq):
                    results.append((list(c1), list(c2)))
    return results


def _extendable(b1, b2, c1, c2, eq) -> bool:
    p1 = b1.parent_of(c1[0])
    p2 = b2.parent_of(c2[0])
    if p1 is not None and p2 is not None and (p1, p2) in eq:
        return True
    for x in b1.children_of(c1[-1]):
        for y in b2.children_of(c2[-1]):
            if (x, y) in eq:
                return True
    return False


def sub_path_relations(
    b1: BehavioralModel,
    b2: BehavioralModel,
    strategy: Strategy,
    min_len: int = SUB_PATH_MIN_LEN,
):
    """Maximal pairs of equal-length downward chains, pointwise equivalent.

    A chain pair is reported only when it cannot be extended by one unit at
    either end while staying pointwise equivalent; every shorter aligned
    pair is contained in a reported one.
    """
    _check_distinct(b1, b2)
    return _sub_paths_from_eq(b1, b2, _equivalence(b1, b2, strategy), min_len)


def _non_root_from_eq(b1, b2, eq) -> list[RelationCandidate]:
    out = []
    for u in b1:
        pos1 = position_of(b1, u.id)
        if pos1 == ROOT:
            continue
        for v in b2:
            pos2 = position_of(b2, v.id)
            if pos2 == ROOT or (u.id, v.id) not in eq:
                continue
            score = eq[(u.id, v.id)]
            if pos1 == BRANCH and pos2 == BRANCH:
                out.append(_candidate(KIND_BRANCH_BRANCH, b1, b2, u.id, v.id, score))
            elif pos1 == LEAF and pos2 == BRANCH:
                out.append(_candidate(KIND_LEAF_BRANCH, b1, b2, u.id, v.id, score))
            elif pos1 == LEAF and pos2 == LEAF:
                out.append(_candidate(KIND_LEAF_LEAF, b1, b2, u.id, v.id, score))
            else:  # parent branch, child leaf: normalise onto the leaf side
                out.append(
                    RelationCandidate(
                        kind=KIND_LEAF_BRANCH,
                        parent_model=b2.model_id,
                        child_model=b1.model_id,
                        pairs=((v.id, u.id),),
                        pair_scores=(score,),
                        swapped=True,
                    )
                )
    return out


def non_root_relations(
    b1: BehavioralModel, b2: BehavioralModel, strategy: Strategy
) -> list[RelationCandidate]:
    """Equivalent (non-root, non-root) unit pairs, classified by position.

    The parent-branch/child-leaf combination has no kind of its own; it is
    reported as a leaf-branch candidate with the leaf on the parent side
    and ``swapped`` set.
    """
    _check_distinct(b1, b2)
    return _non_root_from_eq(b1, b2, _equivalence(b1, b2, strategy))


def _candidate(kind, b1, b2, u, v, score, swapped=False) -> RelationCandidate:
    return RelationCandidate(
        kind=kind,
        parent_model=b1.model_id,
        child_model=b2.model_id,
        pairs=((u, v),),
        pair_scores=(score,),
        swapped=swapped,
    )


class RelationGraph:
    """All candidates over a model set, in a deterministic order."""

    def __init__(self, model_set: ModelSet, candidates: list[RelationCandidate]) -> None:
        order = {m.model_id: i for i, m in enumerate(model_set)}
        unit_order = {
            m.model_id: {u: i for i, u in enumerate(m.units)} for m in model_set
        }

        def key(c: RelationCandidate):
            return (
                _KIND_RANK[c.kind],
                order[c.parent_model],
                order[c.child_model],
                tuple(unit_order[c.parent_model][p] for p, _ in c.pairs),
                tuple(unit_order[c.child_model][ch] for _, ch in c.pairs),
            )

        self.candidates = tuple(sorted(candidates, key=key))
        self.by_id = {c.id: c for c in self.candidates}

    def __iter__(self):
        return iter(self.candidates)

    def __len__(self) -> int:
        return len(self.candidates)

    def of_kind(self, kind: str) -> tuple[RelationCandidate, ...]:
        return tuple(c for c in self.candidates if c.kind == kind)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "relations": [c.to_dict() for c in self.candidates],
        }


def _pair_candidates(
    b1: BehavioralModel, b2: BehavioralModel, strategy: Strategy
) -> list[RelationCandidate]:
    """Candidates detected when scanning the ordered pair (b1, b2)."""
    eq = _equivalence(b1, b2, strategy)
    found: list[RelationCandidate] = []

    primaries = [(u, b2.root) for u in b1.units if (u, b2.root) in eq]
    for p, c in primaries:
        found.append(
            _candidate(classify_primary((p, c), b1, b2), b1, b2, p, c, eq[(p, c)])
        )
    if len(dict.fromkeys(p for p, _ in primaries)) >= 2:
        found.append(
            RelationCandidate(
                kind=KIND_MULTI_PRECONDITIONS,
                parent_model=b1.model_id,
                child_model=b2.model_id,
                pairs=tuple(primaries),
                pair_scores=tuple(eq[pair] for pair in primaries),
            )
        )
    for c1, c2 in _sub_paths_from_eq(b1, b2, eq, SUB_PATH_MIN_LEN):
        found.append(
            RelationCandidate(
                kind=KIND_SUB_PATH,
                parent_model=b1.model_id,
                child_model=b2.model_id,
                pairs=tuple(zip(c1, c2)),
                pair_scores=tuple(eq[(u, v)] for u, v in zip(c1, c2)),
            )
        )
    found.extend(_non_root_from_eq(b1, b2, eq))
    return found


def relation_graph(
    model_set: ModelSet, strategy: Strategy, max_workers: int | None = None
) -> RelationGraph:
    """Run every detector over all ordered model pairs and merge.

    Candidates of symmetric kinds are reduced to one per unordered model
    pair, parented on the lexicographically smaller model id. Detection of
    the ordered pairs is independent; with ``max_workers`` > 1 the pairs
    are processed in a thread pool and merged by candidate id, which keeps
    the result identical to the sequential run.
    """
    models = list(model_set)
    ordered_pairs = [
        (b1, b2) for b1 in models for b2 in models if b1.model_id != b2.model_id
    ]
    if max_workers and max_workers > 1 and ordered_pairs:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            batches = list(
                pool.map(lambda pair: _pair_candidates(*pair, strategy), ordered_pairs)
            )
    else:
        batches = [_pair_candidates(b1, b2, strategy) for b1, b2 in ordered_pairs]

    merged: dict[str, RelationCandidate] = {}
    for batch in batches:
        for cand in batch:
            if cand.kind in SYMMETRIC_KINDS and cand.parent_model > cand.child_model:
                cand = cand.mirrored()
            previous = merged.get(cand.id)
            if previous is None or (previous.swapped and not cand.swapped):
                merged[cand.id] = cand
    return RelationGraph(model_set, list(merged.values()))
