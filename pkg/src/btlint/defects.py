"""Mapping of integration relations plus analyst verdicts to defects.

Four defect classes are derived from the relation graph:

* incomplete: a non-initialisation model that is the child of no primary
  relation. Flagged automatically; no analyst confirmation applies.
* ambiguous: a multi-preconditions candidate. Confirmed when the analyst
  rejects it, or accepts only some of its parent pairs; dismissed when all
  pairs are accepted.
* incorrect: a model pair that has non-root relations but no primary
  relation in either direction. Confirmed when the analyst accepts a
  non-root candidate of the pair, dismissed when verdicts are all
  rejections.
* redundant: a sub-path candidate. Confirmed on acceptance, dismissed on
  rejection.

Everything here is a pure function of (model set, graph, decisions).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .model import ModelSet
from .relations import (
    KIND_MULTI_PRECONDITIONS,
    KIND_ROOT_ROOT,
    KIND_SUB_PATH,
    NON_ROOT_KINDS,
    PRIMARY_KINDS,
    RelationCandidate,
    RelationGraph,
)
from .util import canonical_json, natural_key

INCOMPLETE = "incomplete"
AMBIGUOUS = "ambiguous"
INCORRECT = "incorrect"
REDUNDANT = "redundant"
DEFECT_TYPES = (INCOMPLETE, AMBIGUOUS, INCORRECT, REDUNDANT)
_TYPE_RANK = {t: i for i, t in enumerate(DEFECT_TYPES)}

AUTOMATIC = "automatic"
PENDING = "pending"
CONFIRMED = "confirmed"
DISMISSED = "dismissed"

ACCEPTED = "accepted"
REJECTED = "rejected"
VERDICTS = (ACCEPTED, REJECTED)

_RELATION_LABEL = {
    INCOMPLETE: "no relation",
    AMBIGUOUS: "multi-preconditions relation",
    INCORRECT: "non-root relation",
    REDUNDANT: "sub-path relation",
}


@dataclass(frozen=True)
class Decision:
    """An analyst verdict on one relation candidate.

    ``pair_verdicts`` optionally overrides the candidate-level verdict for
    individual unit pairs, keyed ``"<parent unit>~<child unit>"``.
    """

    relation_id: str
    verdict: str
    pair_verdicts: Mapping[str, str] = field(default_factory=dict)
    note: str = ""
    timestamp: str = ""

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")
        for key, v in self.pair_verdicts.items():
            if v not in VERDICTS:
                raise ValueError(f"pair verdict for {key!r} must be one of {VERDICTS}")

    def to_dict(self) -> dict:
        return {
            "relation_id": self.relation_id,
            "verdict": self.verdict,
            "pair_verdicts": dict(sorted(self.pair_verdicts.items())),
            "note": self.note,
            "timestamp": self.timestamp,
        }


@dataclass(frozen=True)
class Defect:
    defect_type: str
    subjects: tuple[str, ...]
    evidence: tuple[str, ...]
    confirmation: str
    issue_text: str

    def to_dict(self) -> dict:
        return {
            "type": self.defect_type,
            "models": list(self.subjects),
            "relations": list(self.evidence),
            "status": self.confirmation,
            "issue": self.issue_text,
        }


@dataclass(frozen=True)
class DefectReport:
    defects: tuple[Defect, ...]

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "defects": [d.to_dict() for d in self.defects],
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    def actionable(self) -> tuple[Defect, ...]:
        """Defects that fail a lint run: automatic or analyst-confirmed."""
        return tuple(d for d in self.defects if d.confirmation in (AUTOMATIC, CONFIRMED))

    def render_text(self) -> str:
        if not self.defects:
            return "no defects detected\n"
        rows = [("BM", "Integration Relation", "Defects Type", "Issue")]
        for d in self.defects:
            rows.append(
                (
                    ", ".join(d.subjects),
                    _RELATION_LABEL[d.defect_type],
                    f"{d.defect_type} [{d.confirmation}]",
                    d.issue_text,
                )
            )
        widths = [max(len(r[i]) for r in rows) for i in range(3)]
        lines = []
        for i, row in enumerate(rows):
            lines.append(
                "  ".join(
                    [row[0].ljust(widths[0]), row[1].ljust(widths[1]),
                     row[2].ljust(widths[2]), row[3]]
                ).rstrip()
            )
            if i == 0:
                lines.append("-" * len(lines[0]))
        return "\n".join(lines) + "\n"


def _incomplete_issue(model_id: str) -> str:
    return (
        f"The precondition of {model_id} is missing. That means, it is "
        "unknown when these behaviors occur."
    )


_AMBIGUOUS_ISSUE = (
    "If this relation is unaccepted, the requirements associated with them "
    "are ambiguous and there exist multiple interpretations of integration."
)

_REDUNDANT_ISSUE = (
    "Same sequence of behaviors have been mentioned in the requirements "
    "associated with the BMs."
)


def _incorrect_issue(subjects) -> str:
    ordered = sorted(subjects, key=natural_key)
    return (
        f"The requirements associated with {' and '.join(ordered)} have "
        "been described inaccurately."
    )


def detect_incomplete(model_set: ModelSet, graph: RelationGraph) -> list[Defect]:
    """Models that no primary relation establishes, minus initialisation ones.

    Independent of analyst decisions.
    """
    covered: set[str] = set()
    for c in graph:
        if c.kind in PRIMARY_KINDS or c.kind == KIND_MULTI_PRECONDITIONS:
            covered.add(c.child_model)
            if c.kind == KIND_ROOT_ROOT:
                # Symmetric: the deduplicated candidate establishes both roots.
                covered.add(c.parent_model)
    out = []
    for m in model_set:
        if m.is_init or m.model_id in covered:
            continue
        out.append(
            Defect(
                defect_type=INCOMPLETE,
                subjects=(m.model_id,),
                evidence=(),
                confirmation=AUTOMATIC,
                issue_text=_incomplete_issue(m.model_id),
            )
        )
    return out


def _pair_verdict(
    pair: tuple[str, str],
    candidate: RelationCandidate,
    decisions: Mapping[str, Decision],
    graph: RelationGraph,
) -> str | None:
    """Effective verdict on one parent/child unit pair of a candidate.

    Resolution order: a per-pair override on the candidate's decision, the
    candidate-level verdict, then a verdict on the single-pair primary
    candidate covering the same unit pair (possibly stored mirrored).
    """
    decision = decisions.get(candidate.id)
    key = f"{pair[0]}~{pair[1]}"
    if decision is not None:
        return decision.pair_verdicts.get(key, decision.verdict)
    for other in graph:
        if other.kind not in PRIMARY_KINDS or len(other.pairs) != 1:
            continue
        same = (
            other.parent_model == candidate.parent_model
            and other.child_model == candidate.child_model
            and other.pairs[0] == pair
        )
        mirrored = (
            other.parent_model == candidate.child_model
            and other.child_model == candidate.parent_model
            and other.pairs[0] == (pair[1], pair[0])
        )
        if same or mirrored:
            other_decision = decisions.get(other.id)
            if other_decision is not None:
                return other_decision.pair_verdicts.get(
                    f"{other.pairs[0][0]}~{other.pairs[0][1]}", other_decision.verdict
                )
    return None


def detect_ambiguous(
    graph: RelationGraph, decisions: Mapping[str, Decision]
) -> list[Defect]:
    out = []
    for c in graph.of_kind(KIND_MULTI_PRECONDITIONS):
        verdicts = [_pair_verdict(p, c, decisions, graph) for p in c.pairs]
        if c.id not in decisions and all(v is None for v in verdicts):
            status = PENDING
        elif all(v == ACCEPTED for v in verdicts):
            status = DISMISSED
        else:
            status = CONFIRMED
        out.append(
            Defect(
                defect_type=AMBIGUOUS,
                subjects=(c.parent_model, c.child_model),
                evidence=(c.id,),
                confirmation=status,
                issue_text=_AMBIGUOUS_ISSUE,
            )
        )
    return out


def detect_incorrect(
    graph: RelationGraph, decisions: Mapping[str, Decision]
) -> list[Defect]:
    primary_pairs = {
        frozenset((c.parent_model, c.child_model))
        for c in graph
        if c.kind in PRIMARY_KINDS
    }
    groups: dict[frozenset, list[RelationCandidate]] = {}
    for c in graph:
        if c.kind in NON_ROOT_KINDS:
            groups.setdefault(c.models(), []).append(c)

    out = []
    for models, candidates in groups.items():
        if models in primary_pairs:
            continue
        verdicts = [decisions[c.id].verdict for c in candidates if c.id in decisions]
        if ACCEPTED in verdicts:
            status = CONFIRMED
        elif REJECTED in verdicts:
            status = DISMISSED
        else:
            status = PENDING
        first = candidates[0]
        out.append(
            Defect(
                defect_type=INCORRECT,
                subjects=(first.parent_model, first.child_model),
                evidence=tuple(c.id for c in candidates),
                confirmation=status,
                issue_text=_incorrect_issue(models),
            )
        )
    return out


def detect_redundant(
    graph: RelationGraph, decisions: Mapping[str, Decision]
) -> list[Defect]:
    out = []
    for c in graph.of_kind(KIND_SUB_PATH):
        decision = decisions.get(c.id)
        if decision is None:
            status = PENDING
        elif decision.verdict == ACCEPTED:
            status = CONFIRMED
        else:
            status = DISMISSED
        out.append(
            Defect(
                defect_type=REDUNDANT,
                subjects=(c.parent_model, c.child_model),
                evidence=(c.id,),
                confirmation=status,
                issue_text=_REDUNDANT_ISSUE,
            )
        )
    return out


def defect_report(
    model_set: ModelSet,
    graph: RelationGraph,
    decisions: Mapping[str, Decision] | None = None,
) -> DefectReport:
    """Aggregate the four detectors into one deterministic report."""
    decisions = decisions or {}
    defects = (
        detect_incomplete(model_set, graph)
        + detect_ambiguous(graph, decisions)
        + detect_incorrect(graph, decisions)
        + detect_redundant(graph, decisions)
    )
    defects.sort(
        key=lambda d: (_TYPE_RANK[d.defect_type], tuple(natural_key(s) for s in d.subjects))
    )
    return DefectReport(tuple(defects))
