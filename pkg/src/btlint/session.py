"""Analyst review sessions: a model set, its relation graph and a decision log.

The graph is computed once when the session opens; models and strategy are
immutable for the session's lifetime. Decisions append to a log (later
decisions on the same relation supersede earlier ones, but history is
kept) and the defect report is always derived from the current effective
decisions, never cached.
"""

from __future__ import annotations

import json
import os
import warnings
from datetime import datetime, timezone

from .bts import SchemaError, parse_bts
from .defects import Decision, DefectReport, defect_report
from .model import ModelSet
from .relations import RelationGraph, relation_graph
from .similarity import Strategy, default_strategy, load_strategy
from .util import canonical_json


class UnknownRelation(Exception):
    pass


class StaleDecision(UserWarning):
    """A replayed decision references a relation that no longer exists."""


_DECISION_KEYS = {"relation_id", "verdict", "pair_verdicts", "note", "timestamp"}


def decision_from_dict(data: dict) -> Decision:
    if not isinstance(data, dict):
        raise SchemaError("each decision must be an object")
    unknown = set(data) - _DECISION_KEYS
    if unknown:
        raise SchemaError(f"unknown decision keys: {sorted(unknown)}")
    for key in ("relation_id", "verdict"):
        if not isinstance(data.get(key), str) or not data[key]:
            raise SchemaError(f"decision requires a non-empty string {key!r}")
    pair_verdicts = data.get("pair_verdicts", {})
    if not isinstance(pair_verdicts, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in pair_verdicts.items()
    ):
        raise SchemaError("pair_verdicts must map strings to strings")
    try:
        return Decision(
            relation_id=data["relation_id"],
            verdict=data["verdict"],
            pair_verdicts=dict(pair_verdicts),
            note=str(data.get("note", "")),
            timestamp=str(data.get("timestamp", "")),
        )
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def decisions_from_json(text: str) -> list[Decision]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise SchemaError("a decision file holds a JSON array of decisions")
    return [decision_from_dict(d) for d in data]


class Session:
    """Single-analyst review state. Decision writes are serialised by the
    HTTP layer; everything here assumes one writer."""

    def __init__(
        self,
        model_set: ModelSet,
        strategy: Strategy,
        max_workers: int | None = None,
    ) -> None:
        self.model_set = model_set
        self.strategy = strategy
        self.graph: RelationGraph = relation_graph(model_set, strategy, max_workers)
        self.decision_log: list[Decision] = []
        self.warnings: list[str] = list(model_set.warnings())

    def effective_decisions(self) -> dict[str, Decision]:
        effective: dict[str, Decision] = {}
        for d in self.decision_log:
            if d.relation_id in self.graph.by_id:
                effective[d.relation_id] = d
        return effective

    def report(self) -> DefectReport:
        return defect_report(self.model_set, self.graph, self.effective_decisions())

    def record(self, decision: Decision) -> DefectReport:
        """Append a decision and return the recomputed report.

        Recording a decision identical to the currently effective one is a
        no-op; reversing a verdict supersedes without deleting history.
        """
        if decision.relation_id not in self.graph.by_id:
            raise UnknownRelation(f"no relation with id {decision.relation_id!r}")
        if not decision.timestamp:
            decision = Decision(
                relation_id=decision.relation_id,
                verdict=decision.verdict,
                pair_verdicts=decision.pair_verdicts,
                note=decision.note,
                timestamp=datetime.now(timezone.utc).isoformat(),
            )
        current = self.effective_decisions().get(decision.relation_id)
        if not (
            current is not None
            and current.verdict == decision.verdict
            and dict(current.pair_verdicts) == dict(decision.pair_verdicts)
            and current.note == decision.note
        ):
            self.decision_log.append(decision)
        return self.report()

    def replay(self, decisions: list[Decision]) -> None:
        """Load decisions from storage, warning about stale relation ids.

        Stale entries stay in the log (the audit trail is append-only) but
        never influence the report.
        """
        for d in decisions:
            if d.relation_id not in self.graph.by_id:
                message = f"decision references unknown relation {d.relation_id!r}"
                self.warnings.append(message)
                warnings.warn(message, StaleDecision, stacklevel=2)
            self.decision_log.append(d)


def sidecar_path(bts_path) -> str:
    return os.fspath(bts_path) + ".decisions.json"


def open_session(
    bts_path,
    strategy_path=None,
    max_workers: int | None = None,
) -> Session:
    """Parse inputs, compute the graph and load any sidecar decision log."""
    with open(bts_path, "r", encoding="utf-8") as fh:
        text = fh.read()
    model_set = parse_bts(text, filename=os.fspath(bts_path))
    strategy = load_strategy(strategy_path) if strategy_path else default_strategy()
    session = Session(model_set, strategy, max_workers=max_workers)
    sidecar = sidecar_path(bts_path)
    if os.path.exists(sidecar):
        with open(sidecar, "r", encoding="utf-8") as fh:
            session.replay(decisions_from_json(fh.read()))
    return session


def save_session(session: Session, path) -> None:
    """Write the full decision log (stale entries included) as JSON."""
    data = [d.to_dict() for d in session.decision_log]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(data))


def load_session(
    bts_path,
    decisions_path,
    strategy_path=None,
    max_workers: int | None = None,
) -> Session:
    """Open a session and replay a stored decision log over a fresh graph."""
    session = open_session(bts_path, strategy_path, max_workers=max_workers)
    with open(decisions_path, "r", encoding="utf-8") as fh:
        session.replay(decisions_from_json(fh.read()))
    return session
