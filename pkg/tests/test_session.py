"""Review sessions: decision recording, persistence and replay."""

from __future__ import annotations

import json
import shutil

import pytest

from btlint.defects import AUTOMATIC, CONFIRMED, DISMISSED, PENDING, Decision
from btlint.session import (
    SchemaError,
    StaleDecision,
    UnknownRelation,
    decisions_from_json,
    load_session,
    open_session,
    save_session,
    sidecar_path,
)
from btlint.similarity import StrategyInvalid

from conftest import MICROWAVE, TABLE1_DECISIONS

MP_ID = "b9.w0+w6~b2.w0#multi-preconditions"
LL_ID = "b10.w1~b8.w3#leaf-leaf"


def fresh_session(tmp_path):
    target = tmp_path / "microwave.bts"
    shutil.copy(MICROWAVE, target)
    return open_session(target), target


def test_open_session_everything_pending(tmp_path):
    session, _ = fresh_session(tmp_path)
    assert len(session.graph) == 27
    report = session.report()
    pending = [d for d in report.defects if d.confirmation == PENDING]
    automatic = [d for d in report.defects if d.confirmation == AUTOMATIC]
    assert len(automatic) == 1 and automatic[0].subjects == ("b8",)
    assert len(pending) == 4
    assert session.decision_log == []


def test_open_session_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        open_session(tmp_path / "nope.bts")


def test_open_session_invalid_strategy(tmp_path):
    session_file = tmp_path / "m.bts"
    shutil.copy(MICROWAVE, session_file)
    bad = tmp_path / "bad.strategy.json"
    bad.write_text(json.dumps({"weights": {"cname": 1}, "alpha": 2}))
    with pytest.raises(StrategyInvalid):
        open_session(session_file, bad)


def test_record_decision_updates_report(tmp_path):
    session, _ = fresh_session(tmp_path)
    report = session.record(Decision(relation_id=LL_ID, verdict="accepted"))
    by_subject = {d.subjects: d.confirmation for d in report.defects}
    assert by_subject[("b10", "b8")] == CONFIRMED
    report = session.record(Decision(relation_id=MP_ID, verdict="rejected"))
    by_subject = {d.subjects: d.confirmation for d in report.defects}
    assert by_subject[("b9", "b2")] == CONFIRMED


def test_record_unknown_relation(tmp_path):
    session, _ = fresh_session(tmp_path)
    with pytest.raises(UnknownRelation):
        session.record(Decision(relation_id="nope#root-root", verdict="accepted"))


def test_record_is_idempotent_and_supersedes(tmp_path):
    session, _ = fresh_session(tmp_path)
    session.record(Decision(relation_id=LL_ID, verdict="accepted", note="first"))
    assert len(session.decision_log) == 1
    session.record(Decision(relation_id=LL_ID, verdict="accepted", note="first"))
    assert len(session.decision_log) == 1  # identical decision: no-op
    report = session.record(Decision(relation_id=LL_ID, verdict="rejected", note="no"))
    assert len(session.decision_log) == 2  # history retained
    by_subject = {d.subjects: d.confirmation for d in report.defects}
    assert by_subject[("b10", "b8")] == DISMISSED


def test_save_load_round_trip(tmp_path):
    session, source = fresh_session(tmp_path)
    session.record(Decision(relation_id=LL_ID, verdict="accepted"))
    session.record(Decision(relation_id=MP_ID, verdict="rejected"))
    saved = tmp_path / "log.decisions.json"
    save_session(session, saved)
    loaded = load_session(source, saved)
    assert loaded.report().to_json() == session.report().to_json()
    assert [d.to_dict() for d in loaded.decision_log] == \
        [d.to_dict() for d in session.decision_log]


def test_load_warns_on_stale_relation(tmp_path):
    session, source = fresh_session(tmp_path)
    session.record(Decision(relation_id=LL_ID, verdict="accepted"))
    saved = tmp_path / "log.decisions.json"
    save_session(session, saved)

    # Drop model b10 from the source: the leaf-leaf relation disappears.
    text = source.read_text("utf-8")
    trimmed = text[: text.index("bt b10")]
    source.write_text(trimmed, "utf-8")
    with pytest.warns(StaleDecision):
        reloaded = load_session(source, saved)
    assert any("unknown relation" in w for w in reloaded.warnings)
    assert len(reloaded.decision_log) == 1  # audit trail kept
    assert reloaded.effective_decisions() == {}


def test_empty_log_is_pristine(tmp_path):
    session, source = fresh_session(tmp_path)
    empty = tmp_path / "empty.decisions.json"
    empty.write_text("[]")
    loaded = load_session(source, empty)
    assert loaded.decision_log == []
    assert loaded.report().to_json() == session.report().to_json()


def test_sidecar_autoload(tmp_path):
    session, source = fresh_session(tmp_path)
    session.record(Decision(relation_id=LL_ID, verdict="accepted"))
    save_session(session, sidecar_path(source))
    again = open_session(source)
    assert len(again.decision_log) == 1
    assert again.report().to_json() == session.report().to_json()


def test_table1_script_loads(tmp_path):
    session, source = fresh_session(tmp_path)
    decisions = decisions_from_json(TABLE1_DECISIONS.read_text("utf-8"))
    session.replay(decisions)
    assert not session.warnings
    confirmed = [d for d in session.report().defects if d.confirmation == CONFIRMED]
    assert len(confirmed) == 4


@pytest.mark.parametrize("payload", [
    '{"not": "a list"}',
    '[{"verdict": "accepted"}]',
    '[{"relation_id": "x", "verdict": "sideways"}]',
    '[{"relation_id": "x", "verdict": "accepted", "bogus": 1}]',
    '[{"relation_id": "x", "verdict": "accepted", "pair_verdicts": [1]}]',
    'nope',
])
def test_decision_file_schema_errors(payload):
    with pytest.raises(SchemaError):
        decisions_from_json(payload)
