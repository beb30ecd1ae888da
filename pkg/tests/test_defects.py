"""Defect detection from the relation graph plus analyst decisions."""

from __future__ import annotations

import pytest

from btlint.defects import (
    AMBIGUOUS,
    AUTOMATIC,
    CONFIRMED,
    DISMISSED,
    INCOMPLETE,
    INCORRECT,
    PENDING,
    REDUNDANT,
    Decision,
    defect_report,
    detect_ambiguous,
    detect_incomplete,
    detect_incorrect,
    detect_redundant,
)
from btlint.model import ModelSet
from btlint.relations import (
    KIND_LEAF_LEAF,
    KIND_MULTI_PRECONDITIONS,
    KIND_SUB_PATH,
    relation_graph,
)

from test_relations import chain_model


MP_ID = "b9.w0+w6~b2.w0#multi-preconditions"
LL_ID = "b10.w1~b8.w3#leaf-leaf"
SP_IDS = ("b1.w0+w1+w2~b9.w4+w5+w6#sub-path", "b6.w0+w1+w2~b9.w1+w2+w3#sub-path")


@pytest.fixture(scope="module")
def graph(microwave, strategy):
    return relation_graph(microwave, strategy)


def decide(relation_id, verdict, pair_verdicts=None):
    return Decision(relation_id=relation_id, verdict=verdict,
                    pair_verdicts=pair_verdicts or {})


def statuses(defects):
    return {(d.defect_type, d.subjects): d.confirmation for d in defects}


# --- incomplete ----------------------------------------------------------------

def test_incomplete_exactly_b8(microwave, strategy, graph):
    got = detect_incomplete(microwave, graph)
    assert [d.subjects for d in got] == [("b8",)]
    assert got[0].confirmation == AUTOMATIC
    assert "precondition of b8 is missing" in got[0].issue_text


def test_incomplete_init_exemption(strategy):
    lonely = chain_model("solo", ("A", "x"), init=True)
    other = chain_model("m", ("B", "y"))
    ms = ModelSet([lonely, other])
    got = detect_incomplete(ms, relation_graph(ms, strategy))
    assert [d.subjects for d in got] == [("m",)]


def test_incomplete_all_init_is_empty(strategy):
    ms = ModelSet([
        chain_model("a", ("A", "x"), init=True),
        chain_model("b", ("B", "y"), init=True),
    ])
    assert detect_incomplete(ms, relation_graph(ms, strategy)) == []


def test_incomplete_covered_by_root_root_either_side(strategy):
    ms = ModelSet([chain_model("a", ("A", "x")), chain_model("b", ("A", "x"))])
    assert detect_incomplete(ms, relation_graph(ms, strategy)) == []


def test_incomplete_ignores_decisions(microwave, strategy, graph):
    with_decisions = detect_incomplete(microwave, graph)
    assert with_decisions == detect_incomplete(microwave, graph)


# --- ambiguous -----------------------------------------------------------------

def test_ambiguous_pending_without_decision(graph):
    got = detect_ambiguous(graph, {})
    assert statuses(got) == {(AMBIGUOUS, ("b9", "b2")): PENDING}


def test_ambiguous_rejected_confirms(graph):
    got = detect_ambiguous(graph, {MP_ID: decide(MP_ID, "rejected")})
    assert statuses(got) == {(AMBIGUOUS, ("b9", "b2")): CONFIRMED}


def test_ambiguous_full_acceptance_dismisses(graph):
    got = detect_ambiguous(graph, {MP_ID: decide(MP_ID, "accepted")})
    assert statuses(got) == {(AMBIGUOUS, ("b9", "b2")): DISMISSED}


def test_ambiguous_partial_pair_acceptance_confirms(graph):
    decision = decide(MP_ID, "accepted", {"w6~w0": "rejected"})
    got = detect_ambiguous(graph, {MP_ID: decision})
    assert statuses(got) == {(AMBIGUOUS, ("b9", "b2")): CONFIRMED}


def test_ambiguous_follows_pairwise_primary_decisions(graph):
    # Accepting each underlying primary candidate individually counts as
    # accepting all the parent pairs.
    rr = "b2.w0~b9.w0#root-root"
    lr = "b9.w6~b2.w0#leaf-root"
    decisions = {rr: decide(rr, "accepted"), lr: decide(lr, "accepted")}
    got = detect_ambiguous(graph, decisions)
    assert statuses(got) == {(AMBIGUOUS, ("b9", "b2")): DISMISSED}
    # One of them rejected leaves the ambiguity standing.
    decisions = {rr: decide(rr, "accepted"), lr: decide(lr, "rejected")}
    got = detect_ambiguous(graph, decisions)
    assert statuses(got) == {(AMBIGUOUS, ("b9", "b2")): CONFIRMED}


def test_ambiguous_empty_without_candidates(strategy):
    ms = ModelSet([chain_model("a", ("A", "x")), chain_model("b", ("B", "y"))])
    assert detect_ambiguous(relation_graph(ms, strategy), {}) == []


# --- incorrect -----------------------------------------------------------------

def test_incorrect_accepted_confirms(graph):
    got = detect_incorrect(graph, {LL_ID: decide(LL_ID, "accepted")})
    assert statuses(got) == {(INCORRECT, ("b10", "b8")): CONFIRMED}
    (defect,) = got
    assert "b8 and b10" in defect.issue_text


def test_incorrect_rejected_dismisses(graph):
    got = detect_incorrect(graph, {LL_ID: decide(LL_ID, "rejected")})
    assert statuses(got) == {(INCORRECT, ("b10", "b8")): DISMISSED}


def test_incorrect_needs_absence_of_primaries(graph, strategy):
    # b1/b9 share non-root pairs, but a primary relation integrates them,
    # so only the b10/b8 pair is reported.
    got = detect_incorrect(graph, {})
    assert [d.subjects for d in got] == [("b10", "b8")]


def test_incorrect_primary_in_either_direction_suppresses(strategy):
    parent = chain_model("p", ("R", "r"), ("SHARED", "s"), ("T", "t"))
    child = chain_model("c", ("R", "r"), ("SHARED", "s"), ("U", "u"))
    ms = ModelSet([parent, child])
    graph = relation_graph(ms, strategy)
    assert graph.of_kind("branch-branch")
    assert detect_incorrect(graph, {}) == []


# --- redundant -----------------------------------------------------------------

def test_redundant_acceptance_confirms_both(graph):
    decisions = {i: decide(i, "accepted") for i in SP_IDS}
    got = detect_redundant(graph, decisions)
    assert statuses(got) == {
        (REDUNDANT, ("b1", "b9")): CONFIRMED,
        (REDUNDANT, ("b6", "b9")): CONFIRMED,
    }


def test_redundant_rejection_dismisses(graph):
    decisions = {SP_IDS[0]: decide(SP_IDS[0], "rejected")}
    got = detect_redundant(graph, decisions)
    assert statuses(got) == {
        (REDUNDANT, ("b1", "b9")): DISMISSED,
        (REDUNDANT, ("b6", "b9")): PENDING,
    }


def test_redundant_empty_without_candidates(strategy):
    ms = ModelSet([chain_model("a", ("A", "x")), chain_model("b", ("B", "y"))])
    assert detect_redundant(relation_graph(ms, strategy), {}) == []


# --- aggregate report ------------------------------------------------------------

def test_report_empty_model_set(strategy):
    ms = ModelSet([])
    report = defect_report(ms, relation_graph(ms, strategy), {})
    assert report.defects == ()
    assert report.render_text() == "no defects detected\n"


def test_report_all_rejected(microwave, strategy, graph):
    decisions = {
        c.id: decide(c.id, "rejected")
        for c in graph
        if c.kind in (KIND_MULTI_PRECONDITIONS, KIND_SUB_PATH, KIND_LEAF_LEAF)
    }
    report = defect_report(microwave, graph, decisions)
    got = statuses(report.defects)
    assert got[(INCOMPLETE, ("b8",))] == AUTOMATIC
    assert got[(AMBIGUOUS, ("b9", "b2"))] == CONFIRMED
    assert got[(INCORRECT, ("b10", "b8"))] == DISMISSED
    assert got[(REDUNDANT, ("b1", "b9"))] == DISMISSED
    assert got[(REDUNDANT, ("b6", "b9"))] == DISMISSED


def test_report_deterministic_bytes(microwave, strategy, graph):
    decisions = {MP_ID: decide(MP_ID, "rejected")}
    a = defect_report(microwave, graph, decisions).to_json()
    b = defect_report(microwave, graph, dict(decisions)).to_json()
    assert a == b


def test_decision_monotonicity(microwave, strategy, graph):
    base = defect_report(microwave, graph, {MP_ID: decide(MP_ID, "rejected")})
    more = defect_report(
        microwave, graph,
        {MP_ID: decide(MP_ID, "rejected"), SP_IDS[0]: decide(SP_IDS[0], "accepted")},
    )
    before = {k: v for k, v in statuses(base.defects).items() if k[1] != ("b1", "b9")}
    after = {k: v for k, v in statuses(more.defects).items() if k[1] != ("b1", "b9")}
    assert before == after


def test_decision_validation():
    with pytest.raises(ValueError):
        Decision(relation_id="x", verdict="maybe")
    with pytest.raises(ValueError):
        Decision(relation_id="x", verdict="accepted", pair_verdicts={"a~b": "nope"})
