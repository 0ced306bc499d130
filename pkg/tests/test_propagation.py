from __future__ import annotations

import json

import pytest

from reqimpact.changes import Change, ChangeType, Rationale
from reqimpact.jsonio import canonical_dumps
from reqimpact.model import requirements_model_from_dict, trace_model_from_dict
from reqimpact.propagation import (
    ChangeRejected,
    IllegalAlternative,
    MissingJustification,
    NodeStatus,
    SessionError,
    UnknownDecision,
    choose,
    is_complete,
    path,
    pending_decisions,
    replay,
    session_from_dict,
    session_to_dict,
    start_session,
)

EMPTY_TRACES = trace_model_from_dict({})


def tiny_model(relations):
    doc = {
        "requirements": [
            {"id": rid, "text": rid, "properties": [{"id": f"p-{rid}", "text": rid, "constraints": []}]}
            for rid in sorted({r[1] for r in relations} | {r[2] for r in relations})
        ],
        "relations": [
            {"id": rel_id, "source": src, "target": dst, "kind": kind} for rel_id, src, dst, kind in relations
        ],
    }
    model, _ = requirements_model_from_dict(doc)
    return model


def statuses(session):
    return {req_id: node.status.value for req_id, node in session.nodes.items()}


def test_start_opens_decisions_in_relation_order(rpm_model, rpm_traces, rules, rpm_change):
    session = start_session(rpm_model, rpm_traces, rules, rpm_change)
    assert statuses(session) == {"R14": "StartingImpacted"}
    assert not is_complete(session)
    opened = pending_decisions(session)
    assert [d.id for d in opened] == ["R14-contains-R4", "R14-contains-R7"]
    for decision in opened:
        assert decision.from_requirement == "R14"
        assert decision.change_type is ChangeType.ADD_CONSTRAINT_TO_PROPERTY
        assert decision.unspecified_cell is False
        assert [e.spec for e in decision.alternatives] == [
            "no-impact",
            "propagate:AddConstraintToProperty",
            "delete-relation",
        ]


def test_rejected_change_raises_with_violations(rpm_model, rpm_traces, rules):
    with pytest.raises(ChangeRejected) as caught:
        start_session(
            rpm_model, rpm_traces, rules, Change(type=ChangeType.DELETE_PROPERTY, target="R99")
        )
    assert [v.code for v in caught.value.violations] == ["UnknownRequirement"]


def test_full_walkthrough_marks_the_expected_nodes(rpm_session):
    session = rpm_session
    assert is_complete(session)
    assert statuses(session) == {
        "R14": "StartingImpacted",
        "R4": "NoImpact",
        "R7": "Impacted",
        "R9": "Impacted",
    }
    assert "R6" not in session.nodes  # nothing ever reached it
    walked = path(session)
    assert walked.complete
    assert [(e.from_requirement, e.to_requirement) for e in walked.edges] == [("R14", "R7"), ("R7", "R9")]
    # the impacted neighbors carry derived proposals of the propagated type
    assert session.nodes["R7"].accepted_change.type is ChangeType.ADD_CONSTRAINT_TO_PROPERTY
    assert session.nodes["R7"].accepted_change.payload is None
    assert session.nodes["R4"].accepted_change is None


def test_unknown_and_repeated_decisions(rpm_model, rpm_traces, rules, rpm_change):
    session = start_session(rpm_model, rpm_traces, rules, rpm_change)
    with pytest.raises(UnknownDecision, match="no pending decision"):
        choose(session, "nope", "no-impact")
    choose(session, "R14-contains-R4", "no-impact")
    with pytest.raises(UnknownDecision, match="already made"):
        choose(session, "R14-contains-R4", "no-impact")


def test_illegal_alternative_lists_the_menu(rpm_model, rpm_traces, rules, rpm_change):
    session = start_session(rpm_model, rpm_traces, rules, rpm_change)
    with pytest.raises(IllegalAlternative, match="no-impact, propagate:AddConstraintToProperty, delete-relation"):
        choose(session, "R14-contains-R4", "delete-requirement-and-relation")


def test_unspecified_cell_demands_justification(rpm_model, rpm_traces, rules, rpm_change):
    session = start_session(rpm_model, rpm_traces, rules, rpm_change)
    choose(session, "R14-contains-R4", "no-impact")
    choose(session, "R14-contains-R7", "propagate:AddConstraintToProperty")
    decision = pending_decisions(session)[0]
    assert decision.id == "R9-partially-refines-R7"
    assert decision.direction.value == "in"
    assert decision.unspecified_cell is True
    assert len(decision.alternatives) == 5
    with pytest.raises(MissingJustification):
        choose(session, decision.id, "propagate:AddConstraintToProperty")
    with pytest.raises(MissingJustification):
        choose(session, decision.id, "propagate:AddConstraintToProperty", justification="   ")
    choose(session, decision.id, "propagate:AddConstraintToProperty", justification="the warning text moves along")
    assert is_complete(session)
    assert session.choices[-1].justification == "the warning text moves along"


def test_singleton_no_impact_cells_resolve_themselves(rpm_model, rpm_traces, rules):
    # AddProperty across Contains offers nothing but no-impact
    session = start_session(
        rpm_model, rpm_traces, rules, Change(type=ChangeType.ADD_PROPERTY, target="R14")
    )
    assert is_complete(session)
    assert statuses(session) == {"R14": "StartingImpacted", "R4": "NoImpact", "R7": "NoImpact"}
    auto = [a for a in session.annotations if a.code == "AutoResolved"]
    assert sorted(a.relation for a in auto) == ["R14-contains-R4", "R14-contains-R7"]


def test_first_visit_wins_and_cancels_the_other_decision(rules):
    model = tiny_model([("r-contains", "A", "B", "Contains"), ("r-requires", "A", "B", "Requires")])
    session = start_session(
        model, EMPTY_TRACES, rules, Change(type=ChangeType.DELETE_PROPERTY, target="A")
    )
    assert [d.id for d in pending_decisions(session)] == ["r-contains", "r-requires"]
    choose(session, "r-contains", "propagate:DeleteProperty")
    # B is tagged now; the Requires decision became moot
    assert pending_decisions(session) == []
    assert statuses(session)["B"] == "Impacted"
    cancelled = [a for a in session.annotations if a.code == "Cancelled"]
    assert [a.relation for a in cancelled] == ["r-requires"]
    with pytest.raises(UnknownDecision):
        choose(session, "r-requires", "no-impact")


def test_already_visited_relations_are_annotated(rpm_session):
    noted = [a.relation for a in rpm_session.annotations if a.code == "AlreadyVisited"]
    # expanding R7 sees the relation it came in through; expanding R9 likewise
    assert noted == ["R14-contains-R7", "R9-partially-refines-R7"]


def test_refactoring_session_completes_immediately(rpm_model, rpm_traces, rules):
    session = start_session(
        rpm_model,
        rpm_traces,
        rules,
        Change(
            type=ChangeType.DELETE_PROPERTY,
            target="R14",
            rationale=Rationale.REFACTORING,
            payload={"property_id": "p-warn-doctor"},
        ),
    )
    assert is_complete(session)
    assert statuses(session) == {"R14": "StartingImpacted"}
    assert [a.code for a in session.annotations] == ["NoPropagation"]


def test_relation_change_sessions_complete_immediately(rpm_model, rpm_traces, rules):
    session = start_session(
        rpm_model, rpm_traces, rules, Change(type=ChangeType.DELETE_RELATION, target="R14-contains-R4")
    )
    assert is_complete(session)
    # the starting requirement is the relation's source
    assert statuses(session) == {"R14": "StartingImpacted"}

    session = start_session(
        rpm_model,
        rpm_traces,
        rules,
        Change(
            type=ChangeType.ADD_RELATION,
            target="R8-requires-R10",
            payload={"relation": {"id": "R8-requires-R10", "source": "R8", "target": "R10", "kind": "Requires"}},
        ),
    )
    assert statuses(session) == {"R8": "StartingImpacted"}


def test_added_requirement_sessions_complete_immediately(rpm_model, rpm_traces, rules):
    session = start_session(
        rpm_model,
        rpm_traces,
        rules,
        Change(
            type=ChangeType.ADD_REQUIREMENT,
            target="RX",
            payload={
                "requirement": {"id": "RX", "text": "new", "properties": [{"id": "p-x", "text": "x"}]},
                "relations": [{"id": "RX-refines-R5", "source": "RX", "target": "R5", "kind": "Refines"}],
            },
        ),
    )
    assert is_complete(session)
    assert statuses(session) == {"RX": "StartingImpacted"}


def test_replay_rebuilds_identical_state(rpm_model, rpm_traces, rules, rpm_change, rpm_choices, rpm_session):
    again = replay(rpm_model, rpm_traces, rules, rpm_change, rpm_choices)
    assert canonical_dumps(session_to_dict(again)) == canonical_dumps(session_to_dict(rpm_session))


def test_stored_sessions_verify_against_their_replay(rpm_session):
    doc = json.loads(canonical_dumps(session_to_dict(rpm_session)))
    loaded = session_from_dict(doc)
    assert session_to_dict(loaded) == doc

    tampered = json.loads(canonical_dumps(doc))
    tampered["path"]["nodes"]["R4"]["status"] = "Impacted"
    with pytest.raises(SessionError, match="does not match its own replay"):
        session_from_dict(tampered)


def test_replay_rejects_out_of_order_scripts(rpm_model, rpm_traces, rules, rpm_change, rpm_choices):
    shuffled = [rpm_choices[2], rpm_choices[0], rpm_choices[1]]
    # the third choice's decision does not exist until R7 is impacted
    with pytest.raises(UnknownDecision):
        replay(rpm_model, rpm_traces, rules, rpm_change, shuffled)
