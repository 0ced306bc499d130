"""Acceptance suite: one test per shipped criterion, one printed verdict each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict lines;
each test also fails normally, so plain ``pytest`` enforces the same gate.
The web client's end-to-end check (criterion 10) lives in the frontend suite:
``cd frontend && npm test``.
"""

from __future__ import annotations

import json
import random
import time
from pathlib import Path

from reqimpact.changes import Change, ChangeType, Rationale
from reqimpact.impact import Outcome, session_impact, traverse
from reqimpact.jsonio import canonical_dumps
from reqimpact.model import requirements_model_from_dict, requirements_model_to_dict
from reqimpact.propagation import replay, session_to_dict, start_session
from reqimpact.aadl import export_architecture, import_architecture
from conftest import fixture_path, load_json
from walk_oracle import oracle_terminals, random_path


def report(number: int, ok: bool, detail: str) -> None:
    print(f"[criterion-{number}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {number}: {detail}"


def test_criterion_1_rule_tables_match_the_transcription(rules):
    tables = load_json(Path(__file__).parent / "data" / "published_tables.json")
    mismatches: list[str] = []

    expected_propagation = {
        f"{change_type}/{kind}/out": cell
        for change_type, row in tables["propagation"].items()
        for kind, cell in row.items()
    }
    actual_propagation = {addr: [e.spec for e in cell] for addr, cell in rules.propagation.items()}
    for addr in sorted(set(expected_propagation) | set(actual_propagation)):
        if expected_propagation.get(addr) != actual_propagation.get(addr):
            mismatches.append(f"propagation {addr}")

    expected_added = {}
    for kind, outcome in tables["add_requirement"]["existing_to_new"].items():
        expected_added[f"{kind}/in"] = outcome
    for kind, outcome in tables["add_requirement"]["new_to_existing"].items():
        expected_added[f"{kind}/out"] = outcome
    actual_added = {addr: outcome.value for addr, outcome in rules.add_requirement.items()}
    for addr in sorted(set(expected_added) | set(actual_added)):
        if expected_added.get(addr) != actual_added.get(addr):
            mismatches.append(f"add_requirement {addr}")

    expected_traversal = {
        f"{change_type}/{kind}/{direction}": action
        for change_type, sides in tables["traversal"].items()
        for direction, row in sides.items()
        for kind, action in row.items()
    }
    actual_traversal = {addr: action.value for addr, action in rules.traversal.items()}
    for addr in sorted(set(expected_traversal) | set(actual_traversal)):
        if expected_traversal.get(addr) != actual_traversal.get(addr):
            mismatches.append(f"traversal {addr}")

    report(1, not mismatches, f"{len(mismatches)} cell mismatches against the transcription fixture")


def test_criterion_2_walkthrough_session_reproduces_the_path(rpm_model, rpm_traces, rules, rpm_change, rpm_choices):
    started = time.perf_counter()
    session = replay(rpm_model, rpm_traces, rules, rpm_change, rpm_choices)
    elapsed = time.perf_counter() - started
    statuses = {req_id: node.status.value for req_id, node in session.nodes.items()}
    expected = {
        "R14": "StartingImpacted",
        "R7": "Impacted",
        "R9": "Impacted",
        "R4": "NoImpact",
    }
    ok = statuses == expected and "R6" not in session.nodes and not session.pending and elapsed < 1.0
    report(2, ok, f"path tags {statuses}, R6 untouched, replay took {elapsed:.3f}s (< 1s)")


def test_criterion_3_traversal_reaches_the_refining_leaves(hierarchy_path, rules, rpm_session):
    from_each = {selected: traverse(hierarchy_path, selected, rules) for selected in ("N-TOP", "N-MID", "N-LEAF")}
    ok_a = all(terminals == {"N-LEAF"} for terminals in from_each.values())

    result = session_impact(rpm_session, "R14")
    elements = {c.element for c in result.candidates}
    ok_b = result.terminals == {"R9"} and elements == {"SD", "SDC", "SDM", "AS", "AR"}
    report(
        3,
        ok_a and ok_b,
        f"three-node paths all end at the leaf ({ok_a}); walkthrough terminals {sorted(result.terminals)} "
        f"with candidates {sorted(elements)} ({ok_b})",
    )


def test_criterion_4_added_requirements_follow_the_relation_table(rpm_model, rpm_traces, rules):
    def verdict(relations):
        change = Change(
            type=ChangeType.ADD_REQUIREMENT,
            target="RX",
            payload={
                "requirement": {"id": "RX", "text": "x", "properties": [{"id": "p-x", "text": "x"}]},
                "relations": relations,
            },
        )
        return session_impact(start_session(rpm_model, rpm_traces, rules, change), None)

    refines = verdict([{"id": "RX-refines-R5", "source": "RX", "target": "R5", "kind": "Refines"}])
    traced_r5 = {c.element for c in refines.candidates}
    ok_refines = refines.outcome is Outcome.CANDIDATES and traced_r5 == {"SD", "SDC", "SDM", "sd_blood_strg"}

    contained = verdict([{"id": "R14-contains-RX", "source": "R14", "target": "RX", "kind": "Contains"}])
    ok_contained = contained.outcome is Outcome.NO_ARCH_IMPACT

    unrelated = verdict([])
    ok_unrelated = unrelated.outcome is Outcome.MANUAL_ANALYSIS_REQUIRED

    report(
        4,
        ok_refines and ok_contained and ok_unrelated,
        f"refining R5 yields {sorted(traced_r5)}; contained-only gives {contained.outcome.value}; "
        f"relation-free gives {unrelated.outcome.value}",
    )


def test_criterion_5_dispatch_outcomes_by_change_kind(rpm_model, rpm_traces, rules):
    failures: list[str] = []

    for target, change_type in (
        ("R4-refines-R6", ChangeType.DELETE_RELATION),
        ("R4-refines-R6", ChangeType.UPDATE_RELATION),
        ("R8-requires-R10", ChangeType.ADD_RELATION),
    ):
        payload = None
        if change_type is ChangeType.UPDATE_RELATION:
            payload = {"kind": "Requires"}
        if change_type is ChangeType.ADD_RELATION:
            payload = {"relation": {"id": target, "source": "R8", "target": "R10", "kind": "Requires"}}
        session = start_session(rpm_model, rpm_traces, rules, Change(type=change_type, target=target, payload=payload))
        if session_impact(session, None).outcome is not Outcome.NO_ARCH_IMPACT:
            failures.append(change_type.value)

    session = start_session(rpm_model, rpm_traces, rules, Change(type=ChangeType.ADD_PROPERTY, target="R14"))
    if session_impact(session, "R14").outcome is not Outcome.MANUAL_ANALYSIS_REQUIRED:
        failures.append("AddProperty")

    refactorings = {
        ChangeType.ADD_RELATION: ("R8-requires-R10", {"relation": {"id": "R8-requires-R10", "source": "R8", "target": "R10", "kind": "Requires"}}),
        ChangeType.DELETE_RELATION: ("R4-refines-R6", None),
        ChangeType.UPDATE_RELATION: ("R4-refines-R6", {"kind": "Requires"}),
        ChangeType.ADD_REQUIREMENT: ("RX", {"requirement": {"id": "RX", "text": "x", "properties": [{"id": "p-x", "text": "x"}]}}),
        ChangeType.DELETE_REQUIREMENT: ("R8", None),
        ChangeType.ADD_PROPERTY: ("R8", None),
        ChangeType.ADD_CONSTRAINT_TO_PROPERTY: ("R8", {"property_id": "p-generate-alarm"}),
        ChangeType.CHANGE_PROPERTY: ("R8", {"property_id": "p-generate-alarm"}),
        ChangeType.CHANGE_CONSTRAINT_OF_PROPERTY: ("R8", {"property_id": "p-generate-alarm"}),
        ChangeType.DELETE_PROPERTY: ("R8", {"property_id": "p-generate-alarm"}),
        ChangeType.DELETE_CONSTRAINT_OF_PROPERTY: ("R8", {"property_id": "p-generate-alarm"}),
    }
    assert set(refactorings) == set(ChangeType)
    for change_type, (target, payload) in refactorings.items():
        change = Change(type=change_type, target=target, rationale=Rationale.REFACTORING, payload=payload)
        session = start_session(rpm_model, rpm_traces, rules, change)
        if session_impact(session, None).outcome is not Outcome.NO_ARCH_IMPACT:
            failures.append(f"Refactoring/{change_type.value}")

    report(5, not failures, f"unexpected outcomes: {failures or 'none'}")


def test_criterion_6_traverse_equals_the_brute_force_oracle(rules):
    rng = random.Random(987654321)
    runs = 1000
    discrepancies = 0
    started = time.perf_counter()
    for _ in range(runs):
        path, selected = random_path(rng, max_nodes=8)
        if traverse(path, selected, rules) != oracle_terminals(path, selected, rules):
            discrepancies += 1
    elapsed = time.perf_counter() - started
    ok = discrepancies == 0 and elapsed < 30.0
    report(6, ok, f"{runs} random paths, {discrepancies} discrepancies, {elapsed:.2f}s (< 30s)")


def test_criterion_7_replay_and_round_trips_are_byte_identical(
    rpm_model, rpm_traces, rules, rpm_change, rpm_choices
):
    first = canonical_dumps(session_to_dict(replay(rpm_model, rpm_traces, rules, rpm_change, rpm_choices)))
    second = canonical_dumps(session_to_dict(replay(rpm_model, rpm_traces, rules, rpm_change, rpm_choices)))
    ok_session = first == second

    raw = fixture_path("rpm", "requirements.json").read_bytes()
    model, _ = requirements_model_from_dict(json.loads(raw))
    ok_model = canonical_dumps(requirements_model_to_dict(model)).encode("utf-8") == raw

    report(7, ok_session and ok_model, f"session replay identical: {ok_session}; model round-trip identical: {ok_model}")


def test_criterion_8_pruning_keeps_the_unimpacted_sensor_out(bp_session):
    result = session_impact(bp_session, "R3")
    elements = {c.element for c in result.candidates}
    ok = result.terminals == {"R2"} and elements == {"SD_BLOOD"} and "SD_TEMPERATURE" not in elements
    report(8, ok, f"terminals {sorted(result.terminals)}, candidates {sorted(elements)}, temperature sensor excluded")


def test_criterion_9_architecture_import_and_idempotence():
    text = fixture_path("rpm", "architecture.aadl").read_text(encoding="utf-8")
    model, diagnostics = import_architecture(text)
    errors = [d for d in diagnostics if d.severity == "error"]
    parents = {el.id: el.parent for el in model.elements}
    expected_parents = {
        "SD": None,
        "SDC": None,
        "HPC": None,
        "CPC": None,
        "HPC.SDM": "HPC",
        "HPC.AS": "HPC",
        "HPC.WS": "HPC",
        "CPC.AR": "CPC",
        "CPC.WC": "CPC",
        "SD.sd_temp_edp1": "SD",
        "SDC.sdc_temp_edp1": "SDC",
        "SDC.sdc_temp_edp2": "SDC",
    }
    again, re_diagnostics = import_architecture(export_architecture(model))
    ok = parents == expected_parents and not errors and again == model and not re_diagnostics
    report(
        9,
        ok,
        f"{len(model.elements)} elements with expected parentage, {len(errors)} error diagnostics, "
        f"re-import identical: {again == model}",
    )
