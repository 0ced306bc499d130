from __future__ import annotations

import json
from pathlib import Path

import pytest

from reqimpact.changes import Change, ChangeType, Rationale, change_from_dict
from reqimpact.model import (
    Relation,
    RelationKind,
    architecture_model_from_dict,
    requirements_model_from_dict,
    trace_model_from_dict,
)
from reqimpact.propagation import NodeStatus, PathEdge, PathNode, PropagationPath, replay
from reqimpact.rules import default_rules

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"


def load_json(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))


def fixture_path(*parts: str) -> Path:
    return FIXTURES.joinpath(*parts)


@pytest.fixture(scope="session")
def rules():
    return default_rules()


@pytest.fixture(scope="session")
def rpm_model():
    model, notices = requirements_model_from_dict(load_json(fixture_path("rpm", "requirements.json")))
    assert notices == []
    return model


@pytest.fixture(scope="session")
def rpm_architecture():
    return architecture_model_from_dict(load_json(fixture_path("rpm", "architecture.json")))


@pytest.fixture(scope="session")
def rpm_traces():
    return trace_model_from_dict(load_json(fixture_path("rpm", "traces.json")))


@pytest.fixture(scope="session")
def rpm_change():
    return change_from_dict(load_json(fixture_path("rpm", "change_r14.json")))


@pytest.fixture(scope="session")
def rpm_choices():
    return load_json(fixture_path("rpm", "choices_r14.json"))


@pytest.fixture
def rpm_session(rpm_model, rpm_traces, rules, rpm_change, rpm_choices):
    return replay(rpm_model, rpm_traces, rules, rpm_change, rpm_choices)


@pytest.fixture(scope="session")
def bp_model():
    model, notices = requirements_model_from_dict(load_json(fixture_path("rpm_bp", "requirements.json")))
    assert notices == []
    return model


@pytest.fixture(scope="session")
def bp_traces():
    return trace_model_from_dict(load_json(fixture_path("rpm_bp", "traces.json")))


@pytest.fixture(scope="session")
def bp_change():
    return change_from_dict(load_json(fixture_path("rpm_bp", "change_r3.json")))


@pytest.fixture(scope="session")
def bp_choices():
    return load_json(fixture_path("rpm_bp", "choices_r3.json"))


@pytest.fixture
def bp_session(bp_model, bp_traces, rules, bp_change, bp_choices):
    return replay(bp_model, bp_traces, rules, bp_change, bp_choices)


def build_path(
    node_changes: dict[str, ChangeType],
    relations: list[tuple[str, str, str, RelationKind]],
    starting: str,
) -> PropagationPath:
    """Hand-build a complete path without running a session.

    relations entries are (id, source, target, kind); every listed node is
    treated as impacted.
    """
    nodes = {}
    for req_id, change_type in node_changes.items():
        status = NodeStatus.STARTING_IMPACTED if req_id == starting else NodeStatus.IMPACTED
        nodes[req_id] = PathNode(
            requirement=req_id,
            status=status,
            accepted_change=Change(type=change_type, target=req_id, rationale=Rationale.DOMAIN_CHANGE),
        )
    edges = tuple(
        PathEdge(
            relation=Relation(id=rel_id, source=source, target=target, kind=kind),
            from_requirement=source,
            to_requirement=target,
            chosen=f"propagate:{node_changes[target].value}",
        )
        for rel_id, source, target, kind in relations
    )
    return PropagationPath(nodes=nodes, edges=edges, complete=True)


@pytest.fixture
def hierarchy_path():
    """Three requirements tied by Contains and Refines, all with a changed constraint.

    N-TOP contains N-MID, N-LEAF refines N-MID. Traversal from any of the
    three must end at N-LEAF: constraint rows take Contains out, Refines in.
    """
    change = ChangeType.CHANGE_CONSTRAINT_OF_PROPERTY
    return build_path(
        {"N-TOP": change, "N-MID": change, "N-LEAF": change},
        [
            ("rel-top-mid", "N-TOP", "N-MID", RelationKind.CONTAINS),
            ("rel-leaf-mid", "N-LEAF", "N-MID", RelationKind.REFINES),
        ],
        starting="N-TOP",
    )
