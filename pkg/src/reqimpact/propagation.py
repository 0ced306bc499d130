"""Interactive propagation of a change proposal through the requirements model.

A session walks the relation graph outward from the requirement a change
touches. Every relation out of an impacted requirement becomes a pending
decision offering that rule cell's alternatives; the analyst picks one, the
neighbor gets tagged Impacted or NoImpact, and impacted neighbors spawn
decisions of their own. The first decision to reach a requirement fixes its
tag; later relations into it are noted as annotations, never reopened. Cells
whose only alternative is no-impact resolve themselves.

Sessions are deterministic: the same model, rules, change and choice log
always rebuild the identical state. Stored sessions are loaded by replaying
their choice log, so a tampered file no longer matching its own replay is
rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping

from .changes import (
    Change,
    ChangeType,
    Rationale,
    RELATION_CHANGES,
    change_from_dict,
    check_change_wellformed,
)
from .model import (
    Direction,
    Relation,
    RequirementsModel,
    TraceModel,
    Violation,
    neighbors,
    relation_from_dict,
    requirements_model_from_dict,
    requirements_model_to_dict,
    trace_model_from_dict,
    trace_model_to_dict,
)
from .rules import AtomicEdit, EditKind, RuleSet, lookup_alternatives, load_rules, rules_to_dict


class SessionError(ValueError):
    pass


class ChangeRejected(SessionError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        details = "; ".join(f"{v.code}: {v.message}" for v in violations)
        super().__init__(f"change rejected: {details}")


class UnknownDecision(SessionError):
    pass


class IllegalAlternative(SessionError):
    pass


class MissingJustification(IllegalAlternative):
    pass


class NodeStatus(str, Enum):
    STARTING_IMPACTED = "StartingImpacted"
    IMPACTED = "Impacted"
    NO_IMPACT = "NoImpact"


@dataclass(frozen=True)
class PathNode:
    requirement: str
    status: NodeStatus
    accepted_change: Change | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "requirement": self.requirement,
            "status": self.status.value,
            "accepted_change": self.accepted_change.to_dict() if self.accepted_change else None,
        }


@dataclass(frozen=True)
class PathEdge:
    """One impact-carrying crossing; embeds the relation it crossed."""

    relation: Relation
    from_requirement: str
    to_requirement: str
    chosen: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "relation": self.relation.to_dict(),
            "from_requirement": self.from_requirement,
            "to_requirement": self.to_requirement,
            "chosen": self.chosen,
        }


@dataclass(frozen=True)
class PropagationPath:
    nodes: Mapping[str, PathNode]
    edges: tuple[PathEdge, ...]
    complete: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "nodes": {req_id: node.to_dict() for req_id, node in self.nodes.items()},
            "edges": [edge.to_dict() for edge in self.edges],
            "complete": self.complete,
        }


def path_from_dict(data: Mapping[str, Any]) -> PropagationPath:
    nodes = {}
    for req_id, raw in data.get("nodes", {}).items():
        accepted = raw.get("accepted_change")
        nodes[req_id] = PathNode(
            requirement=raw["requirement"],
            status=NodeStatus(raw["status"]),
            accepted_change=change_from_dict(accepted) if accepted else None,
        )
    edges = tuple(
        PathEdge(
            relation=relation_from_dict(raw["relation"]),
            from_requirement=raw["from_requirement"],
            to_requirement=raw["to_requirement"],
            chosen=raw["chosen"],
        )
        for raw in data.get("edges", [])
    )
    return PropagationPath(nodes=nodes, edges=edges, complete=bool(data.get("complete", True)))


@dataclass(frozen=True)
class PendingDecision:
    """One relation awaiting a verdict; its id is the relation id."""

    id: str
    from_requirement: str
    to_requirement: str
    relation: Relation
    direction: Direction
    change_type: ChangeType
    alternatives: tuple[AtomicEdit, ...]
    unspecified_cell: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "from_requirement": self.from_requirement,
            "to_requirement": self.to_requirement,
            "relation": self.relation.to_dict(),
            "direction": self.direction.value,
            "change_type": self.change_type.value,
            "alternatives": [edit.spec for edit in self.alternatives],
            "unspecified_cell": self.unspecified_cell,
        }


@dataclass(frozen=True)
class ChoiceRecord:
    sequence: int
    decision: str
    pick: str
    justification: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "sequence": self.sequence,
            "decision": self.decision,
            "pick": self.pick,
            "justification": self.justification,
        }


@dataclass(frozen=True)
class Annotation:
    """Something the session did or skipped on its own, kept for the record."""

    code: str
    message: str
    relation: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "relation": self.relation}


@dataclass
class Session:
    model: RequirementsModel
    traces: TraceModel
    rules: RuleSet
    change: Change
    nodes: dict[str, PathNode] = field(default_factory=dict)
    edges: list[PathEdge] = field(default_factory=list)
    pending: dict[str, PendingDecision] = field(default_factory=dict)
    choices: list[ChoiceRecord] = field(default_factory=list)
    annotations: list[Annotation] = field(default_factory=list)
    decided: set[str] = field(default_factory=set)


def _annotate(session: Session, code: str, message: str, relation: str | None = None) -> None:
    session.annotations.append(Annotation(code=code, message=message, relation=relation))


def _mark_visited(session: Session, req_id: str, status: NodeStatus, accepted: Change | None) -> None:
    session.nodes[req_id] = PathNode(requirement=req_id, status=status, accepted_change=accepted)
    for decision in [d for d in session.pending.values() if d.to_requirement == req_id]:
        del session.pending[decision.id]
        _annotate(
            session,
            "Cancelled",
            f"{req_id} was tagged {status.value} first; decision {decision.id} is moot",
            relation=decision.id,
        )


def _expand(session: Session, req_id: str) -> None:
    """Turn every untried relation at an impacted requirement into a decision."""
    accepted = session.nodes[req_id].accepted_change
    assert accepted is not None
    for relation, direction in neighbors(session.model, req_id):
        neighbor = relation.other_end(req_id)
        if neighbor in session.nodes:
            _annotate(
                session,
                "AlreadyVisited",
                f"{relation.id} also reaches {neighbor}, already tagged {session.nodes[neighbor].status.value}",
                relation=relation.id,
            )
            continue
        if relation.id in session.pending or relation.id in session.decided:
            continue
        alternatives, unspecified = lookup_alternatives(session.rules, accepted.type, relation.kind, direction)
        if len(alternatives) == 1 and alternatives[0].kind is EditKind.NO_IMPACT:
            _mark_visited(session, neighbor, NodeStatus.NO_IMPACT, None)
            _annotate(
                session,
                "AutoResolved",
                f"{relation.id}: only alternative is no-impact, {neighbor} tagged NoImpact",
                relation=relation.id,
            )
            continue
        session.pending[relation.id] = PendingDecision(
            id=relation.id,
            from_requirement=req_id,
            to_requirement=neighbor,
            relation=relation,
            direction=direction,
            change_type=accepted.type,
            alternatives=alternatives,
            unspecified_cell=unspecified,
        )


def _starting_requirement(model: RequirementsModel, change: Change) -> str:
    if change.type is ChangeType.ADD_RELATION:
        return str(change.payload["relation"]["source"])
    if change.type in RELATION_CHANGES:
        relation = model.relation(change.target)
        assert relation is not None
        return relation.source
    return change.target


def start_session(model: RequirementsModel, traces: TraceModel, rules: RuleSet, change: Change) -> Session:
    """Check the change, tag its starting requirement and open the frontier.

    Relation changes and added requirements never ripple through the model
    (their architectural verdict comes straight from the rule tables), and a
    refactoring rewords the specification without shifting its meaning, so
    those sessions complete immediately.
    """
    problems = [v for v in check_change_wellformed(change, model) if v.severity == "error"]
    if problems:
        raise ChangeRejected(problems)

    session = Session(model=model, traces=traces, rules=rules, change=change)
    start = _starting_requirement(model, change)
    session.nodes[start] = PathNode(
        requirement=start, status=NodeStatus.STARTING_IMPACTED, accepted_change=change
    )

    if change.rationale is Rationale.REFACTORING:
        _annotate(session, "NoPropagation", "refactoring keeps the model's meaning; nothing ripples")
        return session
    if change.type in RELATION_CHANGES:
        _annotate(session, "NoPropagation", "relation changes rewire the model without touching requirement content")
        return session
    if change.type is ChangeType.ADD_REQUIREMENT:
        _annotate(session, "NoPropagation", "a new requirement is assessed through its stated relations only")
        return session

    _expand(session, start)
    return session


def pending_decisions(session: Session) -> list[PendingDecision]:
    return list(session.pending.values())


def is_complete(session: Session) -> bool:
    return not session.pending


def choose(session: Session, decision_id: str, pick: str, justification: str | None = None) -> None:
    """Resolve one pending decision with an alternative from its cell."""
    decision = session.pending.get(decision_id)
    if decision is None:
        if decision_id in session.decided:
            raise UnknownDecision(f"decision {decision_id} was already made")
        raise UnknownDecision(f"no pending decision {decision_id}")
    edit = next((alt for alt in decision.alternatives if alt.spec == pick), None)
    if edit is None:
        offered = ", ".join(alt.spec for alt in decision.alternatives)
        raise IllegalAlternative(f"{pick!r} is not offered for {decision_id}; pick one of: {offered}")
    if decision.unspecified_cell and not (justification or "").strip():
        raise MissingJustification(
            f"no rule covers {decision_id} ({decision.change_type.value} across "
            f"{decision.relation.kind.value}/{decision.direction.value}); a justification is required"
        )

    del session.pending[decision_id]
    session.decided.add(decision_id)
    session.choices.append(
        ChoiceRecord(
            sequence=len(session.choices) + 1,
            decision=decision_id,
            pick=edit.spec,
            justification=justification,
        )
    )

    neighbor = decision.to_requirement
    if not edit.impacts_neighbor:
        _mark_visited(session, neighbor, NodeStatus.NO_IMPACT, None)
        return

    if edit.kind is EditKind.DELETE_REQUIREMENT_AND_RELATION:
        derived = Change(
            type=ChangeType.DELETE_REQUIREMENT, target=neighbor, rationale=session.change.rationale
        )
    else:
        assert edit.propagate_type is not None
        derived = Change(type=edit.propagate_type, target=neighbor, rationale=session.change.rationale)
    _mark_visited(session, neighbor, NodeStatus.IMPACTED, derived)
    session.edges.append(
        PathEdge(
            relation=decision.relation,
            from_requirement=decision.from_requirement,
            to_requirement=neighbor,
            chosen=edit.spec,
        )
    )
    _expand(session, neighbor)


def path(session: Session) -> PropagationPath:
    return PropagationPath(
        nodes=dict(session.nodes), edges=tuple(session.edges), complete=is_complete(session)
    )


def replay(
    model: RequirementsModel,
    traces: TraceModel,
    rules: RuleSet,
    change: Change,
    script: Iterable[Mapping[str, Any]],
) -> Session:
    """Rebuild a session from scratch by applying a recorded choice list."""
    session = start_session(model, traces, rules, change)
    for step in script:
        choose(session, str(step["decision"]), str(step["pick"]), step.get("justification"))
    return session


def session_to_dict(session: Session) -> dict[str, Any]:
    return {
        "change": session.change.to_dict(),
        "model": requirements_model_to_dict(session.model),
        "traces": trace_model_to_dict(session.traces),
        "rules": rules_to_dict(session.rules),
        "choices": [record.to_dict() for record in session.choices],
        "path": path(session).to_dict(),
        "pending": [decision.to_dict() for decision in session.pending.values()],
        "annotations": [note.to_dict() for note in session.annotations],
    }


def session_from_dict(data: Mapping[str, Any]) -> Session:
    """Load a stored session by replaying its choice log and cross-checking."""
    model, _ = requirements_model_from_dict(data["model"])
    traces = trace_model_from_dict(data.get("traces", {}))
    rules = load_rules(data.get("rules", {}))
    change = change_from_dict(data["change"])
    session = replay(model, traces, rules, change, data.get("choices", []))
    if session_to_dict(session) != dict(data):
        raise SessionError("stored session does not match its own replay; refusing to load")
    return session
