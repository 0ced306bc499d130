"""From a finished propagation path to candidate architectural elements.

The verdict depends on the change type. Relation changes and refactorings
never touch the architecture. A freshly added property has no traces yet, so
only manual review can find the affected elements. A new requirement is
judged through its stated relations. Every other change type walks the
propagation path from a selected requirement: relations are followed only
where the traversal table allows, the dead ends of those walks are the
terminals, and the elements traced from the terminals are the candidates.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable

from .changes import Change, ChangeType, Rationale, RELATION_CHANGES
from .model import (
    Direction,
    NOTICE,
    Relation,
    TraceKind,
    TraceModel,
    Violation,
    relation_from_dict,
)
from .propagation import NodeStatus, PropagationPath, Session, path as session_path
from .rules import RuleSet, TraversalAction, added_requirement_outcome, AddedReqOutcome, traversal_action


class ImpactError(ValueError):
    pass


class IncompletePath(ImpactError):
    pass


class UnknownSelection(ImpactError):
    pass


class Outcome(str, Enum):
    CANDIDATES = "Candidates"
    NO_ARCH_IMPACT = "NoArchImpact"
    MANUAL_ANALYSIS_REQUIRED = "ManualAnalysisRequired"


@dataclass(frozen=True, order=True)
class CandidateElement:
    """One architectural element plus the trace that implicates it."""

    element: str
    trace_id: str
    trace_kind: TraceKind
    via_requirement: str

    def to_dict(self) -> dict[str, str]:
        return {
            "element": self.element,
            "kind": self.trace_kind.value,
            "trace_id": self.trace_id,
            "via_requirement": self.via_requirement,
        }


@dataclass(frozen=True)
class ImpactResult:
    outcome: Outcome
    selected: str | None = None
    terminals: frozenset[str] = frozenset()
    candidates: frozenset[CandidateElement] = frozenset()
    reason: str = ""
    notices: tuple[Violation, ...] = ()


def traverse(path: PropagationPath, selected: str, rules: RuleSet) -> set[str]:
    """Walk the path from a selected requirement; return the dead-end nodes.

    Each walk may visit a node once. At node c the row is the change type c
    accepted, the column is c's own end of the relation; only Take cells are
    followed. A node extending no walk further is a terminal. The result does
    not depend on the order relations are tried.
    """
    node = path.nodes.get(selected)
    if node is None or node.status is NodeStatus.NO_IMPACT:
        raise UnknownSelection(f"{selected!r} is not an impacted requirement of this path")

    adjacency: dict[str, list[tuple[Relation, str]]] = {req_id: [] for req_id in path.nodes}
    for edge in path.edges:
        for end in (edge.from_requirement, edge.to_requirement):
            if end not in path.nodes:
                raise ImpactError(f"path edge {edge.relation.id} references unknown node {end}")
        adjacency[edge.from_requirement].append((edge.relation, edge.to_requirement))
        adjacency[edge.to_requirement].append((edge.relation, edge.from_requirement))
    for steps in adjacency.values():
        steps.sort(key=lambda step: step[0].id)

    def walk(current: str, on_walk: frozenset[str]) -> set[str]:
        accepted = path.nodes[current].accepted_change
        assert accepted is not None, f"impacted node {current} lacks an accepted change"
        terminals: set[str] = set()
        for relation, neighbor in adjacency[current]:
            if neighbor in on_walk or path.nodes[neighbor].status is NodeStatus.NO_IMPACT:
                continue
            direction = Direction.OUTGOING if relation.source == current else Direction.INCOMING
            if traversal_action(rules, accepted.type, relation.kind, direction) is TraversalAction.TAKE:
                terminals |= walk(neighbor, on_walk | {current})
        return terminals or {current}

    return walk(selected, frozenset())


def candidates_from(
    terminals: Iterable[str], traces: TraceModel
) -> tuple[frozenset[CandidateElement], list[Violation]]:
    """Trace every terminal to architecture; untraced terminals get a notice."""
    candidates: set[CandidateElement] = set()
    notices: list[Violation] = []
    for terminal in sorted(set(terminals)):
        linked = traces.traces_for(terminal)
        if not linked:
            notices.append(
                Violation(
                    "UntracedTerminals",
                    f"requirement {terminal}",
                    f"{terminal} has no trace; its architectural impact needs manual review",
                    severity=NOTICE,
                )
            )
            continue
        for trace in linked:
            for element in trace.elements:
                candidates.add(
                    CandidateElement(
                        element=element,
                        trace_id=trace.id,
                        trace_kind=trace.kind,
                        via_requirement=terminal,
                    )
                )
    return frozenset(candidates), notices


def impact_of_added_requirement(
    new_req_id: str, relations: Iterable[Relation], traces: TraceModel, rules: RuleSet
) -> ImpactResult:
    """Judge a new requirement by what it is related to.

    A relation whose cell says the existing end's traced elements are
    candidates contributes them; if every relation says otherwise there is no
    architectural impact, and with no relations at all only manual analysis
    can place the requirement.
    """
    relations = list(relations)
    if not relations:
        return ImpactResult(
            outcome=Outcome.MANUAL_ANALYSIS_REQUIRED,
            selected=new_req_id,
            reason="the new requirement is related to nothing; no trace can suggest where it lands",
        )
    notices: list[Violation] = []
    contributing: set[str] = set()
    for relation in sorted(relations, key=lambda r: r.id):
        direction = Direction.OUTGOING if relation.source == new_req_id else Direction.INCOMING
        outcome, defaulted = added_requirement_outcome(rules, relation.kind, direction)
        if defaulted:
            notices.append(
                Violation(
                    "DefaultedOutcome",
                    f"relation {relation.id}",
                    f"no rule for a new requirement under {relation.kind.value}; treated as no impact",
                    severity=NOTICE,
                )
            )
        if outcome is AddedReqOutcome.TRACED_FROM_EXISTING:
            contributing.add(relation.other_end(new_req_id))
    if not contributing:
        return ImpactResult(
            outcome=Outcome.NO_ARCH_IMPACT,
            selected=new_req_id,
            reason="every stated relation leaves the architecture untouched",
            notices=tuple(notices),
        )
    candidates, trace_notices = candidates_from(contributing, traces)
    return ImpactResult(
        outcome=Outcome.CANDIDATES,
        selected=new_req_id,
        terminals=frozenset(contributing),
        candidates=candidates,
        notices=tuple(notices + trace_notices),
    )


def impact(
    change: Change,
    selected: str | None,
    path: PropagationPath | None,
    traces: TraceModel,
    rules: RuleSet,
) -> ImpactResult:
    """Dispatch a change to its architectural verdict."""
    if change.rationale is Rationale.REFACTORING:
        return ImpactResult(
            outcome=Outcome.NO_ARCH_IMPACT,
            selected=selected,
            reason="a refactoring restates requirements without changing what the system does",
        )
    if change.type in RELATION_CHANGES:
        return ImpactResult(
            outcome=Outcome.NO_ARCH_IMPACT,
            selected=selected,
            reason="relation changes rewire the requirements model; no system property changes",
        )
    if change.type is ChangeType.ADD_PROPERTY:
        return ImpactResult(
            outcome=Outcome.MANUAL_ANALYSIS_REQUIRED,
            selected=selected,
            reason="a new property has no trace yet; the elements serving its neighbors need manual review",
        )
    if change.type is ChangeType.ADD_REQUIREMENT:
        payload = change.payload or {}
        relations = [relation_from_dict(raw) for raw in payload.get("relations", [])]
        return impact_of_added_requirement(change.target, relations, traces, rules)

    if path is None or not path.complete:
        raise IncompletePath("the propagation path still has pending decisions")
    if selected is None:
        raise UnknownSelection("a requirement must be selected to traverse from")
    terminals = traverse(path, selected, rules)
    candidates, notices = candidates_from(terminals, traces)
    return ImpactResult(
        outcome=Outcome.CANDIDATES,
        selected=selected,
        terminals=frozenset(terminals),
        candidates=candidates,
        notices=tuple(notices),
    )


def session_impact(session: Session, selected: str | None) -> ImpactResult:
    return impact(session.change, selected, session_path(session), session.traces, session.rules)


def impact_report(result: ImpactResult, session: Session) -> dict[str, Any]:
    """Deterministic JSON document for one impact verdict."""
    return {
        "change": session.change.to_dict(),
        "rationale": session.change.rationale.value,
        "path": session_path(session).to_dict(),
        "selected": result.selected,
        "outcome": result.outcome.value,
        "reason": result.reason,
        "terminals": sorted(result.terminals),
        "candidates": [c.to_dict() for c in sorted(result.candidates)],
        "notices": [n.to_dict() for n in result.notices],
    }


def render_report_text(report: dict[str, Any]) -> str:
    """Short human-readable rendering of an impact report."""
    change = report["change"]
    lines = [
        f"change: {change['type']} -> {change['target']} ({report['rationale']})",
        f"selected: {report['selected'] or '-'}",
        f"outcome: {report['outcome']}",
    ]
    if report["reason"]:
        lines.append(f"reason: {report['reason']}")
    if report["terminals"]:
        lines.append("terminals: " + ", ".join(report["terminals"]))
    if report["candidates"]:
        lines.append("candidates:")
        for cand in report["candidates"]:
            lines.append(
                f"  {cand['element']}  ({cand['kind']} {cand['trace_id']} via {cand['via_requirement']})"
            )
    for notice in report["notices"]:
        lines.append(f"notice [{notice['code']}] {notice['location']}: {notice['message']}")
    return "\n".join(lines) + "\n"
