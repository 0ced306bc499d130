"""Requirements, architecture and trace models with structural validation.

The three model kinds live in plain JSON documents (``requirements.json``,
``architecture.json``, ``traces.json``) whose field names mirror the dataclass
fields below. Loaded models are immutable snapshots: every edit produces a new
snapshot, so models can be shared freely between sessions and threads.

Validation never raises for bad content; it returns :class:`Violation` records
so callers can render or count them. Loaders raise :class:`ModelError` only
for documents that cannot be represented at all (missing fields, duplicate
ids, unknown enum spellings).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Iterable, Mapping

ERROR = "error"
NOTICE = "notice"

# Relation kinds whose edges form the requirement hierarchy; cycles through
# them are rejected (Requires/Conflicts cycles only produce a notice).
HIERARCHY_KINDS: frozenset[str] = frozenset({"Contains", "Refines", "PartiallyRefines"})


class ModelError(ValueError):
    """A document cannot be turned into a model snapshot."""


class UnknownRequirement(ModelError):
    """A requirement id was referenced that is not in the model."""


class Direction(str, Enum):
    """Orientation of a relation relative to a requirement of interest."""

    OUTGOING = "out"
    INCOMING = "in"


class RelationKind(str, Enum):
    CONTAINS = "Contains"
    REFINES = "Refines"
    PARTIALLY_REFINES = "PartiallyRefines"
    REQUIRES = "Requires"
    CONFLICTS = "Conflicts"


class RelationOrigin(str, Enum):
    GIVEN = "Given"
    INFERRED = "Inferred"


class TraceKind(str, Enum):
    SATISFIES = "Satisfies"
    ALLOCATED_TO = "AllocatedTo"


@dataclass(frozen=True)
class Violation:
    code: str
    location: str
    message: str
    severity: str = ERROR

    def to_dict(self) -> dict[str, str]:
        return {
            "code": self.code,
            "location": self.location,
            "message": self.message,
            "severity": self.severity,
        }


@dataclass(frozen=True)
class Constraint:
    id: str
    text: str


@dataclass(frozen=True)
class Property:
    id: str
    text: str
    constraints: tuple[Constraint, ...] = ()

    def constraint(self, constraint_id: str) -> Constraint | None:
        for ct in self.constraints:
            if ct.id == constraint_id:
                return ct
        return None


@dataclass(frozen=True)
class Requirement:
    id: str
    text: str
    properties: tuple[Property, ...] = ()

    def property(self, property_id: str) -> Property | None:
        for prop in self.properties:
            if prop.id == property_id:
                return prop
        return None


@dataclass(frozen=True)
class Relation:
    id: str
    source: str
    target: str
    kind: RelationKind
    origin: RelationOrigin = RelationOrigin.GIVEN

    def other_end(self, requirement_id: str) -> str:
        return self.target if requirement_id == self.source else self.source

    def to_dict(self) -> dict[str, str]:
        return {
            "id": self.id,
            "source": self.source,
            "target": self.target,
            "kind": self.kind.value,
            "origin": self.origin.value,
        }


@dataclass(frozen=True)
class RequirementsModel:
    requirements: tuple[Requirement, ...] = ()
    relations: tuple[Relation, ...] = ()

    @cached_property
    def requirement_ids(self) -> frozenset[str]:
        return frozenset(req.id for req in self.requirements)

    @cached_property
    def _requirements_by_id(self) -> dict[str, Requirement]:
        return {req.id: req for req in self.requirements}

    @cached_property
    def _relations_by_id(self) -> dict[str, Relation]:
        return {rel.id: rel for rel in self.relations}

    def requirement(self, requirement_id: str) -> Requirement:
        try:
            return self._requirements_by_id[requirement_id]
        except KeyError:
            raise UnknownRequirement(f"unknown requirement {requirement_id!r}") from None

    def relation(self, relation_id: str) -> Relation | None:
        return self._relations_by_id.get(relation_id)

    def has_requirement(self, requirement_id: str) -> bool:
        return requirement_id in self._requirements_by_id


@dataclass(frozen=True)
class ArchElement:
    id: str
    name: str
    kind: str
    parent: str | None = None


@dataclass(frozen=True)
class ArchitectureModel:
    elements: tuple[ArchElement, ...] = ()

    @cached_property
    def _elements_by_id(self) -> dict[str, ArchElement]:
        return {el.id: el for el in self.elements}

    def element(self, element_id: str) -> ArchElement | None:
        return self._elements_by_id.get(element_id)

    def has_element(self, element_id: str) -> bool:
        return element_id in self._elements_by_id


@dataclass(frozen=True)
class Trace:
    id: str
    kind: TraceKind
    requirement: str
    elements: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "requirement": self.requirement,
            "elements": sorted(self.elements),
        }


@dataclass(frozen=True)
class TraceModel:
    traces: tuple[Trace, ...] = ()

    def traces_for(self, requirement_id: str) -> tuple[Trace, ...]:
        return tuple(t for t in self.traces if t.requirement == requirement_id)


# ---------------------------------------------------------------------------
# Loading / dumping


def _require(data: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in data:
        raise ModelError(f"{where}: missing field {key!r}")
    return data[key]


def _enum_value(enum_cls: type[Enum], raw: Any, where: str) -> Any:
    try:
        return enum_cls(raw)
    except ValueError:
        allowed = ", ".join(member.value for member in enum_cls)
        raise ModelError(f"{where}: {raw!r} is not one of {allowed}") from None


def _unique_ids(items: Iterable[Any], what: str, where: str) -> None:
    seen: set[str] = set()
    for item in items:
        if item.id in seen:
            raise ModelError(f"{where}: duplicate {what} id {item.id!r}")
        seen.add(item.id)


def requirement_from_dict(data: Mapping[str, Any]) -> Requirement:
    req_id = str(_require(data, "id", "requirement"))
    where = f"requirement {req_id}"
    properties = []
    for raw in data.get("properties", []):
        prop_id = str(_require(raw, "id", f"{where} property"))
        constraints = tuple(
            Constraint(id=str(_require(c, "id", f"{where}/{prop_id} constraint")), text=str(c.get("text", "")))
            for c in raw.get("constraints", [])
        )
        _unique_ids(constraints, "constraint", f"{where}/{prop_id}")
        properties.append(Property(id=prop_id, text=str(raw.get("text", "")), constraints=constraints))
    _unique_ids(properties, "property", where)
    return Requirement(id=req_id, text=str(_require(data, "text", where)), properties=tuple(properties))


def requirement_to_dict(req: Requirement) -> dict[str, Any]:
    return {
        "id": req.id,
        "text": req.text,
        "properties": [
            {
                "id": prop.id,
                "text": prop.text,
                "constraints": [{"id": ct.id, "text": ct.text} for ct in prop.constraints],
            }
            for prop in req.properties
        ],
    }


def relation_from_dict(data: Mapping[str, Any]) -> Relation:
    rel_id = str(_require(data, "id", "relation"))
    where = f"relation {rel_id}"
    return Relation(
        id=rel_id,
        source=str(_require(data, "source", where)),
        target=str(_require(data, "target", where)),
        kind=_enum_value(RelationKind, _require(data, "kind", where), where),
        origin=_enum_value(RelationOrigin, data.get("origin", "Given"), where),
    )


def requirements_model_from_dict(data: Mapping[str, Any]) -> tuple[RequirementsModel, list[Violation]]:
    """Build a requirements model, normalizing mirrored Conflicts pairs.

    Conflicts is symmetric, so a document holding both (A conflicts B) and
    (B conflicts A) stores one relation; the dropped mirror is reported as a
    notice rather than an error.
    """
    requirements = tuple(
        sorted((requirement_from_dict(raw) for raw in data.get("requirements", [])), key=lambda r: r.id)
    )
    _unique_ids(requirements, "requirement", "requirements model")
    relations = sorted((relation_from_dict(raw) for raw in data.get("relations", [])), key=lambda r: r.id)
    _unique_ids(relations, "relation", "requirements model")

    notices: list[Violation] = []
    kept: list[Relation] = []
    conflict_pairs: set[frozenset[str]] = set()
    for rel in relations:
        if rel.kind is RelationKind.CONFLICTS:
            pair = frozenset((rel.source, rel.target))
            if pair in conflict_pairs:
                notices.append(
                    Violation(
                        code="Normalization",
                        location=f"relation {rel.id}",
                        message=f"mirrored Conflicts pair {rel.source}/{rel.target} stored once",
                        severity=NOTICE,
                    )
                )
                continue
            conflict_pairs.add(pair)
        kept.append(rel)
    return RequirementsModel(requirements=requirements, relations=tuple(kept)), notices


def requirements_model_to_dict(model: RequirementsModel) -> dict[str, Any]:
    return {
        "requirements": [requirement_to_dict(r) for r in sorted(model.requirements, key=lambda r: r.id)],
        "relations": [rel.to_dict() for rel in sorted(model.relations, key=lambda r: r.id)],
    }


def architecture_model_from_dict(data: Mapping[str, Any]) -> ArchitectureModel:
    elements = []
    for raw in data.get("elements", []):
        el_id = str(_require(raw, "id", "element"))
        parent = raw.get("parent")
        elements.append(
            ArchElement(
                id=el_id,
                name=str(raw.get("name", el_id)),
                kind=str(raw.get("kind", "component")),
                parent=None if parent is None else str(parent),
            )
        )
    elements.sort(key=lambda e: e.id)
    _unique_ids(elements, "element", "architecture model")
    return ArchitectureModel(elements=tuple(elements))


def architecture_model_to_dict(model: ArchitectureModel) -> dict[str, Any]:
    return {
        "elements": [
            {"id": el.id, "name": el.name, "kind": el.kind, "parent": el.parent}
            for el in sorted(model.elements, key=lambda e: e.id)
        ]
    }


def trace_model_from_dict(data: Mapping[str, Any]) -> TraceModel:
    traces = []
    for raw in data.get("traces", []):
        trace_id = str(_require(raw, "id", "trace"))
        where = f"trace {trace_id}"
        traces.append(
            Trace(
                id=trace_id,
                kind=_enum_value(TraceKind, _require(raw, "kind", where), where),
                requirement=str(_require(raw, "requirement", where)),
                elements=tuple(sorted(str(e) for e in _require(raw, "elements", where))),
            )
        )
    traces.sort(key=lambda t: t.id)
    _unique_ids(traces, "trace", "trace model")
    return TraceModel(traces=tuple(traces))


def trace_model_to_dict(model: TraceModel) -> dict[str, Any]:
    return {"traces": [t.to_dict() for t in sorted(model.traces, key=lambda t: t.id)]}


# ---------------------------------------------------------------------------
# Validation


def _strongly_connected_components(nodes: Iterable[str], edges: list[tuple[str, str]]) -> list[set[str]]:
    """Iterative Tarjan SCC; returns components with more than one node."""
    adjacency: dict[str, list[str]] = {node: [] for node in nodes}
    for src, dst in edges:
        adjacency.setdefault(src, []).append(dst)
        adjacency.setdefault(dst, [])

    index_of: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    components: list[set[str]] = []
    counter = 0

    for root in sorted(adjacency):
        if root in index_of:
            continue
        work: list[tuple[str, int]] = [(root, 0)]
        while work:
            node, child_idx = work.pop()
            if child_idx == 0:
                index_of[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            children = adjacency[node]
            for i in range(child_idx, len(children)):
                child = children[i]
                if child not in index_of:
                    work.append((node, i + 1))
                    work.append((child, 0))
                    advanced = True
                    break
                if child in on_stack:
                    low[node] = min(low[node], index_of[child])
            if advanced:
                continue
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index_of[node]:
                component: set[str] = set()
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.add(member)
                    if member == node:
                        break
                if len(component) > 1:
                    components.append(component)
    return components


def validate_requirements_model(model: RequirementsModel) -> list[Violation]:
    """Report every structural invariant breach; empty iff well-formed.

    Violations are data, not failures: dangling endpoints, self-relations,
    duplicate (source, target, kind) triples, hierarchy cycles and empty
    texts are errors; Requires cycles only warrant a notice.
    """
    violations: list[Violation] = []

    for req in model.requirements:
        if not req.text.strip():
            violations.append(Violation("EmptyText", f"requirement {req.id}", "requirement text is empty"))
        if not req.properties:
            violations.append(
                Violation("NoProperties", f"requirement {req.id}", "a well-formed requirement has at least one property")
            )
        for prop in req.properties:
            if not prop.text.strip():
                violations.append(
                    Violation("EmptyText", f"requirement {req.id}/property {prop.id}", "property text is empty")
                )
            for ct in prop.constraints:
                if not ct.text.strip():
                    violations.append(
                        Violation(
                            "EmptyText",
                            f"requirement {req.id}/property {prop.id}/constraint {ct.id}",
                            "constraint text is empty",
                        )
                    )

    seen_triples: dict[tuple[str, str, str], str] = {}
    seen_conflict_pairs: dict[frozenset[str], str] = {}
    for rel in model.relations:
        where = f"relation {rel.id}"
        if rel.source == rel.target:
            violations.append(Violation("SelfRelation", where, f"relation loops at {rel.source}"))
            continue
        for endpoint in (rel.source, rel.target):
            if not model.has_requirement(endpoint):
                violations.append(Violation("DanglingRequirement", where, f"endpoint {endpoint} is not in the model"))
        if rel.kind is RelationKind.CONFLICTS:
            pair = frozenset((rel.source, rel.target))
            if pair in seen_conflict_pairs:
                violations.append(
                    Violation(
                        "Normalization",
                        where,
                        f"Conflicts pair also stated by relation {seen_conflict_pairs[pair]}",
                        severity=NOTICE,
                    )
                )
            else:
                seen_conflict_pairs[pair] = rel.id
            continue
        triple = (rel.source, rel.target, rel.kind.value)
        if triple in seen_triples:
            violations.append(
                Violation("DuplicateRelation", where, f"same (source, target, kind) as relation {seen_triples[triple]}")
            )
        else:
            seen_triples[triple] = rel.id

    hierarchy_edges = [
        (rel.source, rel.target)
        for rel in model.relations
        if rel.kind.value in HIERARCHY_KINDS and rel.source != rel.target
    ]
    for component in _strongly_connected_components(model.requirement_ids, hierarchy_edges):
        members = ", ".join(sorted(component))
        violations.append(
            Violation("RelationCycle", f"requirements {{{members}}}", "cycle through Contains/Refines/PartiallyRefines")
        )

    requires_edges = [
        (rel.source, rel.target)
        for rel in model.relations
        if rel.kind is RelationKind.REQUIRES and rel.source != rel.target
    ]
    for component in _strongly_connected_components(model.requirement_ids, requires_edges):
        members = ", ".join(sorted(component))
        violations.append(
            Violation("RequiresCycle", f"requirements {{{members}}}", "cyclic Requires dependency", severity=NOTICE)
        )

    return violations


def validate_architecture_model(model: ArchitectureModel) -> list[Violation]:
    violations: list[Violation] = []
    for el in model.elements:
        if el.parent is None:
            continue
        if not model.has_element(el.parent):
            violations.append(
                Violation("DanglingParent", f"element {el.id}", f"parent {el.parent} is not in the model")
            )
            continue
        seen = {el.id}
        cursor: str | None = el.parent
        while cursor is not None:
            if cursor in seen:
                violations.append(Violation("ParentCycle", f"element {el.id}", "parent chain loops"))
                break
            seen.add(cursor)
            parent_el = model.element(cursor)
            cursor = parent_el.parent if parent_el else None
    return violations


def validate_trace_model(
    traces: TraceModel, reqs: RequirementsModel | None = None, arch: ArchitectureModel | None = None
) -> list[Violation]:
    """Report traces whose requirement or elements do not exist.

    Endpoint existence is only checked against the models that are supplied,
    so a traces file can still be linted on its own.
    """
    violations: list[Violation] = []
    seen: dict[tuple[str, str, tuple[str, ...]], str] = {}
    for trace in traces.traces:
        where = f"trace {trace.id}"
        if not trace.elements:
            violations.append(Violation("EmptyTrace", where, "trace links no architectural element"))
        if reqs is not None and not reqs.has_requirement(trace.requirement):
            violations.append(
                Violation("DanglingRequirement", where, f"requirement {trace.requirement} is not in the model")
            )
        if arch is not None:
            for element_id in trace.elements:
                if not arch.has_element(element_id):
                    violations.append(
                        Violation("DanglingElement", where, f"element {element_id} is not in the model")
                    )
        key = (trace.kind.value, trace.requirement, tuple(sorted(trace.elements)))
        if key in seen:
            violations.append(Violation("DuplicateTrace", where, f"same trace as {seen[key]}"))
        else:
            seen[key] = trace.id
    return violations


def neighbors(model: RequirementsModel, requirement_id: str) -> list[tuple[Relation, Direction]]:
    """All relations incident to a requirement, ordered by relation id."""
    if not model.has_requirement(requirement_id):
        raise UnknownRequirement(f"unknown requirement {requirement_id!r}")
    incident: list[tuple[Relation, Direction]] = []
    for rel in sorted(model.relations, key=lambda r: r.id):
        if rel.source == requirement_id:
            incident.append((rel, Direction.OUTGOING))
        elif rel.target == requirement_id:
            incident.append((rel, Direction.INCOMING))
    return incident
