"""Change proposals against a requirements model.

A change proposal names one change type, the requirement (or relation) it
touches, a rationale and a type-specific payload. Proposals are checked
against a model snapshot before a session accepts them, and ``apply_change``
produces the edited snapshot so sessions can preview or commit results.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Mapping

from .model import (
    Constraint,
    ModelError,
    Property,
    Relation,
    RelationKind,
    Requirement,
    RequirementsModel,
    Violation,
    relation_from_dict,
    requirement_from_dict,
    requirement_to_dict,
    _enum_value,
)


class ChangeType(str, Enum):
    ADD_RELATION = "AddRelation"
    DELETE_RELATION = "DeleteRelation"
    UPDATE_RELATION = "UpdateRelation"
    ADD_REQUIREMENT = "AddRequirement"
    DELETE_REQUIREMENT = "DeleteRequirement"
    ADD_PROPERTY = "AddProperty"
    ADD_CONSTRAINT_TO_PROPERTY = "AddConstraintToProperty"
    CHANGE_PROPERTY = "ChangeProperty"
    CHANGE_CONSTRAINT_OF_PROPERTY = "ChangeConstraintOfProperty"
    DELETE_PROPERTY = "DeleteProperty"
    DELETE_CONSTRAINT_OF_PROPERTY = "DeleteConstraintOfProperty"


class Rationale(str, Enum):
    DOMAIN_CHANGE = "DomainChange"
    REFACTORING = "Refactoring"


# Change types aimed at a relation instead of a requirement.
RELATION_CHANGES: frozenset[ChangeType] = frozenset(
    {ChangeType.ADD_RELATION, ChangeType.DELETE_RELATION, ChangeType.UPDATE_RELATION}
)

# Change types that label a requirement node during propagation; the rule
# tables are keyed by these.
NODE_CHANGES: frozenset[ChangeType] = frozenset(
    {
        ChangeType.DELETE_REQUIREMENT,
        ChangeType.ADD_PROPERTY,
        ChangeType.ADD_CONSTRAINT_TO_PROPERTY,
        ChangeType.CHANGE_PROPERTY,
        ChangeType.CHANGE_CONSTRAINT_OF_PROPERTY,
        ChangeType.DELETE_PROPERTY,
        ChangeType.DELETE_CONSTRAINT_OF_PROPERTY,
    }
)


@dataclass(frozen=True)
class Change:
    """One proposed edit: type, target, rationale and payload.

    ``target`` is a requirement id, except for relation changes where it is a
    relation id (for AddRelation the id the new relation will get). Derived
    proposals created during propagation may carry a ``None`` payload: the
    analyst knows *that* e.g. a property of the neighbor changes before
    deciding *which* one.
    """

    type: ChangeType
    target: str
    rationale: Rationale = Rationale.DOMAIN_CHANGE
    payload: Mapping[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": self.type.value,
            "target": self.target,
            "rationale": self.rationale.value,
            "payload": dict(self.payload) if self.payload is not None else None,
        }


def change_from_dict(data: Mapping[str, Any]) -> Change:
    where = "change"
    if "type" not in data:
        raise ModelError(f"{where}: missing field 'type'")
    if "target" not in data:
        raise ModelError(f"{where}: missing field 'target'")
    payload = data.get("payload")
    if payload is not None and not isinstance(payload, Mapping):
        raise ModelError(f"{where}: payload must be an object or null")
    return Change(
        type=_enum_value(ChangeType, data["type"], where),
        target=str(data["target"]),
        rationale=_enum_value(Rationale, data.get("rationale", "DomainChange"), where),
        payload=dict(payload) if payload is not None else None,
    )


@dataclass(frozen=True)
class ChangeLogEntry:
    sequence: int
    change: Change

    def to_dict(self) -> dict[str, Any]:
        return {"sequence": self.sequence, "change": self.change.to_dict()}


@dataclass
class ChangeLog:
    """Append-only record of accepted changes with strictly increasing sequence."""

    entries: list[ChangeLogEntry] = field(default_factory=list)

    def append(self, change: Change) -> ChangeLogEntry:
        entry = ChangeLogEntry(sequence=len(self.entries) + 1, change=change)
        self.entries.append(entry)
        return entry

    def to_dict(self) -> list[dict[str, Any]]:
        return [entry.to_dict() for entry in self.entries]


def _payload_field(change: Change, key: str) -> Any:
    if change.payload is None or key not in change.payload:
        return None
    return change.payload[key]


def check_change_wellformed(change: Change, model: RequirementsModel) -> list[Violation]:
    """Check a proposal against a model snapshot; empty list means accepted.

    Derived propagation proposals omit payloads, so a missing payload is only
    an error where the change cannot even identify its target without one
    (AddRelation, AddRequirement).
    """
    violations: list[Violation] = []
    where = f"change {change.type.value} -> {change.target}"

    def err(code: str, message: str) -> None:
        violations.append(Violation(code, where, message))

    if change.type in RELATION_CHANGES:
        if change.type is ChangeType.ADD_RELATION:
            raw = _payload_field(change, "relation")
            if raw is None:
                err("MissingPayload", "AddRelation needs payload.relation")
                return violations
            try:
                rel = relation_from_dict(raw)
            except ModelError as exc:
                err("BadPayload", str(exc))
                return violations
            if rel.id != change.target:
                err("TargetMismatch", f"payload relation id {rel.id!r} differs from target")
            if model.relation(rel.id) is not None:
                err("DuplicateId", f"relation {rel.id} already exists")
            for endpoint in (rel.source, rel.target):
                if not model.has_requirement(endpoint):
                    err("DanglingRequirement", f"endpoint {endpoint} is not in the model")
            if rel.source == rel.target:
                err("SelfRelation", "relation would loop")
        else:
            rel = model.relation(change.target)
            if rel is None:
                err("UnknownRelation", f"relation {change.target} is not in the model")
            elif change.type is ChangeType.UPDATE_RELATION:
                raw_kind = _payload_field(change, "kind")
                if raw_kind is None:
                    err("MissingPayload", "UpdateRelation needs payload.kind")
                else:
                    try:
                        new_kind = RelationKind(raw_kind)
                    except ValueError:
                        err("BadPayload", f"{raw_kind!r} is not a relation kind")
                    else:
                        if new_kind is rel.kind:
                            err("NoOpChange", f"relation already has kind {new_kind.value}")
        return violations

    if change.type is ChangeType.ADD_REQUIREMENT:
        raw_req = _payload_field(change, "requirement")
        if raw_req is None:
            err("MissingPayload", "AddRequirement needs payload.requirement")
            return violations
        try:
            req = requirement_from_dict(raw_req)
        except ModelError as exc:
            err("BadPayload", str(exc))
            return violations
        if req.id != change.target:
            err("TargetMismatch", f"payload requirement id {req.id!r} differs from target")
        if model.has_requirement(req.id):
            err("DuplicateId", f"requirement {req.id} already exists")
        raw_rels = _payload_field(change, "relations") or []
        seen_rel_ids: set[str] = set()
        for raw in raw_rels:
            try:
                rel = relation_from_dict(raw)
            except ModelError as exc:
                err("BadPayload", str(exc))
                continue
            if rel.id in seen_rel_ids or model.relation(rel.id) is not None:
                err("DuplicateId", f"relation {rel.id} already exists")
            seen_rel_ids.add(rel.id)
            if req.id not in (rel.source, rel.target):
                err("DetachedRelation", f"relation {rel.id} does not touch {req.id}")
            other = rel.other_end(req.id)
            if other != req.id and not model.has_requirement(other):
                err("DanglingRequirement", f"endpoint {other} is not in the model")
        return violations

    # The remaining types all aim at an existing requirement.
    if not model.has_requirement(change.target):
        err("UnknownRequirement", f"requirement {change.target} is not in the model")
        return violations
    req = model.requirement(change.target)

    if change.type is ChangeType.DELETE_REQUIREMENT:
        return violations

    property_id = _payload_field(change, "property_id")
    if change.type is ChangeType.ADD_PROPERTY:
        raw_prop = _payload_field(change, "property")
        if raw_prop is not None:
            prop_id = raw_prop.get("id")
            if prop_id is not None and req.property(str(prop_id)) is not None:
                err("DuplicateId", f"property {prop_id} already exists on {req.id}")
        return violations

    # Everything below names an existing property; derived proposals may not
    # have picked one yet.
    if property_id is None:
        return violations
    prop = req.property(str(property_id))
    if prop is None:
        err("UnknownProperty", f"property {property_id} is not on {req.id}")
        return violations

    if change.type in (ChangeType.CHANGE_CONSTRAINT_OF_PROPERTY, ChangeType.DELETE_CONSTRAINT_OF_PROPERTY):
        constraint_id = _payload_field(change, "constraint_id")
        if constraint_id is None:
            return violations
        if prop.constraint(str(constraint_id)) is None:
            err("UnknownConstraint", f"constraint {constraint_id} is not on {req.id}/{prop.id}")
    elif change.type is ChangeType.ADD_CONSTRAINT_TO_PROPERTY:
        raw_ct = _payload_field(change, "constraint")
        if raw_ct is not None:
            ct_id = raw_ct.get("id")
            if ct_id is not None and prop.constraint(str(ct_id)) is not None:
                err("DuplicateId", f"constraint {ct_id} already exists on {req.id}/{prop.id}")
    return violations


class ChangeNotApplicable(ModelError):
    """apply_change was handed a proposal the model cannot absorb."""


def _replace_requirement(model: RequirementsModel, new_req: Requirement) -> RequirementsModel:
    requirements = tuple(new_req if r.id == new_req.id else r for r in model.requirements)
    return replace(model, requirements=requirements)


def apply_change(model: RequirementsModel, change: Change) -> RequirementsModel:
    """Return the snapshot with the change applied.

    Raises :class:`ChangeNotApplicable` when the proposal is ill-formed or
    carries no payload; callers should run :func:`check_change_wellformed`
    first for a full report.
    """
    problems = [v for v in check_change_wellformed(change, model) if v.severity == "error"]
    if problems:
        raise ChangeNotApplicable(problems[0].message)

    if change.type is ChangeType.ADD_RELATION:
        rel = relation_from_dict(_payload_field(change, "relation"))
        relations = tuple(sorted(model.relations + (rel,), key=lambda r: r.id))
        return replace(model, relations=relations)

    if change.type is ChangeType.DELETE_RELATION:
        relations = tuple(r for r in model.relations if r.id != change.target)
        if len(relations) == len(model.relations):
            raise ChangeNotApplicable(f"relation {change.target} is not in the model")
        return replace(model, relations=relations)

    if change.type is ChangeType.UPDATE_RELATION:
        rel = model.relation(change.target)
        new_kind = RelationKind(_payload_field(change, "kind"))
        relations = tuple(replace(r, kind=new_kind) if r.id == change.target else r for r in model.relations)
        return replace(model, relations=relations)

    if change.type is ChangeType.ADD_REQUIREMENT:
        req = requirement_from_dict(_payload_field(change, "requirement"))
        new_rels = tuple(relation_from_dict(raw) for raw in (_payload_field(change, "relations") or []))
        return replace(
            model,
            requirements=tuple(sorted(model.requirements + (req,), key=lambda r: r.id)),
            relations=tuple(sorted(model.relations + new_rels, key=lambda r: r.id)),
        )

    if change.type is ChangeType.DELETE_REQUIREMENT:
        requirements = tuple(r for r in model.requirements if r.id != change.target)
        relations = tuple(r for r in model.relations if change.target not in (r.source, r.target))
        return replace(model, requirements=requirements, relations=relations)

    req = model.requirement(change.target)

    if change.type is ChangeType.ADD_PROPERTY:
        raw_prop = _payload_field(change, "property")
        if raw_prop is None:
            raise ChangeNotApplicable("AddProperty needs payload.property to be applied")
        prop_id = str(raw_prop.get("id", f"p-{len(req.properties) + 1}"))
        constraints = tuple(
            Constraint(id=str(c["id"]), text=str(c.get("text", ""))) for c in raw_prop.get("constraints", [])
        )
        new_prop = Property(id=prop_id, text=str(raw_prop.get("text", "")), constraints=constraints)
        return _replace_requirement(model, replace(req, properties=req.properties + (new_prop,)))

    property_id = _payload_field(change, "property_id")
    if property_id is None:
        raise ChangeNotApplicable(f"{change.type.value} needs payload.property_id to be applied")
    prop = req.property(str(property_id))
    if prop is None:
        raise ChangeNotApplicable(f"property {property_id} is not on {req.id}")

    def swap_property(new_prop: Property | None) -> RequirementsModel:
        if new_prop is None:
            properties = tuple(p for p in req.properties if p.id != prop.id)
        else:
            properties = tuple(new_prop if p.id == prop.id else p for p in req.properties)
        return _replace_requirement(model, replace(req, properties=properties))

    if change.type is ChangeType.DELETE_PROPERTY:
        return swap_property(None)

    if change.type is ChangeType.CHANGE_PROPERTY:
        text = _payload_field(change, "text")
        if text is None:
            raise ChangeNotApplicable("ChangeProperty needs payload.text to be applied")
        return swap_property(replace(prop, text=str(text)))

    if change.type is ChangeType.ADD_CONSTRAINT_TO_PROPERTY:
        raw_ct = _payload_field(change, "constraint")
        if raw_ct is None:
            raise ChangeNotApplicable("AddConstraintToProperty needs payload.constraint to be applied")
        ct = Constraint(id=str(raw_ct.get("id", f"c-{len(prop.constraints) + 1}")), text=str(raw_ct.get("text", "")))
        return swap_property(replace(prop, constraints=prop.constraints + (ct,)))

    constraint_id = _payload_field(change, "constraint_id")
    if constraint_id is None:
        raise ChangeNotApplicable(f"{change.type.value} needs payload.constraint_id to be applied")
    ct = prop.constraint(str(constraint_id))
    if ct is None:
        raise ChangeNotApplicable(f"constraint {constraint_id} is not on {req.id}/{prop.id}")

    if change.type is ChangeType.DELETE_CONSTRAINT_OF_PROPERTY:
        return swap_property(replace(prop, constraints=tuple(c for c in prop.constraints if c.id != ct.id)))

    if change.type is ChangeType.CHANGE_CONSTRAINT_OF_PROPERTY:
        text = _payload_field(change, "text")
        if text is None:
            raise ChangeNotApplicable("ChangeConstraintOfProperty needs payload.text to be applied")
        new_ct = replace(ct, text=str(text))
        return swap_property(
            replace(prop, constraints=tuple(new_ct if c.id == ct.id else c for c in prop.constraints))
        )

    raise ChangeNotApplicable(f"unsupported change type {change.type.value}")
