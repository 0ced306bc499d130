"""Rule tables driving propagation and traversal.

Three tables, all data:

* ``propagation`` maps (change type, relation kind, direction) to the edit
  alternatives an analyst may pick from when a change crosses that relation.
* ``add_requirement`` maps (relation kind, direction) to what linking a new
  requirement through that relation means for the architecture.
* ``traversal`` maps (change type, relation kind, direction) to whether the
  path walk may follow such a relation.

Cells are addressed by strings, ``"<ChangeType>/<RelationKind>/<out|in>"``
(``"<RelationKind>/<out|in>"`` for the add-requirement table), so rule files
are plain JSON objects. A user file extends the defaults; redefining a
default cell with different content needs ``"override": true``, otherwise
loading fails with a ConflictingCell report. Conflicts relations are
symmetric, so their cells are stored and looked up as outgoing.

Lookups never fail: a missing propagation cell yields the full edit menu
flagged as unspecified (the session then demands a justification), a missing
traversal cell means the relation is not followed, and a missing
add-requirement cell means no architectural impact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Mapping

from .changes import ChangeType, NODE_CHANGES
from .jsonio import read_json
from .model import Direction, RelationKind, Violation, NOTICE


class RuleError(ValueError):
    """A rule document cannot be merged over the defaults."""


class EditKind(str, Enum):
    NO_IMPACT = "no-impact"
    PROPAGATE = "propagate"
    DELETE_RELATION = "delete-relation"
    DELETE_REQUIREMENT_AND_RELATION = "delete-requirement-and-relation"
    PROPAGATE_AND_DELETE_RELATION = "propagate-and-delete-relation"


# Picking one of these marks the neighbor as impacted and hands it a derived
# change proposal; the rest leave the neighbor untouched.
IMPACTING_KINDS: frozenset[EditKind] = frozenset(
    {EditKind.PROPAGATE, EditKind.PROPAGATE_AND_DELETE_RELATION, EditKind.DELETE_REQUIREMENT_AND_RELATION}
)


@dataclass(frozen=True)
class AtomicEdit:
    """One selectable alternative in a propagation cell.

    ``propagate_type`` names the change type handed to the neighbor and is
    set exactly for the two propagate kinds.
    """

    kind: EditKind
    propagate_type: ChangeType | None = None

    def __post_init__(self) -> None:
        needs_type = self.kind in (EditKind.PROPAGATE, EditKind.PROPAGATE_AND_DELETE_RELATION)
        if needs_type and self.propagate_type is None:
            raise RuleError(f"{self.kind.value} needs a change type")
        if not needs_type and self.propagate_type is not None:
            raise RuleError(f"{self.kind.value} takes no change type")

    @property
    def spec(self) -> str:
        if self.propagate_type is not None:
            return f"{self.kind.value}:{self.propagate_type.value}"
        return self.kind.value

    @property
    def impacts_neighbor(self) -> bool:
        return self.kind in IMPACTING_KINDS

    @property
    def deletes_relation(self) -> bool:
        return self.kind in (
            EditKind.DELETE_RELATION,
            EditKind.DELETE_REQUIREMENT_AND_RELATION,
            EditKind.PROPAGATE_AND_DELETE_RELATION,
        )


def parse_edit(text: str) -> AtomicEdit:
    head, sep, tail = text.partition(":")
    try:
        kind = EditKind(head)
    except ValueError:
        raise RuleError(f"unknown edit {text!r}") from None
    if not sep:
        return AtomicEdit(kind=kind)
    try:
        propagate_type = ChangeType(tail)
    except ValueError:
        raise RuleError(f"unknown change type in edit {text!r}") from None
    return AtomicEdit(kind=kind, propagate_type=propagate_type)


class AddedReqOutcome(str, Enum):
    NO_IMPACTED_AE = "no-impacted-ae"
    TRACED_FROM_EXISTING = "traced-from-existing"


class TraversalAction(str, Enum):
    TAKE = "take"
    DONT_TAKE = "dont-take"


def propagation_address(change_type: ChangeType, kind: RelationKind, direction: Direction) -> str:
    if kind is RelationKind.CONFLICTS:
        direction = Direction.OUTGOING
    return f"{change_type.value}/{kind.value}/{direction.value}"


def relation_address(kind: RelationKind, direction: Direction) -> str:
    if kind is RelationKind.CONFLICTS:
        direction = Direction.OUTGOING
    return f"{kind.value}/{direction.value}"


@dataclass(frozen=True)
class RuleSet:
    propagation: dict[str, tuple[AtomicEdit, ...]]
    add_requirement: dict[str, AddedReqOutcome]
    traversal: dict[str, TraversalAction]
    user_cells: frozenset[str] = frozenset()


def default_propagate_target(change_type: ChangeType) -> ChangeType:
    """Change type a generic propagate alternative hands to the neighbor.

    Deleting a requirement removes whatever the neighbor drew from it, which
    surfaces there as a property deletion; every other node change propagates
    as itself.
    """
    if change_type is ChangeType.DELETE_REQUIREMENT:
        return ChangeType.DELETE_PROPERTY
    return change_type


def full_menu(change_type: ChangeType) -> tuple[AtomicEdit, ...]:
    """Every alternative, offered when no cell narrows the choice down."""
    target = default_propagate_target(change_type)
    return (
        AtomicEdit(EditKind.NO_IMPACT),
        AtomicEdit(EditKind.PROPAGATE, target),
        AtomicEdit(EditKind.DELETE_RELATION),
        AtomicEdit(EditKind.DELETE_REQUIREMENT_AND_RELATION),
        AtomicEdit(EditKind.PROPAGATE_AND_DELETE_RELATION, target),
    )


# Outgoing propagation cells. Row order groups one change type's cells over
# the five relation kinds; cell entry order is the order choices are shown.
_DEFAULT_PROPAGATION: dict[str, tuple[str, ...]] = {
    "DeleteRequirement/Contains/out": ("delete-requirement-and-relation",),
    "DeleteRequirement/Refines/out": ("delete-requirement-and-relation",),
    "DeleteRequirement/PartiallyRefines/out": ("propagate:DeleteProperty",),
    "DeleteRequirement/Requires/out": ("delete-relation", "delete-requirement-and-relation"),
    "DeleteRequirement/Conflicts/out": ("delete-relation",),
    "AddProperty/Contains/out": ("no-impact",),
    "AddProperty/Refines/out": ("propagate:AddProperty", "delete-relation"),
    "AddProperty/PartiallyRefines/out": ("delete-relation",),
    "AddProperty/Requires/out": ("no-impact",),
    "AddProperty/Conflicts/out": ("no-impact",),
    "DeleteProperty/Contains/out": (
        "no-impact",
        "delete-relation",
        "delete-requirement-and-relation",
        "propagate:DeleteProperty",
    ),
    "DeleteProperty/Refines/out": ("propagate:DeleteProperty", "propagate-and-delete-relation:DeleteProperty"),
    "DeleteProperty/PartiallyRefines/out": ("propagate:DeleteProperty",),
    "DeleteProperty/Requires/out": ("no-impact", "delete-relation", "delete-requirement-and-relation"),
    "DeleteProperty/Conflicts/out": ("no-impact", "delete-relation"),
    "AddConstraintToProperty/Contains/out": (
        "no-impact",
        "propagate:AddConstraintToProperty",
        "delete-relation",
    ),
    "AddConstraintToProperty/Refines/out": ("no-impact",),
    "AddConstraintToProperty/PartiallyRefines/out": ("no-impact",),
    "AddConstraintToProperty/Requires/out": ("no-impact",),
    "AddConstraintToProperty/Conflicts/out": ("no-impact",),
    "DeleteConstraintOfProperty/Contains/out": ("no-impact", "propagate:DeleteConstraintOfProperty"),
    "DeleteConstraintOfProperty/Refines/out": (
        "no-impact",
        "delete-relation",
        "propagate:DeleteConstraintOfProperty",
        "propagate-and-delete-relation:DeleteConstraintOfProperty",
    ),
    "DeleteConstraintOfProperty/PartiallyRefines/out": (
        "no-impact",
        "delete-relation",
        "propagate:DeleteConstraintOfProperty",
        "propagate-and-delete-relation:DeleteConstraintOfProperty",
    ),
    "DeleteConstraintOfProperty/Requires/out": (
        "no-impact",
        "delete-relation",
        "delete-requirement-and-relation",
    ),
    "DeleteConstraintOfProperty/Conflicts/out": ("no-impact", "delete-relation"),
}

# What relating a new requirement R_x to an existing R_i means for the
# architecture. "out" reads R_x <kind> R_i, "in" reads R_i <kind> R_x.
_DEFAULT_ADD_REQUIREMENT: dict[str, str] = {
    "Contains/out": "no-impacted-ae",
    "Contains/in": "no-impacted-ae",
    "Refines/out": "traced-from-existing",
    "Refines/in": "no-impacted-ae",
    "PartiallyRefines/out": "traced-from-existing",
    "PartiallyRefines/in": "no-impacted-ae",
    "Requires/out": "traced-from-existing",
    "Requires/in": "traced-from-existing",
}

_TRAVERSAL_COLUMNS: tuple[str, ...] = (
    "Contains/out",
    "Refines/out",
    "PartiallyRefines/out",
    "Contains/in",
    "Refines/in",
    "PartiallyRefines/in",
)

# Per change type: which of the six hierarchy columns a walk may follow.
_TRAVERSAL_ROWS: dict[str, tuple[str, ...]] = {
    "DeleteRequirement": ("dont-take", "dont-take", "dont-take", "dont-take", "take", "dont-take"),
    "DeleteProperty": ("take", "dont-take", "dont-take", "dont-take", "take", "take"),
    "ChangeProperty": ("take", "dont-take", "dont-take", "dont-take", "take", "take"),
    "AddConstraintToProperty": ("take", "dont-take", "dont-take", "dont-take", "take", "take"),
    "DeleteConstraintOfProperty": ("take", "dont-take", "dont-take", "dont-take", "take", "take"),
    "ChangeConstraintOfProperty": ("take", "dont-take", "dont-take", "dont-take", "take", "take"),
}


def default_rules() -> RuleSet:
    propagation = {
        address: tuple(parse_edit(text) for text in cell) for address, cell in _DEFAULT_PROPAGATION.items()
    }
    add_requirement = {
        address: AddedReqOutcome(value) for address, value in _DEFAULT_ADD_REQUIREMENT.items()
    }
    traversal = {
        f"{change_type}/{column}": TraversalAction(action)
        for change_type, row in _TRAVERSAL_ROWS.items()
        for column, action in zip(_TRAVERSAL_COLUMNS, row)
    }
    return RuleSet(propagation=propagation, add_requirement=add_requirement, traversal=traversal)


def _check_address(address: str, parts: int, where: str) -> list[str]:
    pieces = address.split("/")
    if len(pieces) != parts:
        raise RuleError(f"{where}: bad cell address {address!r}")
    if parts == 3:
        try:
            ChangeType(pieces[0])
        except ValueError:
            raise RuleError(f"{where}: unknown change type in {address!r}") from None
        kind_piece, dir_piece = pieces[1], pieces[2]
    else:
        kind_piece, dir_piece = pieces[0], pieces[1]
    try:
        RelationKind(kind_piece)
    except ValueError:
        raise RuleError(f"{where}: unknown relation kind in {address!r}") from None
    if dir_piece not in (Direction.OUTGOING.value, Direction.INCOMING.value):
        raise RuleError(f"{where}: unknown direction in {address!r}")
    return pieces


def load_rules(source: Mapping[str, Any] | str | Path) -> RuleSet:
    """Merge a user rule document over the defaults.

    Raises :class:`RuleError` listing every cell that redefines a default
    differently without ``"override": true``, and for any malformed address
    or edit spelling.
    """
    if not isinstance(source, Mapping):
        source = read_json(source)
    if not isinstance(source, Mapping):
        raise RuleError("rule document must be a JSON object")

    base = default_rules()
    override = bool(source.get("override", False))
    conflicts: list[str] = []
    user_cells: set[str] = set()

    propagation = dict(base.propagation)
    for address, raw_cell in (source.get("propagation") or {}).items():
        _check_address(address, 3, "propagation")
        if not isinstance(raw_cell, list):
            raise RuleError(f"propagation {address}: cell must be a list of edits")
        cell = tuple(parse_edit(str(text)) for text in raw_cell)
        if address in base.propagation and base.propagation[address] != cell:
            if not override:
                conflicts.append(f"propagation {address}")
                continue
            user_cells.add(address)
        elif address not in base.propagation:
            user_cells.add(address)
        propagation[address] = cell

    add_requirement = dict(base.add_requirement)
    for address, raw_value in (source.get("add_requirement") or {}).items():
        _check_address(address, 2, "add_requirement")
        try:
            outcome = AddedReqOutcome(str(raw_value))
        except ValueError:
            raise RuleError(f"add_requirement {address}: unknown outcome {raw_value!r}") from None
        if address in base.add_requirement and base.add_requirement[address] is not outcome:
            if not override:
                conflicts.append(f"add_requirement {address}")
                continue
            user_cells.add(address)
        elif address not in base.add_requirement:
            user_cells.add(address)
        add_requirement[address] = outcome

    traversal = dict(base.traversal)
    for address, raw_value in (source.get("traversal") or {}).items():
        _check_address(address, 3, "traversal")
        try:
            action = TraversalAction(str(raw_value))
        except ValueError:
            raise RuleError(f"traversal {address}: unknown action {raw_value!r}") from None
        if address in base.traversal and base.traversal[address] is not action:
            if not override:
                conflicts.append(f"traversal {address}")
                continue
            user_cells.add(address)
        elif address not in base.traversal:
            user_cells.add(address)
        traversal[address] = action

    if conflicts:
        listing = "; ".join(conflicts)
        raise RuleError(f"ConflictingCell: {listing} (set \"override\": true to replace defaults)")

    return RuleSet(
        propagation=propagation,
        add_requirement=add_requirement,
        traversal=traversal,
        user_cells=frozenset(user_cells),
    )


def rules_to_dict(rules: RuleSet) -> dict[str, Any]:
    # A dump lists every cell, including user replacements of defaults, so it
    # must carry the override flag to be loadable again.
    return {
        "override": True,
        "propagation": {addr: [edit.spec for edit in cell] for addr, cell in rules.propagation.items()},
        "add_requirement": {addr: outcome.value for addr, outcome in rules.add_requirement.items()},
        "traversal": {addr: action.value for addr, action in rules.traversal.items()},
    }


def lookup_alternatives(
    rules: RuleSet, change_type: ChangeType, kind: RelationKind, direction: Direction
) -> tuple[tuple[AtomicEdit, ...], bool]:
    """Alternatives for one relation crossing, plus an unspecified flag.

    An unspecified cell returns the full menu; the caller must collect a
    justification for whichever entry gets picked.
    """
    address = propagation_address(change_type, kind, direction)
    cell = rules.propagation.get(address)
    if cell is not None:
        return cell, False
    return full_menu(change_type), True


def added_requirement_outcome(
    rules: RuleSet, kind: RelationKind, direction: Direction
) -> tuple[AddedReqOutcome, bool]:
    """Outcome for one relation of a newly added requirement, plus a defaulted flag."""
    address = relation_address(kind, direction)
    outcome = rules.add_requirement.get(address)
    if outcome is not None:
        return outcome, False
    return AddedReqOutcome.NO_IMPACTED_AE, True


def traversal_action(
    rules: RuleSet, change_type: ChangeType, kind: RelationKind, direction: Direction
) -> TraversalAction:
    address = propagation_address(change_type, kind, direction)
    return rules.traversal.get(address, TraversalAction.DONT_TAKE)


def _reachable_propagation_addresses() -> list[str]:
    addresses = []
    for change_type in sorted(NODE_CHANGES, key=lambda ct: ct.value):
        for kind in RelationKind:
            if kind is RelationKind.CONFLICTS:
                addresses.append(propagation_address(change_type, kind, Direction.OUTGOING))
                continue
            for direction in (Direction.OUTGOING, Direction.INCOMING):
                addresses.append(propagation_address(change_type, kind, direction))
    return addresses


def validate_rules(rules: RuleSet) -> list[Violation]:
    """Report empty cells (errors) plus coverage gaps and oddities (notices)."""
    violations: list[Violation] = []
    for address, cell in sorted(rules.propagation.items()):
        if not cell:
            violations.append(Violation("EmptyCell", f"propagation {address}", "cell offers no alternative"))
    for address in _reachable_propagation_addresses():
        if address not in rules.propagation:
            violations.append(
                Violation(
                    "UnspecifiedCell",
                    f"propagation {address}",
                    "no alternatives defined; sessions fall back to the full menu",
                    severity=NOTICE,
                )
            )
    for kind in RelationKind:
        directions = (Direction.OUTGOING,) if kind is RelationKind.CONFLICTS else (
            Direction.OUTGOING,
            Direction.INCOMING,
        )
        for direction in directions:
            address = relation_address(kind, direction)
            if address not in rules.add_requirement:
                violations.append(
                    Violation(
                        "DefaultedOutcome",
                        f"add_requirement {address}",
                        "no outcome defined; treated as no impacted elements",
                        severity=NOTICE,
                    )
                )
    for address, action in sorted(rules.traversal.items()):
        if action is not TraversalAction.TAKE:
            continue
        kind_piece = address.split("/")[1]
        if kind_piece in (RelationKind.REQUIRES.value, RelationKind.CONFLICTS.value):
            violations.append(
                Violation(
                    "ForcedTraversal",
                    f"traversal {address}",
                    f"walks do not usually follow {kind_piece} relations",
                    severity=NOTICE,
                )
            )
    return violations
