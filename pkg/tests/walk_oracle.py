"""Brute-force reference for path traversal, kept independent of the engine.

Enumerates every maximal walk from the selected node: a walk may visit a
node once, may only follow relations whose traversal cell says take, and is
maximal when it cannot be extended. The terminal of each such walk is the
node where it stopped. The engine's recursive traversal must agree with this
enumeration on every input.
"""

from __future__ import annotations

import random

from reqimpact.changes import Change, ChangeType, Rationale
from reqimpact.model import Relation, RelationKind
from reqimpact.propagation import NodeStatus, PathEdge, PathNode, PropagationPath
from reqimpact.rules import RuleSet, TraversalAction

# Change types that have a row in the traversal table.
ROW_TYPES = (
    ChangeType.DELETE_REQUIREMENT,
    ChangeType.DELETE_PROPERTY,
    ChangeType.CHANGE_PROPERTY,
    ChangeType.ADD_CONSTRAINT_TO_PROPERTY,
    ChangeType.DELETE_CONSTRAINT_OF_PROPERTY,
    ChangeType.CHANGE_CONSTRAINT_OF_PROPERTY,
)


def oracle_terminals(path: PropagationPath, selected: str, rules: RuleSet) -> set[str]:
    adjacency: dict[str, list[tuple[Relation, str]]] = {node: [] for node in path.nodes}
    for edge in path.edges:
        adjacency[edge.from_requirement].append((edge.relation, edge.to_requirement))
        adjacency[edge.to_requirement].append((edge.relation, edge.from_requirement))

    def takeable(node: str, relation: Relation, neighbor: str) -> bool:
        change = path.nodes[node].accepted_change
        assert change is not None
        kind = relation.kind
        if kind is RelationKind.CONFLICTS:
            address = f"{change.type.value}/{kind.value}/out"
        else:
            side = "out" if relation.source == node else "in"
            address = f"{change.type.value}/{kind.value}/{side}"
        return rules.traversal.get(address) is TraversalAction.TAKE

    terminals: set[str] = set()
    stack: list[tuple[str, frozenset[str]]] = [(selected, frozenset((selected,)))]
    while stack:
        node, walked = stack.pop()
        extensions = [
            neighbor
            for relation, neighbor in adjacency[node]
            if neighbor not in walked and takeable(node, relation, neighbor)
        ]
        if not extensions:
            terminals.add(node)
            continue
        for neighbor in extensions:
            stack.append((neighbor, walked | {neighbor}))
    return terminals


def random_path(rng: random.Random, max_nodes: int = 8) -> tuple[PropagationPath, str]:
    """A random impacted-node graph with random relation kinds and directions."""
    count = rng.randint(1, max_nodes)
    names = [f"N{i}" for i in range(1, count + 1)]
    nodes = {}
    for i, name in enumerate(names):
        status = NodeStatus.STARTING_IMPACTED if i == 0 else NodeStatus.IMPACTED
        change = Change(type=rng.choice(ROW_TYPES), target=name, rationale=Rationale.DOMAIN_CHANGE)
        nodes[name] = PathNode(requirement=name, status=status, accepted_change=change)
    edges = []
    if count > 1:
        for edge_no in range(rng.randint(0, count + 2)):
            a, b = rng.sample(names, 2)
            relation = Relation(
                id=f"e{edge_no}",
                source=a,
                target=b,
                kind=rng.choice(list(RelationKind)),
            )
            edges.append(PathEdge(relation=relation, from_requirement=a, to_requirement=b, chosen="propagate"))
    path = PropagationPath(nodes=nodes, edges=tuple(edges), complete=True)
    return path, rng.choice(names)
