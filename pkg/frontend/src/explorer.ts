/**
 * Model explorer: the requirements graph as layered rows of node chips plus a
 * styled relation list. Badges come verbatim from the session path the server
 * returned; without a session nothing is badged.
 */

import { el } from "./dom.js";
import type { PathDoc, RelationDoc, RequirementsModelDoc } from "./types.js";

const HIERARCHY_KINDS = new Set(["Contains", "Refines", "PartiallyRefines"]);

function parentOf(relation: RelationDoc): string {
  // container, or the requirement being refined
  return relation.kind === "Contains" ? relation.source : relation.target;
}

function childOf(relation: RelationDoc): string {
  return relation.kind === "Contains" ? relation.target : relation.source;
}

/** Layer per requirement: length of the longest hierarchy chain above it. */
export function layerAssignment(model: RequirementsModelDoc): Map<string, number> {
  const parents = new Map<string, string[]>();
  for (const relation of model.relations) {
    if (!HIERARCHY_KINDS.has(relation.kind)) continue;
    const child = childOf(relation);
    const list = parents.get(child) ?? [];
    list.push(parentOf(relation));
    parents.set(child, list);
  }
  const depth = new Map<string, number>();
  const resolve = (id: string, trail: Set<string>): number => {
    const known = depth.get(id);
    if (known !== undefined) return known;
    // trail guard keeps a malformed cyclic document from looping
    if (trail.has(id)) return 0;
    trail.add(id);
    let best = 0;
    for (const parent of parents.get(id) ?? []) {
      best = Math.max(best, resolve(parent, trail) + 1);
    }
    trail.delete(id);
    depth.set(id, best);
    return best;
  };
  for (const requirement of model.requirements) {
    resolve(requirement.id, new Set());
  }
  return depth;
}

export function renderExplorer(model: RequirementsModelDoc, path: PathDoc | null): HTMLElement {
  const panel = el("section", { class: "panel", id: "explorer" }, el("h2", {}, "Requirements"));

  const depth = layerAssignment(model);
  const layers = new Map<number, string[]>();
  for (const requirement of model.requirements) {
    const layer = depth.get(requirement.id) ?? 0;
    const row = layers.get(layer) ?? [];
    row.push(requirement.id);
    layers.set(layer, row);
  }
  const textOf = new Map(model.requirements.map((r) => [r.id, r.text]));

  const graph = el("div", { class: "layers" });
  for (const layer of [...layers.keys()].sort((a, b) => a - b)) {
    const row = el("div", { class: "layer" });
    for (const id of layers.get(layer)!.sort()) {
      const chip = el(
        "span",
        { class: "node", "data-req": id, title: textOf.get(id) ?? "" },
        el("span", { class: "req-id" }, id),
      );
      const status = path?.nodes[id]?.status;
      if (status) {
        chip.append(el("span", { class: `badge badge-${status}`, "data-status": status }, status));
      }
      row.append(chip);
    }
    graph.append(row);
  }
  panel.append(graph);

  const onPath = new Set((path?.edges ?? []).map((edge) => edge.relation.id));
  const list = el("ul", { class: "relations" });
  for (const relation of model.relations) {
    const classes = ["relation", `kind-${relation.kind}`];
    if (onPath.has(relation.id)) classes.push("on-path");
    list.append(
      el(
        "li",
        { class: classes.join(" "), "data-relation": relation.id },
        el("span", { class: "rel-end" }, relation.source),
        el("span", { class: "rel-kind" }, relation.kind),
        el("span", { class: "rel-end" }, relation.target),
      ),
    );
  }
  panel.append(el("h3", {}, "Relations"), list);
  return panel;
}
