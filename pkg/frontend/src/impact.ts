/**
 * Impact panel: pick an impacted requirement, ask the server, and render the
 * report it returned: outcome, reason, propagation steps, terminals, and
 * candidate elements grouped by trace kind. Nothing is computed locally.
 */

import { el, option } from "./dom.js";
import type { CandidateDoc, ImpactReportDoc, PathDoc } from "./types.js";

export type ImpactHandler = (select: string) => void;

function groupByKind(candidates: CandidateDoc[]): Map<string, CandidateDoc[]> {
  const groups = new Map<string, CandidateDoc[]>();
  for (const candidate of candidates) {
    const group = groups.get(candidate.kind) ?? [];
    group.push(candidate);
    groups.set(candidate.kind, group);
  }
  return groups;
}

function renderReport(report: ImpactReportDoc): HTMLElement {
  const body = el("div", { class: "report" });
  body.append(
    el(
      "p",
      { class: `outcome outcome-${report.outcome}`, "data-outcome": report.outcome },
      report.outcome,
    ),
  );
  if (report.reason) {
    body.append(el("p", { class: "reason" }, report.reason));
  }

  if (report.path.edges.length > 0) {
    const steps = el("ol", { class: "steps" });
    for (const edge of report.path.edges) {
      steps.append(
        el(
          "li",
          { "data-relation": edge.relation.id },
          `${edge.from_requirement} to ${edge.to_requirement} over ${edge.relation.kind} (${edge.chosen})`,
        ),
      );
    }
    body.append(el("h3", {}, "Steps taken"), steps);
  }

  if (report.terminals.length > 0) {
    const terminals = el("ul", { class: "terminals" });
    for (const terminal of report.terminals) {
      terminals.append(el("li", { "data-terminal": terminal }, terminal));
    }
    body.append(el("h3", {}, "Terminals"), terminals);
  }

  if (report.candidates.length > 0) {
    body.append(el("h3", {}, "Candidate elements"));
    for (const [kind, group] of groupByKind(report.candidates)) {
      const list = el("ul", { class: "candidates", "data-trace-kind": kind });
      for (const candidate of group) {
        list.append(
          el(
            "li",
            { "data-element": candidate.element, "data-kind": candidate.kind },
            el("span", { class: "element" }, candidate.element),
            el(
              "span",
              { class: "via" },
              `via ${candidate.via_requirement} (${candidate.trace_id})`,
            ),
          ),
        );
      }
      body.append(el("h4", { class: "trace-kind" }, kind), list);
    }
  }

  if (report.notices.length > 0) {
    const notices = el("ul", { class: "notices" });
    for (const notice of report.notices) {
      notices.append(
        el("li", { "data-code": notice.code }, `[${notice.code}] ${notice.location}: ${notice.message}`),
      );
    }
    body.append(el("h3", {}, "Notices"), notices);
  }
  return body;
}

export function renderImpact(
  path: PathDoc | null,
  report: ImpactReportDoc | null,
  busy: boolean,
  onQuery: ImpactHandler,
): HTMLElement {
  const panel = el("section", { class: "panel", id: "impact" }, el("h2", {}, "Architecture impact"));
  if (!path) {
    panel.append(el("p", { class: "empty" }, "Start a session first."));
    return panel;
  }

  const select = el("select", { name: "select" }) as HTMLSelectElement;
  for (const id of Object.keys(path.nodes).sort()) {
    if (path.nodes[id].status === "NoImpact") continue;
    select.append(option(id));
  }
  const submit = el("button", { type: "submit" }, "Compute impact");
  if (busy) submit.setAttribute("disabled", "");
  const form = el("form", { class: "impact-query" }, el("label", {}, "From requirement ", select), submit);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (select.value) onQuery(select.value);
  });
  panel.append(form);

  if (report) panel.append(renderReport(report));
  return panel;
}
