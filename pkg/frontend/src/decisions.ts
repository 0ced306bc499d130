/**
 * Decision panel: one card per pending decision, radio buttons for the
 * alternatives the server offered (verbatim), and a justification field on
 * cards whose rule cell the server flagged as unspecified.
 */

import { el } from "./dom.js";
import type { PendingDecisionDoc } from "./types.js";

export type ChoiceHandler = (decision: string, pick: string, justification: string | null) => void;

function card(decision: PendingDecisionDoc, busy: boolean, onChoice: ChoiceHandler): HTMLElement {
  const form = el("form", { class: "decision", "data-decision": decision.id });
  if (decision.unspecified_cell) form.setAttribute("data-unspecified", "true");

  form.append(
    el(
      "header",
      {},
      el("span", { class: "rel-end" }, decision.from_requirement),
      el("span", { class: `rel-kind kind-${decision.relation.kind}` }, decision.relation.kind),
      el("span", { class: "rel-end" }, decision.to_requirement),
      el("span", { class: "meta" }, `${decision.change_type}, ${decision.direction}`),
    ),
  );

  const group = el("div", { class: "alternatives" });
  for (const alternative of decision.alternatives) {
    const input = el("input", {
      type: "radio",
      name: `alt-${decision.id}`,
      value: alternative,
    });
    group.append(
      el("label", { class: "alternative", "data-alternative": alternative }, input, alternative),
    );
  }
  form.append(group);

  let justification: HTMLTextAreaElement | null = null;
  if (decision.unspecified_cell) {
    justification = el("textarea", {
      class: "justification",
      rows: "2",
      placeholder: "Justification (required: no published rule covers this cell)",
    });
    form.append(
      el("p", { class: "hint" }, "No published rule covers this cell; justify your pick."),
      justification,
    );
  }

  const submit = el("button", { type: "submit" }, "Apply");
  if (busy) submit.setAttribute("disabled", "");
  form.append(submit);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const picked = form.querySelector<HTMLInputElement>("input[type=radio]:checked");
    if (!picked) return;
    const text = justification?.value.trim() ?? "";
    onChoice(decision.id, picked.value, text ? text : null);
  });
  return form;
}

export function renderDecisions(
  pending: PendingDecisionDoc[],
  busy: boolean,
  onChoice: ChoiceHandler,
): HTMLElement {
  const panel = el("section", { class: "panel", id: "decisions" }, el("h2", {}, "Pending decisions"));
  if (pending.length === 0) {
    panel.append(el("p", { class: "empty" }, "Nothing to decide."));
    return panel;
  }
  for (const decision of pending) {
    panel.append(card(decision, busy, onChoice));
  }
  return panel;
}
