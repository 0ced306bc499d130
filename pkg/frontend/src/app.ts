/**
 * Single-page client for the change propagation service.
 *
 * The app holds exactly the last confirmed server state (model, session body,
 * impact report) and re-renders the three panels from it. Mutations run one
 * at a time; while one is in flight further submits are ignored. No rule
 * outcome is ever computed here.
 */

import { ApiError, Client } from "./api.js";
import { renderDecisions } from "./decisions.js";
import { el, option } from "./dom.js";
import { renderExplorer } from "./explorer.js";
import { renderImpact } from "./impact.js";
import type {
  ChangeDoc,
  ImpactReportDoc,
  RequirementsModelDoc,
  SessionDoc,
} from "./types.js";
import { CHANGE_TYPES, RATIONALES } from "./types.js";

function describeError(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.message}`;
  return String(err);
}

export class App {
  private readonly client: Client;
  private readonly root: HTMLElement;
  private model: RequirementsModelDoc | null = null;
  private sessionIds: string[] = [];
  private session: SessionDoc | null = null;
  private report: ImpactReportDoc | null = null;
  private banner: string | null = null;
  private busy = false;
  private inflight: Promise<void> = Promise.resolve();

  constructor(root: HTMLElement, base: string = "") {
    this.root = root;
    this.client = new Client(base);
  }

  get sessionId(): string | null {
    return this.session?.id ?? null;
  }

  /** Resolves once the currently running server interaction has settled. */
  whenIdle(): Promise<void> {
    return this.inflight;
  }

  async init(): Promise<void> {
    this.inflight = (async () => {
      try {
        this.model = await this.client.model();
        this.sessionIds = (await this.client.sessions()).sessions;
        this.banner = null;
      } catch (err) {
        this.model = null;
        this.banner = describeError(err);
      }
      this.render();
    })();
    return this.inflight;
  }

  private run(task: () => Promise<void>): void {
    if (this.busy) return;
    this.busy = true;
    this.render();
    this.inflight = (async () => {
      try {
        await task();
        this.banner = null;
      } catch (err) {
        this.banner = describeError(err);
      }
      this.busy = false;
      this.render();
    })();
  }

  private propose(change: ChangeDoc): void {
    this.run(async () => {
      const created = await this.client.createSession(change);
      this.session = await this.client.session(created.id);
      this.report = null;
      if (!this.sessionIds.includes(created.id)) {
        this.sessionIds = [...this.sessionIds, created.id].sort();
      }
    });
  }

  private attach(id: string): void {
    this.run(async () => {
      this.session = await this.client.session(id);
      this.report = null;
    });
  }

  private choose(decision: string, pick: string, justification: string | null): void {
    const session = this.session;
    if (!session) return;
    this.run(async () => {
      this.session = await this.client.choose(session.id, decision, pick, justification);
    });
  }

  private queryImpact(select: string): void {
    const session = this.session;
    if (!session) return;
    this.run(async () => {
      this.report = await this.client.impact(session.id, select);
    });
  }

  private leave(): void {
    this.session = null;
    this.report = null;
    this.banner = null;
    this.render();
  }

  private proposalForm(model: RequirementsModelDoc): HTMLElement {
    const type = el("select", { name: "type" }) as HTMLSelectElement;
    for (const name of CHANGE_TYPES) type.append(option(name));
    const rationale = el("select", { name: "rationale" }) as HTMLSelectElement;
    for (const name of RATIONALES) rationale.append(option(name));

    const target = el("input", { name: "target", list: "target-ids", required: "" });
    const datalist = el("datalist", { id: "target-ids" });
    for (const requirement of model.requirements) datalist.append(option(requirement.id));
    for (const relation of model.relations) datalist.append(option(relation.id));

    const payload = el("textarea", {
      name: "payload",
      rows: "3",
      placeholder: "Payload JSON (optional)",
    }) as HTMLTextAreaElement;

    const submit = el("button", { type: "submit" }, "Propose change");
    if (this.busy) submit.setAttribute("disabled", "");

    const form = el(
      "form",
      { class: "proposal", id: "proposal" },
      el("label", {}, "Change ", type),
      el("label", {}, "Target ", target, datalist),
      el("label", {}, "Rationale ", rationale),
      el("label", {}, "Payload ", payload),
      submit,
    );
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const text = payload.value.trim();
      let parsed: Record<string, unknown> | null = null;
      if (text) {
        try {
          parsed = JSON.parse(text) as Record<string, unknown>;
        } catch {
          this.banner = "payload is not valid JSON";
          this.render();
          return;
        }
      }
      this.propose({
        type: type.value,
        target: (target as HTMLInputElement).value,
        rationale: rationale.value,
        payload: parsed,
      });
    });
    return form;
  }

  private sessionPicker(): HTMLElement {
    const picker = el("form", { class: "session-picker" });
    const select = el("select", { name: "session" }) as HTMLSelectElement;
    for (const id of this.sessionIds) select.append(option(id));
    const submit = el("button", { type: "submit" }, "Open");
    if (this.busy) submit.setAttribute("disabled", "");
    picker.append(el("label", {}, "Stored sessions ", select), submit);
    picker.addEventListener("submit", (event) => {
      event.preventDefault();
      if (select.value) this.attach(select.value);
    });
    return picker;
  }

  private sessionBar(session: SessionDoc): HTMLElement {
    const leave = el("button", { type: "button", class: "leave" }, "Leave session");
    leave.addEventListener("click", () => this.leave());
    return el(
      "div",
      { class: "session-bar" },
      el("span", { class: "session-id" }, session.id),
      el(
        "span",
        {
          class: session.complete ? "session-state complete" : "session-state open",
          "data-complete": String(session.complete),
        },
        session.complete ? "complete" : "in progress",
      ),
      el("span", { class: "session-change" }, `${session.change.type} at ${session.change.target}`),
      leave,
    );
  }

  private render(): void {
    this.root.replaceChildren();
    if (this.banner) {
      this.root.append(el("div", { class: "banner", role: "alert" }, this.banner));
    }
    if (!this.model) return;

    if (this.session) {
      this.root.append(this.sessionBar(this.session));
    } else {
      this.root.append(this.proposalForm(this.model));
      if (this.sessionIds.length > 0) this.root.append(this.sessionPicker());
    }

    const path = this.session?.path ?? null;
    this.root.append(renderExplorer(this.model, path));
    if (this.session) {
      this.root.append(
        renderDecisions(this.session.pending, this.busy, (decision, pick, justification) =>
          this.choose(decision, pick, justification),
        ),
      );
    }
    this.root.append(renderImpact(path, this.report, this.busy, (select) => this.queryImpact(select)));
  }
}
