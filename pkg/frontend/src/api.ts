/**
 * Thin typed client for the service endpoints.
 *
 * Every call resolves to the parsed response body or rejects with ApiError
 * carrying the server's {code, message} pair (code "Unreachable" when the
 * request never got an answer).
 */

import type {
  ArchitectureModelDoc,
  ChangeDoc,
  ImpactReportDoc,
  RequirementsModelDoc,
  SessionCreatedDoc,
  SessionDoc,
  SessionListDoc,
  TraceModelDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class Client {
  constructor(readonly base: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.base + path, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, "Unreachable", `cannot reach the server: ${String(err)}`);
    }
    const text = await response.text();
    let data: unknown = null;
    if (text) {
      try {
        data = JSON.parse(text);
      } catch {
        data = null;
      }
    }
    if (!response.ok) {
      const payload = (data ?? {}) as Record<string, unknown>;
      const code = typeof payload.code === "string" ? payload.code : "HttpError";
      const message =
        typeof payload.message === "string" ? payload.message : `${response.status} on ${path}`;
      throw new ApiError(response.status, code, message);
    }
    return data as T;
  }

  model(): Promise<RequirementsModelDoc> {
    return this.request("GET", "/model");
  }

  architecture(): Promise<ArchitectureModelDoc> {
    return this.request("GET", "/architecture");
  }

  traces(): Promise<TraceModelDoc> {
    return this.request("GET", "/traces");
  }

  sessions(): Promise<SessionListDoc> {
    return this.request("GET", "/sessions");
  }

  session(id: string): Promise<SessionDoc> {
    return this.request("GET", `/sessions/${encodeURIComponent(id)}`);
  }

  createSession(change: ChangeDoc): Promise<SessionCreatedDoc> {
    return this.request("POST", "/sessions", { change });
  }

  choose(id: string, decision: string, pick: string, justification: string | null): Promise<SessionDoc> {
    return this.request("POST", `/sessions/${encodeURIComponent(id)}/choices`, {
      decision,
      pick,
      justification,
    });
  }

  impact(id: string, select: string | null): Promise<ImpactReportDoc> {
    return this.request("POST", `/sessions/${encodeURIComponent(id)}/impact`, { select });
  }
}
