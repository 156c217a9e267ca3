import {
  ConfigFormat,
  Edit,
  PolicyView,
  PolicyViewSchema,
  SessionCreated,
  SessionCreatedSchema,
  StatefulResult,
  StatefulResultSchema,
  WhatIfResult,
  WhatIfSchema,
} from "./types.js";

/** Error detail the service attaches to non-2xx responses. */
export interface ServiceErrorDetail {
  stage: string;
  message: string;
  path?: string;
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly detail: ServiceErrorDetail,
  ) {
    super(`${detail.stage}: ${detail.message}`);
    this.name = "ServiceError";
  }
}

async function raiseFor(resp: Response): Promise<never> {
  let detail: ServiceErrorDetail = {
    stage: "transport",
    message: `HTTP ${resp.status}`,
  };
  try {
    const body = await resp.json();
    if (body && typeof body.detail === "object") detail = body.detail;
  } catch {
    // non-JSON error body; keep the transport-level detail
  }
  throw new ServiceError(resp.status, detail);
}

/** Thin typed client for the session service; one instance per base URL. */
export class PolicyClient {
  constructor(readonly baseUrl: string) {}

  private async json(path: string, init?: RequestInit): Promise<unknown> {
    const resp = await fetch(this.baseUrl + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!resp.ok) await raiseFor(resp);
    return resp.json();
  }

  async createSession(scenario: unknown): Promise<SessionCreated> {
    const body = await this.json("/sessions", {
      method: "POST",
      body: JSON.stringify(scenario),
    });
    return SessionCreatedSchema.parse(body);
  }

  async getPolicy(sessionId: string): Promise<PolicyView> {
    return PolicyViewSchema.parse(await this.json(`/sessions/${sessionId}/policy`));
  }

  async whatIf(sessionId: string, edits: Edit[]): Promise<WhatIfResult> {
    const body = await this.json(`/sessions/${sessionId}/whatif`, {
      method: "POST",
      body: JSON.stringify({ edits }),
    });
    return WhatIfSchema.parse(body);
  }

  async applyEdits(sessionId: string, edits: Edit[]): Promise<PolicyView> {
    const body = await this.json(`/sessions/${sessionId}/edits`, {
      method: "POST",
      body: JSON.stringify({ edits }),
    });
    return PolicyViewSchema.parse(body);
  }

  async computeStateful(
    sessionId: string,
    preferences?: Edit[],
  ): Promise<StatefulResult> {
    const payload = preferences
      ? { preferences: preferences.map((e) => ({ from: e.from, to: e.to })) }
      : {};
    const body = await this.json(`/sessions/${sessionId}/stateful`, {
      method: "POST",
      body: JSON.stringify(payload),
    });
    return StatefulResultSchema.parse(body);
  }

  async getConfig(
    sessionId: string,
    format: ConfigFormat,
    force = false,
  ): Promise<string> {
    const params = new URLSearchParams({ format });
    if (force) params.set("force", "true");
    const resp = await fetch(
      `${this.baseUrl}/sessions/${sessionId}/configs?${params}`,
    );
    if (!resp.ok) await raiseFor(resp);
    return resp.text();
  }
}
