import { SessionApi } from "../../src/api.js";
import type { SessionBody, StateData } from "../../src/types.js";

export interface Call {
  method: string;
  path: string;
  body: unknown;
}

export type Handler = (call: Call) => { status: number; body: unknown };

/** SessionApi wired to an in-memory handler; records every request. */
export function fakeApi(handler: Handler): { api: SessionApi; calls: Call[] } {
  const calls: Call[] = [];
  const api = new SessionApi("http://fake", async (url, init) => {
    const call: Call = {
      method: init?.method ?? "GET",
      path: url.replace("http://fake", ""),
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    };
    calls.push(call);
    const { status, body } = handler(call);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  });
  return { api, calls };
}

export function sessionBody(state: StateData): SessionBody {
  return { session_id: "s1", created_at: "2026-01-01T00:00:00+00:00", state };
}

export function errorBody(kind: string, stage: string | null, message: string) {
  return { error: { kind, stage, message } };
}

export const EMPTY_HISTORY = { session_id: "s1", events: [] };
