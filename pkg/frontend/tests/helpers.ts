/** Stubbed REST plumbing shared by the contract tests. */

import type { ExecutionRecord, FetchLike, RegistryEntry } from "../src/api.js";

export function okJson(data: unknown): Response {
  return new Response(JSON.stringify({ ok: true, data }), {
    status: 200,
    headers: { "content-type": "application/json" },
  });
}

export function errJson(status: number, type: string, msg: string): Response {
  return new Response(JSON.stringify({ ok: false, error: { type, msg } }), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export interface RecordedCall {
  path: string;
  params: Record<string, string>;
}

export interface StubApi {
  fetchFn: FetchLike;
  calls: RecordedCall[];
}

/** Records every request and lets the handler script the responses. */
export function stubApi(
  handler: (path: string, params: URLSearchParams) => Response,
): StubApi {
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = (url) => {
    const parsed = new URL(url);
    calls.push({
      path: parsed.pathname,
      params: Object.fromEntries(parsed.searchParams),
    });
    return Promise.resolve(handler(parsed.pathname, parsed.searchParams));
  };
  return { fetchFn, calls };
}

export function makeRecord(over: Partial<ExecutionRecord> = {}): ExecutionRecord {
  return {
    weid: "we-0000",
    workflow_id: "W_thermo_mech",
    status: "Created",
    inputs: {},
    outputs: {},
    created_at: 1_700_000_000,
    started_at: null,
    finished_at: null,
    error: null,
    ...over,
  };
}

export function makeRegistryEntry(
  over: Partial<RegistryEntry> & { data?: Record<string, unknown> } = {},
): RegistryEntry {
  const { data, ...rest } = over;
  return {
    name: "jobman.thermal",
    ref: { uri: "copla://127.0.0.1:40001/jm-1" },
    metadata: {
      data: data ?? { Type: "JobManager", Model: "thermal", MaxJobs: 2 },
    },
    registered_at: 1_700_000_000,
    last_heartbeat: 1_700_000_057,
    ...rest,
  };
}
