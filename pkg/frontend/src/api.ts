/** Typed client for the platform's REST API.
 *
 * Every dashboard fact comes through this module; there is no other channel
 * and no client-side store of record. Methods map 1:1 onto endpoints.
 */

export interface ApiErrorBody {
  type: string;
  msg: string;
}

interface Envelope<T> {
  ok: boolean;
  data?: T;
  error?: ApiErrorBody;
}

export class ApiError extends Error {
  constructor(
    readonly type: string,
    readonly msg: string,
    readonly status: number,
  ) {
    super(`${type}: ${msg}`);
    this.name = "ApiError";
  }
}

export type SlotKind = "Scalar" | "Property" | "Field-ref";

export type ExecutionState =
  | "Created"
  | "Pending"
  | "Running"
  | "Finished"
  | "Failed";

export const EXECUTION_STATES: readonly ExecutionState[] = [
  "Created",
  "Pending",
  "Running",
  "Finished",
  "Failed",
];

export interface UseCase {
  id: string;
  name: string;
  description: string;
}

export interface InputSlot {
  name: string;
  kind: SlotKind;
  unit: string;
  required: boolean;
  default: string | null;
}

export interface OutputSlot {
  name: string;
  kind: string;
  unit: string;
}

export interface Workflow {
  id: string;
  usecase_id: string;
  name: string;
  version: number;
  input_card_template: InputSlot[];
  output_card_template: OutputSlot[];
}

export interface PropertyDoc {
  _class: "Property";
  value: number | number[];
  unit: { symbol: string };
  property_id: string;
  time: number;
}

export interface FieldDoc {
  _class: "Field";
  field_id: string;
  unit: { symbol: string };
  values: number[][];
  value_dim: number;
  time: number;
}

export type ComponentDoc = PropertyDoc | FieldDoc;

export interface InputValue {
  value: string | null;
  set: boolean;
}

export interface ExecutionRecord {
  weid: string;
  workflow_id: string;
  status: ExecutionState;
  inputs: Record<string, InputValue>;
  outputs: Record<string, ComponentDoc>;
  created_at: number;
  started_at: number | null;
  finished_at: number | null;
  error: string | null;
}

/** Row of GET /workflowexecutions/{WEID}/inputs: slot template + current value. */
export interface InputCardRow extends InputSlot {
  value: string | null;
  set: boolean;
}

export interface PlatformStatus {
  db: string;
  nameserver: boolean | null;
  scheduler: { pending: number; running: number };
}

export interface RegistryEntry {
  name: string;
  ref: { uri: string };
  metadata: { data: Record<string, unknown> };
  registered_at: number;
  last_heartbeat: number;
}

export interface JobRecord {
  job_id: string;
  user: string;
  model_name: string;
  status: string;
  spawned_at: number;
  ref: { uri: string };
}

export type FetchLike = (url: string) => Promise<Response>;

export class ApiClient {
  private readonly base: string;

  constructor(
    base: string,
    private readonly fetchFn: FetchLike = (url) => fetch(url),
  ) {
    this.base = base.replace(/\/+$/, "");
  }

  private async get<T>(
    path: string,
    params?: Record<string, string>,
  ): Promise<T> {
    const query = params ? `?${new URLSearchParams(params)}` : "";
    let response: Response;
    try {
      response = await this.fetchFn(this.base + path + query);
    } catch (err) {
      throw new ApiError("Unreachable", String(err), 0);
    }
    let body: Envelope<T>;
    try {
      body = (await response.json()) as Envelope<T>;
    } catch {
      throw new ApiError(
        "BadResponse",
        `non-JSON response (HTTP ${response.status})`,
        response.status,
      );
    }
    if (!body.ok || body.data === undefined) {
      const error = body.error ?? { type: "Error", msg: "unknown failure" };
      throw new ApiError(error.type, error.msg, response.status);
    }
    return body.data;
  }

  status(): Promise<PlatformStatus> {
    return this.get("/status");
  }

  usecases(): Promise<UseCase[]> {
    return this.get("/usecases");
  }

  usecaseWorkflows(usecaseId: string): Promise<Workflow[]> {
    return this.get(`/usecases/${usecaseId}/workflows`);
  }

  workflow(workflowId: string): Promise<Workflow> {
    return this.get(`/workflows/${workflowId}`);
  }

  executions(workflowId?: string): Promise<ExecutionRecord[]> {
    return this.get(
      "/workflowexecutions",
      workflowId ? { workflow_id: workflowId } : undefined,
    );
  }

  initExecution(workflowId: string): Promise<{ weid: string }> {
    return this.get(`/workflowexecutions/init/${workflowId}`);
  }

  execution(weid: string): Promise<ExecutionRecord> {
    return this.get(`/workflowexecutions/${weid}`);
  }

  inputCard(weid: string): Promise<InputCardRow[]> {
    return this.get(`/workflowexecutions/${weid}/inputs`);
  }

  outputs(weid: string): Promise<Record<string, ComponentDoc>> {
    return this.get(`/workflowexecutions/${weid}/outputs`);
  }

  setInput(weid: string, name: string, value: string): Promise<unknown> {
    return this.get(`/workflowexecutions/${weid}/set`, { [name]: value });
  }

  execute(weid: string): Promise<unknown> {
    return this.get(`/executeworkflow/${weid}`);
  }

  registry(): Promise<RegistryEntry[]> {
    return this.get("/monitor/registry");
  }

  jobs(): Promise<Record<string, JobRecord[]>> {
    return this.get("/monitor/jobs");
  }

  registerDemos(): Promise<{ usecase: string; workflows: string[] }> {
    return this.get("/demo/register");
  }
}
