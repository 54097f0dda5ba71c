/**
 * Typed client for the annotation service HTTP API.
 *
 * Network failures and 5xx responses are retried with backoff; other
 * HTTP errors surface immediately as ApiError. Every server payload is
 * projected through an allowlist parser before it reaches UI state, so
 * a field the UI must never see (a stored label, say) cannot ride along
 * even if the server were to leak one.
 */

export type Verdict = 0 | 1;

export interface AnnotatorTask {
  id: string;
  document: string;
  claim: string;
  my_verdict: Verdict | null;
}

export interface AnnotatorQueue {
  role: "annotator";
  annotator: string;
  tasks: AnnotatorTask[];
  total: number;
  remaining: number;
  done: boolean;
}

export interface AdjudicatorTask {
  id: string;
  document: string;
  claim: string;
  status: string;
  verdicts: Record<string, Verdict>;
  final: Verdict | null;
}

export interface AdjudicatorQueue {
  role: "adjudicator";
  tasks: AdjudicatorTask[];
  total: number;
  pending: number;
}

export type TaskQueue = AnnotatorQueue | AdjudicatorQueue;

export interface VerdictAck {
  ok: boolean;
  task_id: string;
  my_verdict: Verdict;
}

export interface AdjudicationAck {
  ok: boolean;
  task_id: string;
  status: string;
  final: Verdict;
}

export interface PipelineReport {
  n: number;
  kappa: number;
  synthetic_label_accuracy: number;
  annotator_accuracy_mean: number;
  per_annotator_accuracy: Record<string, number>;
  adjudicated: number;
}

export interface AgreementReport {
  n_tasks: number;
  annotators: string[];
  pipelines: Record<string, PipelineReport>;
}

export class ApiError extends Error {
  status: number;
  detail: unknown;

  constructor(status: number, detail: unknown) {
    super(typeof detail === "string" ? detail : `request failed (${status})`);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

/** Task ids blocking the report, when err is the report's 409. */
export function openTaskIds(err: unknown): string[] | null {
  if (err instanceof ApiError && err.status === 409) {
    const detail = err.detail as { open_task_ids?: unknown } | null;
    if (detail && Array.isArray(detail.open_task_ids)) {
      return detail.open_task_ids.map(String);
    }
  }
  return null;
}

function asVerdict(value: unknown): Verdict | null {
  return value === 0 || value === 1 ? value : null;
}

/** Keep only the fields the annotator screen is allowed to render. */
export function parseAnnotatorQueue(raw: any): AnnotatorQueue {
  const tasks: AnnotatorTask[] = (raw.tasks ?? []).map((t: any) => ({
    id: String(t.id),
    document: String(t.document),
    claim: String(t.claim),
    my_verdict: asVerdict(t.my_verdict),
  }));
  const remaining = tasks.filter((t) => t.my_verdict === null).length;
  return {
    role: "annotator",
    annotator: String(raw.annotator ?? ""),
    tasks,
    total: tasks.length,
    remaining,
    done: remaining === 0,
  };
}

export function parseAdjudicatorQueue(raw: any): AdjudicatorQueue {
  const tasks: AdjudicatorTask[] = (raw.tasks ?? []).map((t: any) => {
    const verdicts: Record<string, Verdict> = {};
    for (const [name, v] of Object.entries(t.verdicts ?? {})) {
      const verdict = asVerdict(v);
      if (verdict !== null) {
        verdicts[name] = verdict;
      }
    }
    return {
      id: String(t.id),
      document: String(t.document),
      claim: String(t.claim),
      status: String(t.status ?? ""),
      verdicts,
      final: asVerdict(t.final),
    };
  });
  return {
    role: "adjudicator",
    tasks,
    total: Number(raw.total ?? tasks.length),
    pending: tasks.length,
  };
}

export type FetchFn = (input: string, init?: RequestInit) => Promise<Response>;

export interface ClientOptions {
  baseUrl?: string;
  fetchFn?: FetchFn;
  /** total attempts per request, including the first */
  attempts?: number;
  /** backoff base in ms; attempt n waits base * 2^(n-1) */
  backoffMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

export class ApiClient {
  private token: string;
  private baseUrl: string;
  private fetchFn: FetchFn;
  private attempts: number;
  private backoffMs: number;
  private sleep: (ms: number) => Promise<void>;

  constructor(token: string, options: ClientOptions = {}) {
    this.token = token;
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.fetchFn = options.fetchFn ?? ((input, init) => fetch(input, init));
    this.attempts = options.attempts ?? 3;
    this.backoffMs = options.backoffMs ?? 300;
    this.sleep = options.sleep ?? defaultSleep;
  }

  private async request(method: string, path: string, body?: unknown): Promise<any> {
    const init: RequestInit = {
      method,
      headers: {
        authorization: `Bearer ${this.token}`,
        ...(body === undefined ? {} : { "content-type": "application/json" }),
      },
      ...(body === undefined ? {} : { body: JSON.stringify(body) }),
    };
    let lastError: unknown;
    for (let attempt = 1; attempt <= this.attempts; attempt++) {
      let response: Response;
      try {
        response = await this.fetchFn(this.baseUrl + path, init);
      } catch (err) {
        // no connection: the caller's input is retained in client state,
        // we just retry the send
        lastError = err;
        if (attempt < this.attempts) {
          await this.sleep(this.backoffMs * 2 ** (attempt - 1));
        }
        continue;
      }
      if (response.ok) {
        return response.json();
      }
      const payload = await response.json().catch(() => null);
      const detail =
        payload && typeof payload === "object" && "detail" in payload
          ? (payload as { detail: unknown }).detail
          : payload;
      if (response.status >= 500) {
        lastError = new ApiError(response.status, detail);
        if (attempt < this.attempts) {
          await this.sleep(this.backoffMs * 2 ** (attempt - 1));
        }
        continue;
      }
      throw new ApiError(response.status, detail);
    }
    throw lastError;
  }

  async getTasks(): Promise<TaskQueue> {
    const raw = await this.request("GET", "/tasks");
    return raw.role === "adjudicator"
      ? parseAdjudicatorQueue(raw)
      : parseAnnotatorQueue(raw);
  }

  async submitVerdict(taskId: string, verdict: Verdict): Promise<VerdictAck> {
    const raw = await this.request(
      "POST",
      `/tasks/${encodeURIComponent(taskId)}/verdict`,
      { verdict },
    );
    return {
      ok: Boolean(raw.ok),
      task_id: String(raw.task_id),
      my_verdict: asVerdict(raw.my_verdict) ?? verdict,
    };
  }

  async adjudicate(taskId: string, verdict: Verdict): Promise<AdjudicationAck> {
    const raw = await this.request(
      "POST",
      `/tasks/${encodeURIComponent(taskId)}/adjudication`,
      { verdict },
    );
    return {
      ok: Boolean(raw.ok),
      task_id: String(raw.task_id),
      status: String(raw.status ?? ""),
      final: asVerdict(raw.final) ?? verdict,
    };
  }

  async getReport(): Promise<AgreementReport> {
    const raw = await this.request("GET", "/report");
    return raw as AgreementReport;
  }
}
