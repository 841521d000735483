import type {
  ApiErrorBody,
  EditPayload,
  HealthBody,
  HistoryBody,
  SessionBody,
  StageName,
} from "./types.js";

/** Error raised for any non-2xx response or transport failure.
 *
 * `kind` and `stage` come from the server's error body when one is present
 * ({"error": {"kind", "stage", "message"}}); transport failures get kind
 * "NetworkError" and no stage. `status` is 0 when no response arrived.
 */
export class ApiError extends Error {
  readonly kind: string;
  readonly stage: string | null;
  readonly status: number;

  constructor(kind: string, stage: string | null, message: string, status: number) {
    super(message);
    this.name = "ApiError";
    this.kind = kind;
    this.stage = stage;
    this.status = status;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Thin client for the /v1 session endpoints. The base URL is the only
 * configuration; everything else the UI knows comes out of these calls. */
export class SessionApi {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    // bind: browsers reject fetch called without its global receiver
    this.fetchImpl = fetchImpl ?? ((url, init) => globalThis.fetch(url, init));
  }

  async createSession(topic: string): Promise<SessionBody> {
    return this.request<SessionBody>("POST", "/v1/sessions", { topic });
  }

  async getSession(sessionId: string): Promise<SessionBody> {
    return this.request<SessionBody>("GET", `/v1/sessions/${sessionId}`);
  }

  async getHistory(sessionId: string): Promise<HistoryBody> {
    return this.request<HistoryBody>("GET", `/v1/sessions/${sessionId}/history`);
  }

  async advance(sessionId: string): Promise<SessionBody> {
    return this.request<SessionBody>("POST", `/v1/sessions/${sessionId}/advance`);
  }

  async run(sessionId: string): Promise<SessionBody> {
    return this.request<SessionBody>("POST", `/v1/sessions/${sessionId}/run`);
  }

  async editStage(
    sessionId: string,
    stage: StageName,
    payload: EditPayload,
  ): Promise<SessionBody> {
    return this.request<SessionBody>(
      "PATCH",
      `/v1/sessions/${sessionId}/stages/${stage}`,
      { payload },
    );
  }

  async health(): Promise<HealthBody> {
    return this.request<HealthBody>("GET", "/v1/health");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      throw new ApiError("NetworkError", null, `request failed: ${reason}`, 0);
    }
    if (response.ok) {
      return (await response.json()) as T;
    }
    throw await this.toError(response);
  }

  private async toError(response: Response): Promise<ApiError> {
    let parsed: ApiErrorBody | null = null;
    try {
      parsed = (await response.json()) as ApiErrorBody;
    } catch {
      parsed = null;
    }
    if (parsed && typeof parsed === "object" && parsed.error) {
      const { kind, stage, message } = parsed.error;
      return new ApiError(kind, stage ?? null, message, response.status);
    }
    return new ApiError("HttpError", null, `HTTP ${response.status}`, response.status);
  }
}
