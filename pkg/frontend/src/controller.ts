import { ApiError, SessionApi } from "./api.js";
import {
  lastEditStage,
  renderSession,
  validateEditPayload,
  type StagePanelModel,
} from "./panels.js";
import type { EditPayload, SessionBody, StageName, StateData } from "./types.js";
import { STAGE_NAMES, stageOrder } from "./types.js";

export type SessionMode = "edit" | "view";

export interface ProgressUpdate {
  stage: StageName;
  done: boolean;
}

export interface EditResult {
  ok: boolean;
  /** Where the failure surfaced: "client" (no request issued), "validation"
   * (server 422), "conflict" (server 409), or "network". */
  rejectedBy?: "client" | "validation" | "conflict" | "network";
  message?: string;
}

/**
 * Holds exactly one session's server-acknowledged state and the user's
 * unsubmitted drafts. Nothing is applied speculatively: the state field
 * only ever changes to a body some /v1 response carried.
 *
 * A "hard refresh" is `SessionController.open` on the same id; it rebuilds
 * the identical view from GET /v1/sessions/{id} plus the history.
 */
export class SessionController {
  readonly api: SessionApi;
  readonly sessionId: string;
  readonly mode: SessionMode;

  private body: SessionBody;
  private editedAt: StageName | null;
  private drafts = new Map<StageName, EditPayload>();
  private errors = new Map<StageName, string>();
  private conflictFlag = false;

  private constructor(
    api: SessionApi,
    body: SessionBody,
    editedAt: StageName | null,
    mode: SessionMode,
  ) {
    this.api = api;
    this.sessionId = body.session_id;
    this.mode = mode;
    this.body = body;
    this.editedAt = editedAt;
  }

  /** Start a fresh session. The creator holds the editing lock. */
  static async create(api: SessionApi, topic: string): Promise<SessionController> {
    const body = await api.createSession(topic);
    return new SessionController(api, body, null, "edit");
  }

  /** Attach to an existing session. Sessions opened in "view" mode stay
   * read-only client-side; the single writer is whoever opened for edit. */
  static async open(
    api: SessionApi,
    sessionId: string,
    mode: SessionMode = "edit",
  ): Promise<SessionController> {
    const body = await api.getSession(sessionId);
    const history = await api.getHistory(sessionId);
    return new SessionController(api, body, lastEditStage(history.events), mode);
  }

  get state(): StateData {
    return this.body.state;
  }

  get createdAt(): string {
    return this.body.created_at;
  }

  get readOnly(): boolean {
    return this.mode === "view";
  }

  /** True after a mutation hit a stage-order conflict, i.e. someone else
   * moved the session. Cleared by refresh(). */
  get conflict(): boolean {
    return this.conflictFlag;
  }

  get atTerminalStage(): boolean {
    return this.body.state.stage === "Selected";
  }

  selectedJoke(): string | null {
    const { jokes, selected_index } = this.body.state;
    if (jokes === null || selected_index === null) return null;
    return jokes[selected_index]?.full_text ?? null;
  }

  /** The six panels: server state first, then the user's drafts and any
   * per-panel errors layered on top. */
  panels(): StagePanelModel[] {
    const panels = renderSession(this.body.state, this.editedAt);
    for (const panel of panels) {
      if (this.drafts.has(panel.stage)) panel.dirty = true;
      const error = this.errors.get(panel.stage);
      if (error !== undefined) panel.error = error;
    }
    return panels;
  }

  draft(stage: StageName): EditPayload | undefined {
    return this.drafts.get(stage);
  }

  setDraft(stage: StageName, payload: EditPayload): void {
    this.drafts.set(stage, payload);
  }

  clearDraft(stage: StageName): void {
    this.drafts.delete(stage);
    this.errors.delete(stage);
  }

  /** Re-fetch state and history, dropping nothing the user typed. */
  async refresh(): Promise<void> {
    this.body = await this.api.getSession(this.sessionId);
    const history = await this.api.getHistory(this.sessionId);
    this.editedAt = lastEditStage(history.events);
    this.conflictFlag = false;
  }

  /**
   * Submit the draft for one stage. Shape problems are reported inline
   * without any request. On acceptance the server's rewound state replaces
   * ours (downstream panels clear); on rejection the draft and the server's
   * message stay on the panel so the user can fix and retry.
   */
  async submitEdit(stage: StageName): Promise<EditResult> {
    if (this.readOnly) {
      return { ok: false, rejectedBy: "client", message: "session is read-only" };
    }
    const payload = this.drafts.get(stage);
    if (payload === undefined) {
      return { ok: false, rejectedBy: "client", message: "nothing to submit" };
    }
    const problem = validateEditPayload(stage, payload, this.body.state);
    if (problem !== null) {
      this.errors.set(stage, problem);
      return { ok: false, rejectedBy: "client", message: problem };
    }
    try {
      this.body = await this.api.editStage(this.sessionId, stage, payload);
    } catch (err) {
      if (!(err instanceof ApiError)) throw err;
      this.errors.set(stage, err.message);
      if (err.status === 409) {
        this.conflictFlag = true;
        return { ok: false, rejectedBy: "conflict", message: err.message };
      }
      const rejectedBy = err.kind === "NetworkError" ? "network" : "validation";
      return { ok: false, rejectedBy, message: err.message };
    }
    this.drafts.delete(stage);
    this.errors.delete(stage);
    this.editedAt = stage;
    return { ok: true };
  }

  /** One stage forward. Errors land on the panel of the stage that failed. */
  async advanceOne(): Promise<StageName> {
    if (this.readOnly) throw new ApiError("ReadOnly", null, "session is read-only", 0);
    try {
      this.body = await this.api.advance(this.sessionId);
    } catch (err) {
      this.noteStageError(err);
      throw err;
    }
    this.editedAt = null;
    return this.body.state.stage;
  }

  /**
   * Advance stage by stage until Selected, reporting progress after each
   * accepted step. Stops at the first failure, which stays attached to the
   * failing stage's panel.
   */
  async runAll(onProgress?: (update: ProgressUpdate) => void): Promise<void> {
    while (this.body.state.stage !== "Selected") {
      const reached = await this.advanceOne();
      onProgress?.({ stage: reached, done: reached === "Selected" });
    }
  }

  private noteStageError(err: unknown): void {
    if (!(err instanceof ApiError)) return;
    if (err.status === 409) this.conflictFlag = true;
    const stage =
      err.stage !== null && STAGE_NAMES.includes(err.stage as StageName)
        ? (err.stage as StageName)
        : this.nextPendingStage();
    this.errors.set(stage, err.message);
  }

  private nextPendingStage(): StageName {
    const i = stageOrder(this.body.state.stage);
    return STAGE_NAMES[Math.min(i + 1, STAGE_NAMES.length - 1)] as StageName;
  }
}
