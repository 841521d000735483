import type {
  AssociationData,
  CandidateData,
  EditPayload,
  HandleData,
  HistoryEvent,
  JokeData,
  StageName,
  StateData,
  TopicData,
} from "./types.js";
import { STAGE_NAMES, stageOrder } from "./types.js";

export type PanelStatus = "populated" | "pending";

/** Per-stage payload in the same shape the REST state carries it. */
export type PanelPayload =
  | TopicData
  | HandleData[]
  | AssociationData[][]
  | CandidateData[]
  | JokeData[]
  | number;

/** One editor panel, a direct mirror of one pipeline stage.
 *
 * `dirty` means the user typed an edit that no PATCH has acknowledged yet.
 * `downstreamInvalidated` marks panels the server cleared when an upstream
 * edit was accepted; the flag is derived from the session history (it is on
 * exactly when the latest event is an edit at an earlier stage), so a fresh
 * fetch of state plus history reproduces it.
 */
export interface StagePanelModel {
  stage: StageName;
  status: PanelStatus;
  payload: PanelPayload | null;
  dirty: boolean;
  downstreamInvalidated: boolean;
  error: string | null;
}

const PANEL_TITLES: Record<StageName, string> = {
  TopicSet: "1. Topic",
  HandlesSelected: "2. Topic handles",
  AssociationsGenerated: "3. Associations",
  CandidatesCreated: "4. Punch line candidates",
  JokesGenerated: "5. Jokes",
  Selected: "6. Final pick",
};

export function panelTitle(stage: StageName): string {
  return PANEL_TITLES[stage];
}

const MECHANISM_LABELS: Record<string, string> = {
  wordplay: "wordplay",
  commonsense: "common sense",
  third: "third",
};

export function mechanismLabel(mechanism: string): string {
  return MECHANISM_LABELS[mechanism] ?? mechanism;
}

function payloadAt(state: StateData, stage: StageName): PanelPayload | null {
  switch (stage) {
    case "TopicSet":
      return state.topic;
    case "HandlesSelected":
      return state.handles;
    case "AssociationsGenerated":
      return state.associations;
    case "CandidatesCreated":
      return state.candidates;
    case "JokesGenerated":
      return state.jokes;
    case "Selected":
      return state.selected_index;
  }
}

/** Stage of the latest accepted edit, but only while it is still the last
 * thing that happened; once the session advances again the cleared panels
 * are ordinary pending ones. */
export function lastEditStage(events: readonly HistoryEvent[]): StageName | null {
  const last = events[events.length - 1];
  if (!last || last.kind !== "edit") return null;
  return STAGE_NAMES.includes(last.stage as StageName) ? (last.stage as StageName) : null;
}

/**
 * Project a session state onto the six stage panels.
 *
 * Panels up to the current stage are populated with the server's data;
 * later ones are pending. The optional `editedAt` (see lastEditStage)
 * marks which pending panels were cleared by an accepted edit.
 */
export function renderSession(
  state: StateData,
  editedAt: StageName | null = null,
): StagePanelModel[] {
  const reached = stageOrder(state.stage);
  return STAGE_NAMES.map((stage) => {
    const populated = stageOrder(stage) <= reached;
    return {
      stage,
      status: populated ? "populated" : ("pending" as PanelStatus),
      payload: populated ? payloadAt(state, stage) : null,
      dirty: false,
      downstreamInvalidated:
        !populated && editedAt !== null && stageOrder(stage) > stageOrder(editedAt),
      error: null,
    };
  });
}

// --- client-side shape validation -------------------------------------------

const TAIL_FRACTION = 0.4;

function stripTerminal(text: string): string {
  return text.trim().replace(/[.!?]+$/, "").trimEnd();
}

/** Same tail rule the server enforces: the last occurrence of the punch
 * line must reach into the final 40% of the text. */
export function punchLineInTail(fullText: string, punchLine: string): boolean {
  const body = stripTerminal(fullText).toLowerCase();
  const punch = stripTerminal(punchLine).toLowerCase();
  if (!body || !punch) return false;
  const at = body.lastIndexOf(punch);
  if (at < 0) return false;
  return at + punch.length > (1 - TAIL_FRACTION) * body.length;
}

function isNonEmptyString(value: unknown): value is string {
  return typeof value === "string" && value.trim().length > 0;
}

/**
 * Structural check run before any PATCH is issued. Returns a message for
 * the panel, or null when the payload is worth sending. Semantic rules the
 * client cannot decide (handle really occurs in the topic, association is
 * not just its handle echoed back) stay with the server.
 */
export function validateEditPayload(
  stage: StageName,
  payload: EditPayload,
  state: StateData,
): string | null {
  switch (stage) {
    case "TopicSet": {
      if (typeof payload !== "string") return "the topic must be text";
      const text = payload.trim();
      if (!text || ![...text].some((ch) => ch.toLowerCase() !== ch.toUpperCase())) {
        return "the topic needs at least one letter";
      }
      return null;
    }
    case "HandlesSelected": {
      if (!Array.isArray(payload) || payload.length !== 2) {
        return `exactly two handles are required, got ${Array.isArray(payload) ? payload.length : 0}`;
      }
      if (!payload.every(isNonEmptyString)) return "handles must be non-empty text";
      return null;
    }
    case "AssociationsGenerated": {
      if (!Array.isArray(payload) || payload.length !== 2) {
        return "two association lists are required, one per handle";
      }
      for (const list of payload) {
        if (!Array.isArray(list) || list.length === 0) {
          return "each handle needs at least one association";
        }
        if (!list.every(isNonEmptyString)) return "associations must be non-empty text";
      }
      return null;
    }
    case "CandidatesCreated": {
      if (!Array.isArray(payload) || payload.length < 1 || payload.length > 3) {
        return "between one and three punch line candidates are required";
      }
      for (const cand of payload as CandidateData[]) {
        if (!isNonEmptyString(cand.text)) return "every candidate needs text";
        if (!(cand.mechanism in MECHANISM_LABELS)) {
          return `unknown mechanism ${String(cand.mechanism)}`;
        }
        if (cand.sources.length > 2) return "a candidate draws on at most two associations";
      }
      return null;
    }
    case "JokesGenerated": {
      if (!Array.isArray(payload) || payload.length < 1 || payload.length > 3) {
        return "between one and three jokes are required";
      }
      for (const joke of payload as JokeData[]) {
        if (!isNonEmptyString(joke.angle) || !isNonEmptyString(joke.full_text)) {
          return "every joke needs an angle and its full text";
        }
        if (!punchLineInTail(joke.full_text, joke.punch_line.text)) {
          return `punch line ${JSON.stringify(joke.punch_line.text)} must land near the end`;
        }
      }
      return null;
    }
    case "Selected": {
      if (typeof payload !== "number" || !Number.isInteger(payload)) {
        return "the selection must be a joke index";
      }
      const count = state.jokes?.length ?? 0;
      if (payload < 0 || payload >= count) {
        return `selected index ${payload} points at no joke`;
      }
      return null;
    }
  }
}
