/** Wire types for the /v1 session API. Field names and nesting mirror the
 * server's canonical JSON form exactly; nothing here is client-invented. */

export type StageName =
  | "TopicSet"
  | "HandlesSelected"
  | "AssociationsGenerated"
  | "CandidatesCreated"
  | "JokesGenerated"
  | "Selected";

export const STAGE_NAMES: readonly StageName[] = [
  "TopicSet",
  "HandlesSelected",
  "AssociationsGenerated",
  "CandidatesCreated",
  "JokesGenerated",
  "Selected",
];

export function stageOrder(stage: StageName): number {
  const i = STAGE_NAMES.indexOf(stage);
  if (i < 0) throw new Error(`unknown stage ${stage}`);
  return i;
}

export type HandleKind = "noun" | "noun_phrase" | "named_entity";

export type MechanismName = "wordplay" | "commonsense" | "third";

export interface TopicData {
  text: string;
  word_count: number;
}

export interface HandleData {
  surface: string;
  kind: HandleKind;
}

export interface AssociationData {
  text: string;
  handle_index: number;
}

export interface CandidateData {
  text: string;
  mechanism: MechanismName;
  sources: AssociationData[];
}

export interface JokeData {
  topic: TopicData;
  angle: string;
  punch_line: CandidateData;
  full_text: string;
}

export interface StateData {
  stage: StageName;
  topic: TopicData;
  handles: HandleData[] | null;
  associations: AssociationData[][] | null;
  candidates: CandidateData[] | null;
  jokes: JokeData[] | null;
  selected_index: number | null;
}

export interface SessionBody {
  session_id: string;
  created_at: string;
  state: StateData;
}

export interface HistoryEvent {
  ts: string;
  kind: "create" | "advance" | "edit";
  stage: string;
  digest: string;
}

export interface HistoryBody {
  session_id: string;
  events: HistoryEvent[];
}

export interface HealthBody {
  status: string;
  backend: string;
}

/** Shape of the PATCH body's `payload` field, per stage. Handles and
 * associations take the plain-string shorthand the server also accepts. */
export type EditPayload =
  | string // TopicSet
  | string[] // HandlesSelected
  | string[][] // AssociationsGenerated
  | CandidateData[] // CandidatesCreated
  | JokeData[] // JokesGenerated
  | number; // Selected

export interface ApiErrorBody {
  error: {
    kind: string;
    stage: string | null;
    message: string;
  };
}
