import type { StageName, StateData } from "../../src/types.js";
import { STAGE_NAMES, stageOrder } from "../../src/types.js";

/** The fully selected golden session exactly as GET /v1/sessions returns it. */
export const GOLDEN_SELECTED: StateData = {
  stage: "Selected",
  topic: {
    text: "Authorities caught two pigs that were wandering around loose in San Antonio, Texas.",
    word_count: 13,
  },
  handles: [
    { surface: "pigs", kind: "noun" },
    { surface: "San Antonio", kind: "named_entity" },
  ],
  associations: [
    [
      { text: "bacon", handle_index: 0 },
      { text: "pork chops", handle_index: 0 },
      { text: "ham", handle_index: 0 },
      { text: "sausage", handle_index: 0 },
    ],
    [
      { text: "The Alamo", handle_index: 1 },
      { text: "River Walk", handle_index: 1 },
      { text: "Texas Longhorns", handle_index: 1 },
      { text: "Whataburger", handle_index: 1 },
    ],
  ],
  candidates: [
    {
      text: "Alamo Sausage",
      mechanism: "commonsense",
      sources: [
        { text: "sausage", handle_index: 0 },
        { text: "The Alamo", handle_index: 1 },
      ],
    },
    { text: "Boarhood Watch", mechanism: "third", sources: [] },
  ],
  jokes: [
    {
      topic: {
        text: "Authorities caught two pigs that were wandering around loose in San Antonio, Texas.",
        word_count: 13,
      },
      angle: "They were taken to the Alamo Sausage Company.",
      punch_line: {
        text: "Alamo Sausage",
        mechanism: "commonsense",
        sources: [
          { text: "sausage", handle_index: 0 },
          { text: "The Alamo", handle_index: 1 },
        ],
      },
      full_text: "They were taken to the Alamo Sausage Company.",
    },
    {
      topic: {
        text: "Authorities caught two pigs that were wandering around loose in San Antonio, Texas.",
        word_count: 13,
      },
      angle: "The loose pigs have started their own Boarhood Watch.",
      punch_line: { text: "Boarhood Watch", mechanism: "third", sources: [] },
      full_text: "The loose pigs have started their own Boarhood Watch.",
    },
  ],
  selected_index: 0,
};

/** The same session truncated to an earlier stage (later fields nulled). */
export function goldenAt(stage: StageName): StateData {
  const keep = stageOrder(stage);
  const state: StateData = structuredClone(GOLDEN_SELECTED);
  state.stage = stage;
  const fields: Record<StageName, keyof StateData> = {
    TopicSet: "topic",
    HandlesSelected: "handles",
    AssociationsGenerated: "associations",
    CandidatesCreated: "candidates",
    JokesGenerated: "jokes",
    Selected: "selected_index",
  };
  for (const name of STAGE_NAMES) {
    if (stageOrder(name) > keep) {
      (state as unknown as Record<string, unknown>)[fields[name]] = null;
    }
  }
  return state;
}
