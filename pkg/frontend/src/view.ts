import type { SessionController } from "./controller.js";
import { mechanismLabel, panelTitle, type StagePanelModel } from "./panels.js";
import type {
  AssociationData,
  CandidateData,
  EditPayload,
  HandleData,
  JokeData,
  StageName,
  TopicData,
} from "./types.js";
import { STAGE_NAMES } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function chip(text: string, className: string): HTMLElement {
  return el("span", `chip ${className}`, text);
}

/**
 * Renders one session as six stage panels and keeps the DOM a pure function
 * of the controller: every mutation goes controller-first, then render()
 * rebuilds from whatever the server acknowledged. Text typed into inputs
 * lives in controller drafts, never in detached DOM state.
 */
export class SessionView {
  private readonly controller: SessionController;
  private readonly root: HTMLElement;
  private progress = new Set<StageName>();

  constructor(controller: SessionController, root: HTMLElement) {
    this.controller = controller;
    this.root = root;
  }

  render(): void {
    this.root.textContent = "";
    this.root.append(this.toolbar());
    if (this.controller.conflict) this.root.append(this.conflictBanner());
    const panels = el("div", "panels");
    for (const panel of this.controller.panels()) {
      panels.append(this.panelSection(panel));
    }
    this.root.append(panels);
  }

  // --- chrome ---------------------------------------------------------------

  private toolbar(): HTMLElement {
    const bar = el("header", "toolbar");
    bar.append(el("span", "session-id", `session ${this.controller.sessionId}`));

    const progress = el("span", "progress");
    for (const stage of STAGE_NAMES) {
      progress.append(chip(stage, this.progress.has(stage) ? "chip-done" : "chip-todo"));
    }
    bar.append(progress);

    const advance = el("button", "advance", "Advance");
    advance.disabled = this.controller.atTerminalStage || this.controller.readOnly;
    advance.onclick = () => void this.advanceOne();
    bar.append(advance);

    const runAll = el("button", "run-all", "Run all");
    runAll.disabled = this.controller.atTerminalStage || this.controller.readOnly;
    runAll.onclick = () => void this.runAll();
    bar.append(runAll);

    const reload = el("button", "reload", "Reload");
    reload.onclick = () => void this.reload();
    bar.append(reload);

    if (this.controller.readOnly) bar.append(chip("read-only", "chip-readonly"));
    return bar;
  }

  private conflictBanner(): HTMLElement {
    const banner = el("div", "conflict");
    banner.append(
      el("span", undefined, "This session changed somewhere else. Reload to pick up the latest state; your drafts are kept."),
    );
    const reload = el("button", "reload", "Reload");
    reload.onclick = () => void this.reload();
    banner.append(reload);
    return banner;
  }

  private async advanceOne(): Promise<void> {
    try {
      const reached = await this.controller.advanceOne();
      this.progress.add(reached);
    } catch {
      // the controller pinned the message to the failing panel
    }
    this.render();
  }

  private async runAll(): Promise<void> {
    try {
      await this.controller.runAll(({ stage }) => this.progress.add(stage));
    } catch {
      // surfaced on the failing panel
    }
    this.render();
  }

  private async reload(): Promise<void> {
    await this.controller.refresh();
    this.render();
  }

  private async save(stage: StageName): Promise<void> {
    await this.controller.submitEdit(stage);
    this.render();
  }

  // --- panels ---------------------------------------------------------------

  private panelSection(panel: StagePanelModel): HTMLElement {
    const section = el("section", `panel panel-${panel.status}`);
    section.dataset.stage = panel.stage;

    const head = el("div", "panel-head");
    head.append(el("h2", undefined, panelTitle(panel.stage)));
    head.append(chip(panel.status, `chip-${panel.status}`));
    if (panel.dirty) head.append(chip("unsaved", "chip-dirty"));
    if (panel.downstreamInvalidated) {
      section.classList.add("invalidated");
      head.append(chip("cleared by edit", "chip-invalidated"));
    }
    section.append(head);

    const body = el("div", "panel-body");
    if (panel.status === "pending") {
      body.append(el("p", "pending-note", "pending"));
    } else {
      this.fillPanelBody(body, panel);
    }
    section.append(body);

    if (panel.error) section.append(el("p", "error", panel.error));
    return section;
  }

  private fillPanelBody(body: HTMLElement, panel: StagePanelModel): void {
    switch (panel.stage) {
      case "TopicSet":
        return this.topicEditor(body, panel.payload as TopicData);
      case "HandlesSelected":
        return this.handlesEditor(body, panel.payload as HandleData[]);
      case "AssociationsGenerated":
        return this.associationsEditor(body, panel.payload as AssociationData[][]);
      case "CandidatesCreated":
        return this.candidatesEditor(body, panel.payload as CandidateData[]);
      case "JokesGenerated":
        return this.jokesEditor(body, panel.payload as JokeData[]);
      case "Selected":
        return this.selectionEditor(body, panel.payload as number);
    }
  }

  private saveButton(stage: StageName): HTMLButtonElement {
    const button = el("button", "save", "Save");
    button.disabled = this.controller.readOnly;
    button.onclick = () => void this.save(stage);
    return button;
  }

  private draftOr(stage: StageName, fallback: EditPayload): EditPayload {
    return this.controller.draft(stage) ?? fallback;
  }

  private topicEditor(body: HTMLElement, topic: TopicData): void {
    const input = el("input", "topic-text");
    input.value = this.draftOr("TopicSet", topic.text) as string;
    input.oninput = () => this.controller.setDraft("TopicSet", input.value);
    body.append(input, el("span", "word-count", `${topic.word_count} words`));
    body.append(this.saveButton("TopicSet"));
  }

  private handlesEditor(body: HTMLElement, handles: HandleData[]): void {
    const current = this.draftOr(
      "HandlesSelected",
      handles.map((h) => h.surface),
    ) as string[];
    const inputs: HTMLInputElement[] = [];
    handles.forEach((handle, i) => {
      const row = el("div", "handle-row");
      const input = el("input", "handle-surface");
      input.value = current[i] ?? "";
      input.oninput = () =>
        this.controller.setDraft(
          "HandlesSelected",
          inputs.map((node) => node.value.trim()),
        );
      inputs.push(input);
      row.append(input, chip(handle.kind, "chip-kind"));
      body.append(row);
    });
    body.append(this.saveButton("HandlesSelected"));
  }

  private associationsEditor(body: HTMLElement, lists: AssociationData[][]): void {
    const current = this.draftOr(
      "AssociationsGenerated",
      lists.map((list) => list.map((a) => a.text)),
    ) as string[][];
    const areas: HTMLTextAreaElement[] = [];
    lists.forEach((_, i) => {
      const column = el("div", "association-list");
      column.append(el("h3", undefined, `handle ${i + 1}`));
      const area = el("textarea", "association-items");
      area.value = (current[i] ?? []).join("\n");
      // one association per line
      area.oninput = () =>
        this.controller.setDraft(
          "AssociationsGenerated",
          areas.map((node) =>
            node.value
              .split("\n")
              .map((line) => line.trim())
              .filter((line) => line.length > 0),
          ),
        );
      areas.push(area);
      column.append(area);
      body.append(column);
    });
    body.append(this.saveButton("AssociationsGenerated"));
  }

  private candidatesEditor(body: HTMLElement, candidates: CandidateData[]): void {
    const row = el("div", "candidates-row");
    const draft = this.controller.draft("CandidatesCreated") as CandidateData[] | undefined;
    const inputs: HTMLInputElement[] = [];
    candidates.forEach((cand, i) => {
      const card = el("div", "candidate-card");
      card.append(chip(mechanismLabel(cand.mechanism), `badge badge-${cand.mechanism}`));
      const input = el("input", "candidate-text");
      input.value = draft?.[i]?.text ?? cand.text;
      input.oninput = () =>
        this.controller.setDraft(
          "CandidatesCreated",
          candidates.map((orig, j) => ({ ...orig, text: (inputs[j]?.value ?? orig.text).trim() })),
        );
      inputs.push(input);
      card.append(input);
      if (cand.sources.length > 0) {
        card.append(
          el("p", "sources", `from: ${cand.sources.map((s) => s.text).join(", ")}`),
        );
      }
      row.append(card);
    });
    body.append(row, this.saveButton("CandidatesCreated"));
  }

  private jokesEditor(body: HTMLElement, jokes: JokeData[]): void {
    const draft = this.controller.draft("JokesGenerated") as JokeData[] | undefined;
    const angles: HTMLInputElement[] = [];
    const fulls: HTMLTextAreaElement[] = [];
    const setDraft = () =>
      this.controller.setDraft(
        "JokesGenerated",
        jokes.map((orig, j) => ({
          ...orig,
          angle: (angles[j]?.value ?? orig.angle).trim(),
          full_text: (fulls[j]?.value ?? orig.full_text).trim(),
        })),
      );
    jokes.forEach((joke, i) => {
      const card = el("div", "joke-card");
      card.append(
        chip(mechanismLabel(joke.punch_line.mechanism), `badge badge-${joke.punch_line.mechanism}`),
      );
      const angle = el("input", "joke-angle");
      angle.value = draft?.[i]?.angle ?? joke.angle;
      angle.oninput = setDraft;
      angles.push(angle);
      const full = el("textarea", "joke-full");
      full.value = draft?.[i]?.full_text ?? joke.full_text;
      full.oninput = setDraft;
      fulls.push(full);
      card.append(angle, full);
      body.append(card);
    });
    body.append(this.saveButton("JokesGenerated"));
  }

  private selectionEditor(body: HTMLElement, selected: number): void {
    const jokes = this.controller.state.jokes ?? [];
    const chosen = (this.controller.draft("Selected") as number | undefined) ?? selected;
    jokes.forEach((joke, i) => {
      const row = el("label", i === selected ? "joke selected-joke" : "joke");
      const radio = el("input");
      radio.type = "radio";
      radio.name = "final-pick";
      radio.checked = i === chosen;
      radio.disabled = this.controller.readOnly;
      radio.onchange = () => this.controller.setDraft("Selected", i);
      row.append(radio, el("span", "joke-text", joke.full_text));
      body.append(row);
    });
    body.append(this.saveButton("Selected"));
  }
}
