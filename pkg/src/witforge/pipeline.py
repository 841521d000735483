"""The staged joke pipeline.

Each stage is one function from state to state: pick two topic handles,
generate associations for each, create punch-line candidates by three
mechanisms, wrap candidates in angles, then pick the funniest. A person
can stop after any stage, edit its output, and resume; edits invalidate
everything downstream.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence

from .backend import (
    BackendError,
    CompletionRequest,
    PromptCatalog,
    load_catalog,
    render_template,
)
from .model import (
    Association,
    HandleKind,
    JokeCandidate,
    Mechanism,
    PipelineState,
    PunchLineCandidate,
    PunchLinePositionViolated,
    STAGES,
    Stage,
    StageOrderViolation,
    Topic,
    TopicHandle,
    advance_stage,
    assemble_full_text,
    initial_state,
    invalidate_from,
    next_stage,
)
from .wordplay import best_wordplay_pair, build_pun_phrase, strip_leading_article


class PipelineError(Exception):
    """Base for stage failures; carries the stage where it happened."""

    stage: Optional[str] = None

    def __str__(self) -> str:
        base = super().__str__()
        if self.stage:
            return f"[{self.stage}] {base}"
        return base


class EmptyTopic(PipelineError):
    pass


class HandleParseError(PipelineError):
    pass


class HandleNotInTopic(PipelineError):
    pass


class EmptyAssociationList(PipelineError):
    pass


class NoCandidates(PipelineError):
    pass


class NoJokes(PipelineError):
    pass


class InvalidPayload(PipelineError):
    pass


class StageFailed(PipelineError):
    """Wraps a backend failure with the stage that was running."""


@dataclass(frozen=True)
class PipelineConfig:
    associations_per_handle: int = 8
    wordplay_threshold: float = 0.4
    angle_retry_limit: int = 3
    third_mechanism: str = "handle_pairing"

    def __post_init__(self) -> None:
        if self.associations_per_handle < 1:
            raise ValueError("associations_per_handle must be >= 1")
        if not 0 <= self.wordplay_threshold <= 1:
            raise ValueError("wordplay_threshold must be within [0, 1]")
        if self.angle_retry_limit < 1:
            raise ValueError("angle_retry_limit must be >= 1")
        if self.third_mechanism not in THIRD_MECHANISMS:
            raise ValueError(f"unknown third mechanism {self.third_mechanism!r}")

    @classmethod
    def from_mapping(cls, data: Mapping) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_mapping(json.load(fh))


def split_items(text: str) -> list[str]:
    """Split a '; '-separated model response, trimming and dropping empties."""
    return [item.strip() for item in text.split(";") if item.strip()]


def _complete(backend, catalog: PromptCatalog, template_id: str, bindings: Mapping[str, str]):
    template = catalog.get(template_id)
    prompt = render_template(template, bindings)
    request = CompletionRequest(
        prompt=prompt, template_id=template_id, decoding=template.decoding
    )
    return backend.complete(request)


def set_topic(text: str) -> PipelineState:
    text = (text or "").strip()
    if not text or not any(ch.isalpha() for ch in text):
        raise EmptyTopic("a topic needs at least one word with a letter in it")
    return initial_state(Topic.from_text(text))


_EDGE_PUNCT = "\"'`.,;:!?()[]{}"


def classify_handle(surface: str) -> HandleKind:
    words = surface.split()
    if any(w[:1].isupper() for w in words):
        return HandleKind.named_entity
    if len(words) > 1:
        return HandleKind.noun_phrase
    return HandleKind.noun


def _verify_handle(surface: str, topic: Topic) -> str:
    cleaned = surface.strip(_EDGE_PUNCT + " ")
    if not cleaned or cleaned.lower() not in topic.text.lower():
        raise HandleNotInTopic(f"{surface!r} does not appear in the topic")
    return cleaned


def select_topic_handles(
    state: PipelineState, backend, catalog: Optional[PromptCatalog] = None
) -> PipelineState:
    catalog = catalog or load_catalog()
    result = _complete(backend, catalog, "handle_selection", {"sentence": state.topic.text})
    items = split_items(result.text)
    if len(items) != 2:
        raise HandleParseError(
            f"expected exactly two handles, got {len(items)} in {result.text!r}"
        )
    handles = tuple(
        TopicHandle(surface=_verify_handle(item, state.topic), kind=classify_handle(item))
        for item in items
    )
    return advance_stage(state, Stage.HandlesSelected, handles)


def _filter_associations(
    items: Sequence[str], handle: TopicHandle, topic: Topic, limit: int, handle_index: int
) -> list[Association]:
    seen: set[str] = set()
    kept: list[Association] = []
    topic_lower = topic.text.lower()
    for item in items:
        key = item.lower()
        if key in seen:
            continue
        seen.add(key)
        if key == handle.surface.lower():
            continue
        if key in topic_lower:
            continue
        kept.append(Association(text=item, handle_index=handle_index))
        if len(kept) == limit:
            break
    return kept


def generate_associations(
    state: PipelineState,
    backend,
    config: Optional[PipelineConfig] = None,
    catalog: Optional[PromptCatalog] = None,
) -> PipelineState:
    config = config or PipelineConfig()
    catalog = catalog or load_catalog()
    lists: list[tuple[Association, ...]] = []
    for idx, handle in enumerate(state.handles):
        result = _complete(
            backend,
            catalog,
            "association_generation",
            {"handle": handle.surface, "count": str(config.associations_per_handle)},
        )
        kept = _filter_associations(
            split_items(result.text), handle, state.topic,
            config.associations_per_handle, idx,
        )
        if not kept:
            raise EmptyAssociationList(
                f"no usable associations for handle {handle.surface!r}"
            )
        lists.append(tuple(kept))
    return advance_stage(state, Stage.AssociationsGenerated, tuple(lists))


def _clean_punch_text(text: str) -> str:
    line = text.strip().splitlines()[0].strip() if text.strip() else ""
    while len(line) > 1 and line[0] in "\"'" and line[-1] == line[0]:
        line = line[1:-1].strip()
    return line.rstrip(".!?").strip()


def _infer_sources(
    punch: str, lists: Sequence[Sequence[Association]]
) -> tuple[Association, ...]:
    lowered = punch.lower()
    found: list[Association] = []
    for lst in lists:
        for assoc in lst:
            if strip_leading_article(assoc.text).lower() in lowered:
                found.append(assoc)
                break
    return tuple(found)


ThirdMechanism = Callable[
    [PipelineState, object, PipelineConfig, PromptCatalog],
    Optional[PunchLineCandidate],
]


def _third_handle_pairing(
    state: PipelineState, backend, config: PipelineConfig, catalog: PromptCatalog
) -> Optional[PunchLineCandidate]:
    h0, h1 = state.handles
    result = _complete(
        backend, catalog, "third_mechanism",
        {"handle_a": h0.surface, "handle_b": h1.surface},
    )
    punch = _clean_punch_text(result.text)
    if not punch:
        return None
    return PunchLineCandidate(text=punch, mechanism=Mechanism.third, sources=())


THIRD_MECHANISMS: dict[str, ThirdMechanism] = {
    "handle_pairing": _third_handle_pairing,
}


def register_third_mechanism(name: str, fn: ThirdMechanism) -> None:
    THIRD_MECHANISMS[name] = fn


def create_candidates(
    state: PipelineState,
    backend,
    config: Optional[PipelineConfig] = None,
    catalog: Optional[PromptCatalog] = None,
) -> PipelineState:
    config = config or PipelineConfig()
    catalog = catalog or load_catalog()
    list_a, list_b = state.associations
    candidates: list[PunchLineCandidate] = []

    pair = best_wordplay_pair(list_a, list_b, config.wordplay_threshold)
    if pair is not None:
        phrase = build_pun_phrase(pair)
        if phrase.strip():
            candidates.append(PunchLineCandidate(
                text=phrase, mechanism=Mechanism.wordplay, sources=(pair.a, pair.b),
            ))

    result = _complete(
        backend, catalog, "commonsense_punchline",
        {
            "associations_a": "; ".join(a.text for a in list_a),
            "associations_b": "; ".join(b.text for b in list_b),
        },
    )
    punch = _clean_punch_text(result.text)
    if punch:
        candidates.append(PunchLineCandidate(
            text=punch,
            mechanism=Mechanism.commonsense,
            sources=_infer_sources(punch, (list_a, list_b)),
        ))

    third = THIRD_MECHANISMS[config.third_mechanism](state, backend, config, catalog)
    if third is not None:
        candidates.append(third)

    if not candidates:
        raise NoCandidates("every punch-line mechanism came up empty")
    return advance_stage(state, Stage.CandidatesCreated, tuple(candidates))


def generate_angles(
    state: PipelineState,
    backend,
    config: Optional[PipelineConfig] = None,
    catalog: Optional[PromptCatalog] = None,
) -> PipelineState:
    config = config or PipelineConfig()
    catalog = catalog or load_catalog()
    jokes: list[JokeCandidate] = []
    for candidate in state.candidates:
        for _ in range(config.angle_retry_limit):
            result = _complete(
                backend, catalog, "angle_generation",
                {"topic": state.topic.text, "punch_line": candidate.text},
            )
            angle = result.text.strip()
            if not angle:
                continue
            try:
                full = assemble_full_text(angle, candidate.text)
            except PunchLinePositionViolated:
                continue
            jokes.append(JokeCandidate(
                topic=state.topic, angle=angle, punch_line=candidate, full_text=full,
            ))
            break
    if not jokes:
        raise NoJokes("no candidate survived angle generation")
    return advance_stage(state, Stage.JokesGenerated, tuple(jokes))


_FALLBACK_ORDER = (Mechanism.commonsense, Mechanism.wordplay, Mechanism.third)


def _fallback_selection(jokes: Sequence[JokeCandidate]) -> int:
    for mechanism in _FALLBACK_ORDER:
        for i, joke in enumerate(jokes):
            if joke.punch_line.mechanism is mechanism:
                return i
    return 0


def select_funniest(
    state: PipelineState, backend, catalog: Optional[PromptCatalog] = None
) -> PipelineState:
    jokes = state.jokes
    if len(jokes) == 1:
        return advance_stage(state, Stage.Selected, 0)
    catalog = catalog or load_catalog()
    numbered = "\n".join(f"{i + 1}. {joke.full_text}" for i, joke in enumerate(jokes))
    index: Optional[int] = None
    try:
        result = _complete(
            backend, catalog, "candidate_selection",
            {"jokes": numbered, "count": str(len(jokes))},
        )
        for token in re.findall(r"\d+", result.text):
            value = int(token)
            if 1 <= value <= len(jokes):
                index = value - 1
                break
    except BackendError:
        index = None
    if index is None:
        index = _fallback_selection(jokes)
    return advance_stage(state, Stage.Selected, index)


def advance_one(
    state: PipelineState,
    backend,
    config: Optional[PipelineConfig] = None,
    catalog: Optional[PromptCatalog] = None,
) -> PipelineState:
    """Run whichever stage comes next for this state."""
    target = {
        Stage.TopicSet: lambda: select_topic_handles(state, backend, catalog),
        Stage.HandlesSelected: lambda: generate_associations(state, backend, config, catalog),
        Stage.AssociationsGenerated: lambda: create_candidates(state, backend, config, catalog),
        Stage.CandidatesCreated: lambda: generate_angles(state, backend, config, catalog),
        Stage.JokesGenerated: lambda: select_funniest(state, backend, catalog),
    }.get(state.stage)
    if target is None:
        raise StageOrderViolation("the pipeline is already complete")
    return _run_stage(next_stage(state.stage).value, target)


def _run_stage(stage_name: str, fn: Callable[[], PipelineState]) -> PipelineState:
    try:
        return fn()
    except PipelineError as exc:
        if exc.stage is None:
            exc.stage = stage_name
        raise
    except BackendError as exc:
        failure = StageFailed(str(exc))
        failure.stage = stage_name
        raise failure from exc


def run_pipeline(
    topic_text: str,
    backend,
    config: Optional[PipelineConfig] = None,
    catalog: Optional[PromptCatalog] = None,
) -> tuple[JokeCandidate, PipelineState]:
    """Run every stage and return the selected joke with the final state."""
    state = _run_stage(Stage.TopicSet.value, lambda: set_topic(topic_text))
    while state.stage is not Stage.Selected:
        state = advance_one(state, backend, config, catalog)
    return state.selected_joke(), state


# --- human edits ------------------------------------------------------------

def _validated_payload(state: PipelineState, stage: Stage, payload):
    topic = state.topic
    if stage is Stage.TopicSet:
        text = payload.text if isinstance(payload, Topic) else str(payload)
        return set_topic(text).topic
    if stage is Stage.HandlesSelected:
        items = list(payload)
        if len(items) != 2:
            raise InvalidPayload(f"exactly two handles are required, got {len(items)}")
        handles = []
        for item in items:
            if isinstance(item, TopicHandle):
                surface, kind = item.surface, item.kind
            else:
                surface, kind = str(item), classify_handle(str(item))
            handles.append(TopicHandle(surface=_verify_handle(surface, topic), kind=kind))
        return tuple(handles)
    if stage is Stage.AssociationsGenerated:
        lists = list(payload)
        if len(lists) != 2 or not all(lists):
            raise InvalidPayload("two non-empty association lists are required")
        out = []
        for idx, lst in enumerate(lists):
            row = []
            for item in lst:
                assoc = item if isinstance(item, Association) else Association(str(item), idx)
                if assoc.handle_index != idx:
                    raise InvalidPayload("association handle_index must match its list")
                if state.handles and assoc.text.lower() == state.handles[idx].surface.lower():
                    raise InvalidPayload(
                        f"association {assoc.text!r} merely repeats its handle"
                    )
                row.append(assoc)
            out.append(tuple(row))
        return tuple(out)
    if stage is Stage.CandidatesCreated:
        cands = tuple(payload)
        if not 1 <= len(cands) <= 3 or not all(isinstance(c, PunchLineCandidate) for c in cands):
            raise InvalidPayload("between one and three punch-line candidates are required")
        return cands
    if stage is Stage.JokesGenerated:
        jokes = tuple(payload)
        if not 1 <= len(jokes) <= 3 or not all(isinstance(j, JokeCandidate) for j in jokes):
            raise InvalidPayload("between one and three jokes are required")
        return jokes
    if stage is Stage.Selected:
        try:
            index = int(payload)
        except (TypeError, ValueError):
            raise InvalidPayload("the selection must be an integer index") from None
        if state.jokes is None or not 0 <= index < len(state.jokes):
            raise InvalidPayload(f"selected index {index} points at no joke")
        return index
    raise InvalidPayload(f"no editable payload for stage {stage}")


def edit_stage(state: PipelineState, stage: Stage, payload) -> PipelineState:
    """Replace one already-reached stage's data and drop everything after it."""
    stage = Stage(stage)
    if stage.order > state.stage.order:
        raise StageOrderViolation(
            f"cannot edit {stage.value}: state is only at {state.stage.value}"
        )
    try:
        validated = _validated_payload(state, stage, payload)
    except (ValueError, PunchLinePositionViolated) as exc:
        bad = InvalidPayload(str(exc))
        bad.stage = stage.value
        raise bad from exc
    if stage is Stage.TopicSet:
        return initial_state(validated)
    base = invalidate_from(state, STAGES[stage.order - 1])
    return advance_stage(base, stage, validated)
