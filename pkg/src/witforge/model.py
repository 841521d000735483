"""Core joke-pipeline state: the three joke parts, intermediate products,
and an immutable stage machine whose data presence is monotone in stage.

A joke here is topic + angle + punch line; the punch line must land in the
tail of the assembled text. Intermediate products (handles, associations,
candidates, jokes) are first-class values so a person can inspect and edit
any of them between stages.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from typing import Any, Optional, Sequence

# how much of the text's tail the punch line must reach into
PUNCH_TAIL_FRACTION = 0.4

_TERMINAL_PUNCTUATION = ".!?"


class StageOrderViolation(Exception):
    """Raised when a stage transition skips ahead or walks backward."""


class PunchLinePositionViolated(Exception):
    """Raised when a punch line does not land in the tail of the text."""


class Stage(str, enum.Enum):
    TopicSet = "TopicSet"
    HandlesSelected = "HandlesSelected"
    AssociationsGenerated = "AssociationsGenerated"
    CandidatesCreated = "CandidatesCreated"
    JokesGenerated = "JokesGenerated"
    Selected = "Selected"

    @property
    def order(self) -> int:
        return _STAGE_ORDER[self]


_STAGE_ORDER = {s: i for i, s in enumerate(Stage)}
STAGES = tuple(Stage)


def next_stage(stage: Stage) -> Optional[Stage]:
    i = stage.order + 1
    return STAGES[i] if i < len(STAGES) else None


class HandleKind(str, enum.Enum):
    noun = "noun"
    noun_phrase = "noun_phrase"
    named_entity = "named_entity"


class Mechanism(str, enum.Enum):
    wordplay = "wordplay"
    commonsense = "commonsense"
    third = "third"


@dataclass(frozen=True)
class Topic:
    text: str
    word_count: int

    def __post_init__(self) -> None:
        if not self.text or not any(ch.isalpha() for ch in self.text):
            raise ValueError("topic text must be non-empty and contain a letter")
        if self.word_count != len(self.text.split()):
            raise ValueError("word_count must match whitespace tokenization")

    @classmethod
    def from_text(cls, text: str) -> "Topic":
        text = text.strip()
        return cls(text=text, word_count=len(text.split()))


@dataclass(frozen=True)
class TopicHandle:
    surface: str
    kind: HandleKind

    def __post_init__(self) -> None:
        if not self.surface.strip():
            raise ValueError("handle surface must be non-empty")
        object.__setattr__(self, "kind", HandleKind(self.kind))


@dataclass(frozen=True)
class Association:
    text: str
    handle_index: int

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("association text must be non-empty")
        if self.handle_index not in (0, 1):
            raise ValueError("handle_index must be 0 or 1")


@dataclass(frozen=True)
class PunchLineCandidate:
    text: str
    mechanism: Mechanism
    sources: tuple[Association, ...] = ()

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("punch line text must be non-empty")
        object.__setattr__(self, "mechanism", Mechanism(self.mechanism))
        object.__setattr__(self, "sources", tuple(self.sources))
        if len(self.sources) > 2:
            raise ValueError("a punch line draws on at most two associations")


def _strip_terminal(text: str) -> str:
    return text.strip().rstrip(_TERMINAL_PUNCTUATION).rstrip()


def punch_line_in_tail(full_text: str, punch_line: str) -> bool:
    """True when the last case-insensitive occurrence of the punch line
    (terminal punctuation ignored on both strings) extends into the final
    PUNCH_TAIL_FRACTION of the text."""
    body = _strip_terminal(full_text).lower()
    punch = _strip_terminal(punch_line).lower()
    if not body or not punch:
        return False
    at = body.rfind(punch)
    if at < 0:
        return False
    end = at + len(punch)
    return end > (1.0 - PUNCH_TAIL_FRACTION) * len(body)


def assemble_full_text(angle: str, punch_line: str) -> str:
    """Append the punch line to the angle with a single space unless the
    angle already contains it, then enforce the tail-position rule."""
    angle = angle.strip()
    punch = punch_line.strip()
    if not angle or not punch:
        raise ValueError("angle and punch line must be non-empty")
    if punch.lower() in angle.lower():
        full = angle
    else:
        full = f"{angle} {punch}"
    if not punch_line_in_tail(full, punch):
        raise PunchLinePositionViolated(
            f"punch line {punch!r} lands before the final "
            f"{int(PUNCH_TAIL_FRACTION * 100)}% of {full!r}"
        )
    return full


@dataclass(frozen=True)
class JokeCandidate:
    topic: Topic
    angle: str
    punch_line: PunchLineCandidate
    full_text: str

    def __post_init__(self) -> None:
        if not self.angle.strip() or not self.full_text.strip():
            raise ValueError("angle and full_text must be non-empty")
        if not punch_line_in_tail(self.full_text, self.punch_line.text):
            raise PunchLinePositionViolated(
                f"punch line {self.punch_line.text!r} lands before the final "
                f"{int(PUNCH_TAIL_FRACTION * 100)}% of {self.full_text!r}"
            )


# stage -> name of the PipelineState field it populates
STAGE_FIELDS = {
    Stage.TopicSet: "topic",
    Stage.HandlesSelected: "handles",
    Stage.AssociationsGenerated: "associations",
    Stage.CandidatesCreated: "candidates",
    Stage.JokesGenerated: "jokes",
    Stage.Selected: "selected_index",
}


@dataclass(frozen=True)
class PipelineState:
    stage: Stage
    topic: Topic
    handles: Optional[tuple[TopicHandle, TopicHandle]] = None
    associations: Optional[tuple[tuple[Association, ...], tuple[Association, ...]]] = None
    candidates: Optional[tuple[PunchLineCandidate, ...]] = None
    jokes: Optional[tuple[JokeCandidate, ...]] = None
    selected_index: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "stage", Stage(self.stage))
        for stage, name in STAGE_FIELDS.items():
            if stage is Stage.TopicSet:
                continue
            present = getattr(self, name) is not None
            expected = self.stage.order >= stage.order
            if present != expected:
                raise ValueError(
                    f"{name} must be {'populated' if expected else 'absent'} at stage {self.stage.value}"
                )
        if self.handles is not None:
            handles = tuple(self.handles)
            if len(handles) != 2:
                raise ValueError("exactly two handles are kept")
            object.__setattr__(self, "handles", handles)
        if self.associations is not None:
            lists = tuple(tuple(lst) for lst in self.associations)
            if len(lists) != 2 or not all(lists):
                raise ValueError("two non-empty association lists are required")
            for idx, lst in enumerate(lists):
                for assoc in lst:
                    if assoc.handle_index != idx:
                        raise ValueError("association handle_index must match its list")
            object.__setattr__(self, "associations", lists)
        if self.candidates is not None:
            cands = tuple(self.candidates)
            if not 1 <= len(cands) <= 3:
                raise ValueError("between one and three candidates are kept")
            object.__setattr__(self, "candidates", cands)
        if self.jokes is not None:
            jokes = tuple(self.jokes)
            if not 1 <= len(jokes) <= 3:
                raise ValueError("between one and three jokes are kept")
            object.__setattr__(self, "jokes", jokes)
        if self.selected_index is not None:
            if self.jokes is None or not 0 <= self.selected_index < len(self.jokes):
                raise ValueError("selected_index must point at a generated joke")

    def selected_joke(self) -> Optional[JokeCandidate]:
        if self.selected_index is None or self.jokes is None:
            return None
        return self.jokes[self.selected_index]


def initial_state(topic: Topic) -> PipelineState:
    return PipelineState(stage=Stage.TopicSet, topic=topic)


def advance_stage(state: PipelineState, stage: Stage, payload: Any) -> PipelineState:
    """Move exactly one stage forward, installing the produced payload."""
    expected = next_stage(state.stage)
    if expected is None or stage is not expected:
        raise StageOrderViolation(
            f"cannot advance from {state.stage.value} to {Stage(stage).value}"
        )
    return replace(state, stage=stage, **{STAGE_FIELDS[stage]: _coerce_payload(stage, payload)})


def invalidate_from(state: PipelineState, stage: Stage) -> PipelineState:
    """Drop the data of every stage strictly after the given one."""
    stage = Stage(stage)
    if stage.order > state.stage.order:
        raise StageOrderViolation(
            f"cannot invalidate from {stage.value}: state is at {state.stage.value}"
        )
    cleared = {STAGE_FIELDS[s]: None for s in STAGES if s.order > stage.order}
    return replace(state, stage=stage, **cleared)


def _coerce_payload(stage: Stage, payload: Any) -> Any:
    if stage is Stage.HandlesSelected:
        handles = tuple(payload)
        if len(handles) != 2 or not all(isinstance(h, TopicHandle) for h in handles):
            raise ValueError("handles payload must be exactly two TopicHandle values")
        return handles
    if stage is Stage.AssociationsGenerated:
        lists = tuple(tuple(lst) for lst in payload)
        return lists
    if stage is Stage.CandidatesCreated:
        return tuple(payload)
    if stage is Stage.JokesGenerated:
        return tuple(payload)
    if stage is Stage.Selected:
        return int(payload)
    raise StageOrderViolation(f"no payload advances to {stage.value}")


# --- canonical JSON form ---------------------------------------------------

def topic_to_dict(topic: Topic) -> dict:
    return {"text": topic.text, "word_count": topic.word_count}


def handle_to_dict(handle: TopicHandle) -> dict:
    return {"surface": handle.surface, "kind": handle.kind.value}


def association_to_dict(assoc: Association) -> dict:
    return {"text": assoc.text, "handle_index": assoc.handle_index}


def candidate_to_dict(cand: PunchLineCandidate) -> dict:
    return {
        "text": cand.text,
        "mechanism": cand.mechanism.value,
        "sources": [association_to_dict(a) for a in cand.sources],
    }


def joke_to_dict(joke: JokeCandidate) -> dict:
    return {
        "topic": topic_to_dict(joke.topic),
        "angle": joke.angle,
        "punch_line": candidate_to_dict(joke.punch_line),
        "full_text": joke.full_text,
    }


def state_to_dict(state: PipelineState) -> dict:
    return {
        "stage": state.stage.value,
        "topic": topic_to_dict(state.topic),
        "handles": None if state.handles is None else [handle_to_dict(h) for h in state.handles],
        "associations": None if state.associations is None else [
            [association_to_dict(a) for a in lst] for lst in state.associations
        ],
        "candidates": None if state.candidates is None else [
            candidate_to_dict(c) for c in state.candidates
        ],
        "jokes": None if state.jokes is None else [joke_to_dict(j) for j in state.jokes],
        "selected_index": state.selected_index,
    }


def canonical_json(state: PipelineState) -> str:
    return json.dumps(state_to_dict(state), ensure_ascii=False, separators=(",", ":"))


def topic_from_dict(data: dict) -> Topic:
    return Topic(text=data["text"], word_count=data["word_count"])


def handle_from_dict(data: dict) -> TopicHandle:
    return TopicHandle(surface=data["surface"], kind=HandleKind(data["kind"]))


def association_from_dict(data: dict) -> Association:
    return Association(text=data["text"], handle_index=data["handle_index"])


def candidate_from_dict(data: dict) -> PunchLineCandidate:
    return PunchLineCandidate(
        text=data["text"],
        mechanism=Mechanism(data["mechanism"]),
        sources=tuple(association_from_dict(a) for a in data.get("sources", [])),
    )


def joke_from_dict(data: dict) -> JokeCandidate:
    return JokeCandidate(
        topic=topic_from_dict(data["topic"]),
        angle=data["angle"],
        punch_line=candidate_from_dict(data["punch_line"]),
        full_text=data["full_text"],
    )


def state_from_dict(data: dict) -> PipelineState:
    return PipelineState(
        stage=Stage(data["stage"]),
        topic=topic_from_dict(data["topic"]),
        handles=None if data.get("handles") is None else tuple(
            handle_from_dict(h) for h in data["handles"]
        ),
        associations=None if data.get("associations") is None else tuple(
            tuple(association_from_dict(a) for a in lst) for lst in data["associations"]
        ),
        candidates=None if data.get("candidates") is None else tuple(
            candidate_from_dict(c) for c in data["candidates"]
        ),
        jokes=None if data.get("jokes") is None else tuple(
            joke_from_dict(j) for j in data["jokes"]
        ),
        selected_index=data.get("selected_index"),
    )


def payload_to_jsonable(stage: Stage, payload: Any) -> Any:
    """Serialize one stage's payload for event logs and the wire."""
    stage = Stage(stage)
    if stage is Stage.TopicSet:
        return topic_to_dict(payload) if isinstance(payload, Topic) else {"text": str(payload)}
    if stage is Stage.HandlesSelected:
        return [handle_to_dict(h) for h in payload]
    if stage is Stage.AssociationsGenerated:
        return [[association_to_dict(a) for a in lst] for lst in payload]
    if stage is Stage.CandidatesCreated:
        return [candidate_to_dict(c) for c in payload]
    if stage is Stage.JokesGenerated:
        return [joke_to_dict(j) for j in payload]
    if stage is Stage.Selected:
        return int(payload)
    raise ValueError(f"no payload form for stage {stage}")


def payload_from_jsonable(stage: Stage, data: Any) -> Any:
    """Parse one stage's payload from its JSON form. Values may be the
    shorthand forms a person would type (plain strings, ints)."""
    stage = Stage(stage)
    if stage is Stage.TopicSet:
        if isinstance(data, str):
            return Topic.from_text(data)
        return topic_from_dict(data) if "word_count" in data else Topic.from_text(data["text"])
    if stage is Stage.HandlesSelected:
        return [h if isinstance(h, str) else handle_from_dict(h) for h in data]
    if stage is Stage.AssociationsGenerated:
        out = []
        for idx, lst in enumerate(data):
            out.append([
                Association(text=item, handle_index=idx) if isinstance(item, str)
                else association_from_dict(item)
                for item in lst
            ])
        return out
    if stage is Stage.CandidatesCreated:
        return [candidate_from_dict(c) for c in data]
    if stage is Stage.JokesGenerated:
        return [joke_from_dict(j) for j in data]
    if stage is Stage.Selected:
        return int(data)
    raise ValueError(f"no payload form for stage {stage}")
