"""Conversational joke improvisation as an editable staged pipeline.

Give it one sentence; it picks two handles from the sentence, free-
associates on each, builds punch-line candidates by three mechanisms
(local phonetic wordplay plus two model-driven ones), wraps each punch
line in an angle, and picks the funniest. Every stage's output can be
inspected, edited, and re-run.
"""
from .backend import (
    AuthError,
    BackendError,
    CompletionRequest,
    CompletionResult,
    DecodingParams,
    LiveBackend,
    PromptCatalog,
    PromptTemplate,
    RateLimited,
    ScriptExhausted,
    ScriptedMockBackend,
    TransportError,
    live_backend_from_env,
    load_catalog,
    render_template,
    scripted_mock,
)
from .model import (
    Association,
    HandleKind,
    JokeCandidate,
    Mechanism,
    PipelineState,
    PunchLineCandidate,
    PunchLinePositionViolated,
    Stage,
    StageOrderViolation,
    Topic,
    TopicHandle,
    advance_stage,
    assemble_full_text,
    canonical_json,
    initial_state,
    invalidate_from,
    punch_line_in_tail,
    state_from_dict,
    state_to_dict,
)
from .pipeline import (
    EmptyAssociationList,
    EmptyTopic,
    HandleNotInTopic,
    HandleParseError,
    InvalidPayload,
    NoCandidates,
    NoJokes,
    PipelineConfig,
    PipelineError,
    StageFailed,
    advance_one,
    create_candidates,
    edit_stage,
    generate_angles,
    generate_associations,
    run_pipeline,
    select_funniest,
    select_topic_handles,
    set_topic,
)
from .wordplay import (
    PhoneticCode,
    WordplayPair,
    best_wordplay_pair,
    build_pun_phrase,
    phonetic_distance,
    phonetic_encode,
)

__version__ = "0.1.0"

__all__ = [
    "AuthError", "BackendError", "CompletionRequest", "CompletionResult",
    "DecodingParams", "LiveBackend", "PromptCatalog", "PromptTemplate",
    "RateLimited", "ScriptExhausted", "ScriptedMockBackend", "TransportError",
    "live_backend_from_env", "load_catalog", "render_template", "scripted_mock",
    "Association", "HandleKind", "JokeCandidate", "Mechanism", "PipelineState",
    "PunchLineCandidate", "PunchLinePositionViolated", "Stage",
    "StageOrderViolation", "Topic", "TopicHandle", "advance_stage",
    "assemble_full_text", "canonical_json", "initial_state", "invalidate_from",
    "punch_line_in_tail", "state_from_dict", "state_to_dict",
    "EmptyAssociationList", "EmptyTopic", "HandleNotInTopic", "HandleParseError",
    "InvalidPayload", "NoCandidates", "NoJokes", "PipelineConfig",
    "PipelineError", "StageFailed", "advance_one", "create_candidates",
    "edit_stage", "generate_angles", "generate_associations", "run_pipeline",
    "select_funniest", "select_topic_handles", "set_topic",
    "PhoneticCode", "WordplayPair", "best_wordplay_pair", "build_pun_phrase",
    "phonetic_distance", "phonetic_encode",
    "__version__",
]
