"""Completion backends and the prompt catalog.

Every pipeline stage talks to a model through one narrow interface:
render a template, send a CompletionRequest, get text back. The scripted
mock replays canned responses per template id (deterministic, no network);
the live backend POSTs to any completions-compatible HTTP endpoint.
"""
from __future__ import annotations

import json
import os
import re
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence

TEMPLATE_IDS = (
    "handle_selection",
    "association_generation",
    "commonsense_punchline",
    "third_mechanism",
    "angle_generation",
    "candidate_selection",
    "gpt_lol",
)

# the baseline prompt is a fixed contract and must never drift
GPT_LOL_BODY = "You want to be funny. Respond to this: {sentence}"

ENV_API_KEY = "WITFORGE_API_KEY"
ENV_ENDPOINT = "WITFORGE_ENDPOINT"
ENV_MODEL = "WITFORGE_MODEL"
DEFAULT_ENDPOINT = "https://api.openai.com/v1/completions"

_PLACEHOLDER_RE = re.compile(r"\{([a-z][a-z0-9_]*)\}")


class BackendError(Exception):
    """Base for completion failures."""


class AuthError(BackendError):
    pass


class RateLimited(BackendError):
    pass


class TransportError(BackendError):
    pass


class ScriptExhausted(BackendError):
    def __init__(self, template_id: str) -> None:
        super().__init__(f"no scripted response left for template {template_id!r}")
        self.template_id = template_id


class MissingBinding(KeyError):
    def __init__(self, name: str) -> None:
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"template placeholder {self.name!r} has no binding"


class UnknownPlaceholder(KeyError):
    def __init__(self, name: str) -> None:
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"binding {self.name!r} matches no placeholder in the template"


@dataclass(frozen=True)
class DecodingParams:
    temperature: float = 0.7
    top_p: float = 1.0
    max_tokens: int = 128
    stop: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be a positive integer")
        if self.stop is not None:
            object.__setattr__(self, "stop", tuple(self.stop))


GPT_LOL_DECODING = DecodingParams(temperature=0.7, top_p=1.0, max_tokens=128)


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    body: str
    decoding: DecodingParams = field(default_factory=DecodingParams)

    def __post_init__(self) -> None:
        names = self.placeholders()
        if len(names) != len(set(names)):
            raise ValueError(f"template {self.id!r} repeats a placeholder name")

    def placeholders(self) -> tuple[str, ...]:
        return tuple(m.group(1) for m in _PLACEHOLDER_RE.finditer(self.body))


def render_template(template: PromptTemplate, bindings: Mapping[str, str]) -> str:
    """Substitute every placeholder; bindings must cover the placeholders
    exactly (no missing, no extra)."""
    names = set(template.placeholders())
    for key in bindings:
        if key not in names:
            raise UnknownPlaceholder(key)
    for name in names:
        if name not in bindings:
            raise MissingBinding(name)
    return _PLACEHOLDER_RE.sub(lambda m: str(bindings[m.group(1)]), template.body)


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    template_id: str
    model_id: str = ""
    decoding: DecodingParams = field(default_factory=DecodingParams)

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValueError("prompt must be non-empty")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    finish_reason: str = "stop"


class ScriptedMockBackend:
    """Replays canned responses per template id, in order, atomically.

    Never touches the network; draining a template's list raises
    ScriptExhausted. Identical scripts replay identical runs.
    """

    def __init__(self, script: Mapping[str, Sequence[str]]) -> None:
        self._queues: dict[str, deque[str]] = {
            key: deque(values) for key, values in script.items()
        }
        self._lock = threading.Lock()
        self.calls: list[CompletionRequest] = []

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedMockBackend":
        with open(path, encoding="utf-8") as fh:
            script = json.load(fh)
        return cls(script)

    def complete(self, request: CompletionRequest) -> CompletionResult:
        with self._lock:
            self.calls.append(request)
            queue = self._queues.get(request.template_id)
            if not queue:
                raise ScriptExhausted(request.template_id)
            text = queue.popleft()
        return CompletionResult(text=text.strip(), finish_reason="stop")

    def remaining(self, template_id: str) -> int:
        with self._lock:
            return len(self._queues.get(template_id, ()))


def scripted_mock(script: Mapping[str, Sequence[str]]) -> ScriptedMockBackend:
    return ScriptedMockBackend(script)


class LiveBackend:
    """POSTs completion requests to an HTTP endpoint with bearer auth.

    Retries rate limits and transport failures up to max_retries with
    exponential backoff; auth failures are terminal. The transport and
    sleep functions are injectable so tests never open sockets.
    """

    def __init__(
        self,
        endpoint: str,
        api_key: str,
        model_id: str = "",
        *,
        post: Optional[Callable] = None,
        sleep: Callable[[float], None] = time.sleep,
        max_retries: int = 3,
        backoff_base: float = 1.0,
        backoff_factor: float = 2.0,
        timeout: float = 60.0,
    ) -> None:
        if not api_key:
            raise AuthError(f"no API key; set {ENV_API_KEY}")
        self.endpoint = endpoint
        self.api_key = api_key
        self.model_id = model_id
        if post is None:
            import requests

            post = requests.post
        self._post = post
        self._sleep = sleep
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.backoff_factor = backoff_factor
        self.timeout = timeout

    def complete(self, request: CompletionRequest) -> CompletionResult:
        payload = {
            "model": request.model_id or self.model_id,
            "prompt": request.prompt,
            "temperature": request.decoding.temperature,
            "top_p": request.decoding.top_p,
            "max_tokens": request.decoding.max_tokens,
        }
        if request.decoding.stop:
            payload["stop"] = list(request.decoding.stop)
        headers = {
            "Authorization": f"Bearer {self.api_key}",
            "Content-Type": "application/json",
        }
        last_error: BackendError = TransportError("no attempt made")
        for attempt in range(self.max_retries + 1):
            if attempt:
                self._sleep(self.backoff_base * self.backoff_factor ** (attempt - 1))
            try:
                response = self._post(
                    self.endpoint, json=payload, headers=headers, timeout=self.timeout
                )
            except Exception as exc:
                last_error = TransportError(str(exc))
                continue
            status = getattr(response, "status_code", 0)
            if status in (401, 403):
                raise AuthError(f"endpoint rejected credentials (HTTP {status})")
            if status == 429:
                last_error = RateLimited("rate limited (HTTP 429)")
                continue
            if status >= 500:
                last_error = TransportError(f"server error (HTTP {status})")
                continue
            if status != 200:
                raise TransportError(f"unexpected HTTP {status}")
            return _parse_completion(response)
        raise last_error


def _parse_completion(response) -> CompletionResult:
    try:
        data = response.json()
        choice = data["choices"][0]
        text = choice.get("text") or ""
        finish = choice.get("finish_reason") or "other"
    except Exception as exc:
        raise TransportError(f"malformed completion response: {exc}") from exc
    text = text.strip()
    if not text:
        raise TransportError("endpoint returned an empty completion")
    if finish not in ("stop", "length"):
        finish = "other"
    return CompletionResult(text=text, finish_reason=finish)


def live_backend_from_env(model_id: str = "", **kwargs) -> LiveBackend:
    return LiveBackend(
        endpoint=os.environ.get(ENV_ENDPOINT, DEFAULT_ENDPOINT),
        api_key=os.environ.get(ENV_API_KEY, ""),
        model_id=model_id or os.environ.get(ENV_MODEL, ""),
        **kwargs,
    )


# --- prompt catalog ---------------------------------------------------------

_DEFAULT_DECODING = {
    "handle_selection": DecodingParams(temperature=0.7, top_p=1.0, max_tokens=64),
    "association_generation": DecodingParams(temperature=0.7, top_p=1.0, max_tokens=128),
    "commonsense_punchline": DecodingParams(temperature=0.7, top_p=1.0, max_tokens=64),
    "third_mechanism": DecodingParams(temperature=0.7, top_p=1.0, max_tokens=64),
    "angle_generation": DecodingParams(temperature=0.7, top_p=1.0, max_tokens=128),
    # selection is a judgement, decoded greedily
    "candidate_selection": DecodingParams(temperature=0.0, top_p=1.0, max_tokens=8),
    "gpt_lol": GPT_LOL_DECODING,
}


@dataclass(frozen=True)
class PromptCatalog:
    templates: Mapping[str, PromptTemplate]

    def get(self, template_id: str) -> PromptTemplate:
        try:
            return self.templates[template_id]
        except KeyError:
            raise KeyError(f"unknown template id {template_id!r}") from None


def load_catalog(
    directory: str | Path | None = None,
    decoding_overrides: Mapping[str, DecodingParams] | None = None,
) -> PromptCatalog:
    """Load one UTF-8 prompt file per template id. Files in `directory`
    override the packaged defaults; a trailing newline is stripped. The
    gpt_lol template is pinned: its body and decoding cannot be altered."""
    packaged = Path(__file__).parent / "prompts"
    overrides = dict(decoding_overrides or {})
    if "gpt_lol" in overrides and overrides["gpt_lol"] != GPT_LOL_DECODING:
        raise ValueError("the gpt_lol decoding parameters are fixed")
    templates = {}
    for template_id in TEMPLATE_IDS:
        path = packaged / f"{template_id}.txt"
        if directory is not None:
            custom = Path(directory) / f"{template_id}.txt"
            if custom.exists():
                path = custom
        body = path.read_text(encoding="utf-8").rstrip("\n")
        if template_id == "gpt_lol" and body != GPT_LOL_BODY:
            raise ValueError("the gpt_lol prompt body is fixed and cannot be overridden")
        decoding = overrides.get(template_id, _DEFAULT_DECODING[template_id])
        if template_id == "gpt_lol":
            decoding = GPT_LOL_DECODING
        templates[template_id] = PromptTemplate(id=template_id, body=body, decoding=decoding)
    return PromptCatalog(templates=templates)
