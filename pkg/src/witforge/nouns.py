"""Noun counting for the eligibility filter.

Two interchangeable annotators: a deterministic rule-based one (named-entity
runs plus a bundled common-noun lexicon) used by tests, and a model-backed
one for callers who want real tagging. Both only need to answer one
question: how many nouns does this sentence contain?
"""
from __future__ import annotations

import re
from functools import lru_cache
from pathlib import Path
from typing import Optional, Protocol

from .backend import CompletionRequest, DecodingParams, PromptTemplate, render_template

_EDGE_PUNCT = "\"'`.,;:!?()[]{}-"

_NOUN_COUNT_TEMPLATE = PromptTemplate(
    id="noun_count",
    body=(
        "Count how many nouns, noun phrases, and named entities the following "
        "sentence contains. Reply with only a number.\n\nSentence: {sentence}"
    ),
    decoding=DecodingParams(temperature=0.0, top_p=1.0, max_tokens=8),
)


class AnnotatorError(Exception):
    """The annotator could not produce a noun count."""


class NounAnnotator(Protocol):
    def count_nouns(self, sentence: str) -> int: ...


@lru_cache(maxsize=1)
def _default_lexicon() -> frozenset[str]:
    path = Path(__file__).parent / "data" / "common_nouns.txt"
    return frozenset(
        line.strip().lower() for line in path.read_text(encoding="utf-8").splitlines()
        if line.strip()
    )


def _singular_forms(token: str) -> tuple[str, ...]:
    forms = [token]
    if token.endswith("ies") and len(token) > 3:
        forms.append(token[:-3] + "y")
    if token.endswith("es") and len(token) > 2:
        forms.append(token[:-2])
    if token.endswith("s") and len(token) > 1:
        forms.append(token[:-1])
    return tuple(forms)


class RuleBasedNounAnnotator:
    """Counts capitalized non-initial runs as one named entity each, plus
    every token whose singular form sits in a common-noun lexicon."""

    def __init__(self, lexicon: Optional[frozenset[str]] = None) -> None:
        self.lexicon = lexicon if lexicon is not None else _default_lexicon()

    def count_nouns(self, sentence: str) -> int:
        raw_tokens = sentence.split()
        count = 0
        in_run = False
        entity_tokens: set[int] = set()
        for i, raw in enumerate(raw_tokens):
            token = raw.strip(_EDGE_PUNCT)
            is_entity = (
                i > 0
                and len(token) > 1
                and token[0].isupper()
                and token != "I"
            )
            if is_entity:
                if not in_run:
                    count += 1
                entity_tokens.add(i)
                # trailing punctuation closes the entity run
                in_run = raw[-1] not in _EDGE_PUNCT
            else:
                in_run = False
        for i, raw in enumerate(raw_tokens):
            if i in entity_tokens:
                continue
            token = raw.strip(_EDGE_PUNCT).lower()
            if any(form in self.lexicon for form in _singular_forms(token)):
                count += 1
        return count


class LlmNounAnnotator:
    """Asks a completion backend to count; parses the first integer."""

    def __init__(self, backend) -> None:
        self.backend = backend

    def count_nouns(self, sentence: str) -> int:
        prompt = render_template(_NOUN_COUNT_TEMPLATE, {"sentence": sentence})
        result = self.backend.complete(CompletionRequest(
            prompt=prompt,
            template_id=_NOUN_COUNT_TEMPLATE.id,
            decoding=_NOUN_COUNT_TEMPLATE.decoding,
        ))
        match = re.search(r"\d+", result.text)
        if match is None:
            raise AnnotatorError(f"no number in annotator reply {result.text!r}")
        return int(match.group())
