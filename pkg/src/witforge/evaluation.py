"""Evaluation harness: dataset ingestion, eligibility filtering, input
standardization, a pinned one-prompt baseline, blind presentation order,
and rating aggregation into per-source summaries.

The protocol: sample short dialogue sentences, generate one response per
source, shuffle presentation, collect 1-4 ratings (1 not a joke .. 4 a
very good joke), then report each source's mean rating and the share of
ratings that called the response a joke (3 or 4).
"""
from __future__ import annotations

import csv
import json
import re
import string
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .backend import CompletionRequest, PromptCatalog, load_catalog, render_template
from .nouns import NounAnnotator, RuleBasedNounAnnotator
from .rng import Xoshiro256

MAX_INPUT_WORDS = 20
MIN_NOUNS = 2
JOKE_THRESHOLD = 3

CRITERION_LENGTH = "a_length"
CRITERION_NOUNS = "c_noun_count"
CRITERION_DUPLICATE = "d_duplicate"

_THIRD_PERSON_PRONOUNS = frozenset((
    "he", "him", "his", "himself",
    "she", "her", "hers", "herself",
    "it", "its", "itself",
    "they", "them", "their", "theirs", "themselves",
))

_ABBREVIATIONS = frozenset((
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc",
    "eg", "ie", "am", "pm", "us", "uk", "inc", "dept", "approx",
))


class FormatError(Exception):
    """A dataset or ratings record failed to parse; names the record."""


class InsufficientEligible(Exception):
    pass


class UnknownPair(Exception):
    pass


class EmptySource(Exception):
    pass


@dataclass(frozen=True)
class DialogueComment:
    conversation_id: str
    turn_index: int
    text: str

    def __post_init__(self) -> None:
        if self.turn_index < 0:
            raise ValueError("turn_index must be >= 0")
        if not self.text.strip():
            raise ValueError("comment text must be non-empty")


@dataclass(frozen=True)
class EligibilityVerdict:
    passed: bool
    failed_criteria: frozenset[str] = frozenset()
    requires_review: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "failed_criteria", frozenset(self.failed_criteria))
        if self.passed and self.failed_criteria:
            raise ValueError("a passing verdict cannot carry failed criteria")


@dataclass(frozen=True)
class RatingRecord:
    pair_id: str
    rater_id: str
    score: int

    def __post_init__(self) -> None:
        if self.score not in (1, 2, 3, 4):
            raise ValueError(f"score must be 1..4, got {self.score}")


@dataclass(frozen=True)
class SourceSummary:
    source: str
    mean_rating: float
    pct_jokes: float

    def __post_init__(self) -> None:
        if not 1.0 <= self.mean_rating <= 4.0:
            raise ValueError("mean_rating must lie in [1, 4]")
        if not 0.0 <= self.pct_jokes <= 100.0:
            raise ValueError("pct_jokes must lie in [0, 100]")


@dataclass(frozen=True)
class AggregateResult:
    per_pair: dict[str, float]
    summaries: tuple[SourceSummary, ...]


# --- ingestion ---------------------------------------------------------------

def _comment_from_record(
    record: Mapping[str, object], position: str, running: dict[str, int]
) -> DialogueComment:
    try:
        conversation_id = str(record["conversation_id"])
        message = str(record["message"])
    except KeyError as exc:
        raise FormatError(f"{position}: missing field {exc.args[0]!r}") from None
    raw_turn = record.get("turn_index")
    if raw_turn in (None, ""):
        turn_index = running.get(conversation_id, 0)
    else:
        try:
            turn_index = int(raw_turn)  # type: ignore[arg-type]
        except (TypeError, ValueError):
            raise FormatError(f"{position}: turn_index {raw_turn!r} is not an integer") from None
    running[conversation_id] = turn_index + 1
    try:
        return DialogueComment(conversation_id=conversation_id, turn_index=turn_index, text=message)
    except ValueError as exc:
        raise FormatError(f"{position}: {exc}") from None


def ingest_dataset(path: str | Path) -> list[DialogueComment]:
    """Load dialogue comments from a .csv (DictReader) or .jsonl file with
    fields conversation_id, turn_index (optional), message."""
    path = Path(path)
    running: dict[str, int] = {}
    comments: list[DialogueComment] = []
    if path.suffix.lower() in (".jsonl", ".ndjson"):
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise FormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
                if not isinstance(record, dict):
                    raise FormatError(f"line {lineno}: expected an object")
                comments.append(_comment_from_record(record, f"line {lineno}", running))
        return comments
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "message" not in reader.fieldnames:
            raise FormatError("header: a 'message' column is required")
        for rownum, row in enumerate(reader, 2):
            comments.append(_comment_from_record(row, f"row {rownum}", running))
    return comments


# --- sentence extraction and standardization ---------------------------------

_TERMINATOR_RE = re.compile(r"[.!?]+[\"')\]]*(?=\s|$)")


def _is_abbreviation_dot(text: str, match: re.Match) -> bool:
    if not match.group().startswith("."):
        return False
    head = text[: match.start()]
    token_match = re.search(r"[\w.]+$", head)
    if token_match is None:
        return False
    token = token_match.group().strip(".").lower()
    if not token:
        return False
    if "." in token:
        # dotted abbreviations like e.g / a.m / u.s
        return True
    if len(token) == 1 and token.isalpha():
        # single-letter initial
        return True
    return token in _ABBREVIATIONS


def last_complete_sentence(text: str) -> Optional[str]:
    """The final terminator-ended sentence of the comment, or None when no
    sentence terminator exists. A trailing fragment after the last
    terminator is ignored."""
    ends = [m.end() for m in _TERMINATOR_RE.finditer(text) if not _is_abbreviation_dot(text, m)]
    if not ends:
        return None
    start = ends[-2] if len(ends) > 1 else 0
    sentence = text[start:ends[-1]].strip()
    return sentence or None


def standardize(sentence: str) -> str:
    """Mechanical cleanup only: collapse whitespace, uppercase the first
    character, ensure a terminal punctuation mark. Idempotent."""
    out = " ".join(sentence.split())
    if not out:
        return out
    out = out[0].upper() + out[1:]
    if out[-1] not in ".!?":
        out += "."
    return out


def _duplicate_key(sentence: str) -> str:
    stripped = sentence.lower().translate(str.maketrans("", "", string.punctuation))
    return " ".join(stripped.split())


def _has_third_person_pronoun(sentence: str) -> bool:
    tokens = (t.strip(string.punctuation).lower() for t in sentence.split())
    return any(t in _THIRD_PERSON_PRONOUNS for t in tokens)


def eligibility_check(
    sentence: str,
    prior: Sequence[str] = (),
    annotator: Optional[NounAnnotator] = None,
) -> EligibilityVerdict:
    """Apply the mechanical input criteria: (a) at most 20 words, (c) at
    least two nouns, (d) not a near-duplicate of an already-kept sentence.
    Pronoun-antecedent clarity cannot be decided mechanically, so a
    third-person pronoun only flags the sentence for human review."""
    annotator = annotator or RuleBasedNounAnnotator()
    failed: set[str] = set()
    if len(sentence.split()) > MAX_INPUT_WORDS:
        failed.add(CRITERION_LENGTH)
    if annotator.count_nouns(sentence) < MIN_NOUNS:
        failed.add(CRITERION_NOUNS)
    key = _duplicate_key(sentence)
    if any(_duplicate_key(p) == key for p in prior):
        failed.add(CRITERION_DUPLICATE)
    return EligibilityVerdict(
        passed=not failed,
        failed_criteria=frozenset(failed),
        requires_review=_has_third_person_pronoun(sentence),
    )


def sample_inputs(
    comments: Sequence[DialogueComment],
    n: int,
    seed: int,
    annotator: Optional[NounAnnotator] = None,
) -> list[str]:
    """Walk the comments in a seeded pseudo-random order, keeping the last
    complete sentence of each comment that passes the eligibility filter,
    until n standardized sentences are collected."""
    if n < 1:
        raise ValueError("n must be >= 1")
    annotator = annotator or RuleBasedNounAnnotator()
    order = list(range(len(comments)))
    Xoshiro256(seed).shuffle(order)
    selected: list[str] = []
    for idx in order:
        sentence = last_complete_sentence(comments[idx].text)
        if sentence is None:
            continue
        verdict = eligibility_check(sentence, prior=selected, annotator=annotator)
        if not verdict.passed:
            continue
        selected.append(standardize(sentence))
        if len(selected) == n:
            return selected
    raise InsufficientEligible(
        f"only {len(selected)} of the requested {n} sentences passed the filter"
    )


# --- baseline and presentation ------------------------------------------------

def gpt_lol_respond(sentence: str, backend, catalog: Optional[PromptCatalog] = None) -> str:
    """One call to the pinned single-prompt baseline; returns trimmed text."""
    catalog = catalog or load_catalog()
    template = catalog.get("gpt_lol")
    prompt = render_template(template, {"sentence": sentence})
    result = backend.complete(CompletionRequest(
        prompt=prompt, template_id="gpt_lol", decoding=template.decoding,
    ))
    return result.text


def randomize_presentation(pairs: Sequence, seed: int) -> list:
    out = list(pairs)
    Xoshiro256(seed).shuffle(out)
    return out


# --- aggregation ---------------------------------------------------------------

def aggregate(
    records: Sequence[RatingRecord], pair_to_source: Mapping[str, str]
) -> AggregateResult:
    """Per-pair mean scores plus one summary per source: mean over that
    source's individual ratings and the percentage rated 3 or higher."""
    scores_by_pair: dict[str, list[int]] = {}
    for record in records:
        if record.pair_id not in pair_to_source:
            raise UnknownPair(f"pair {record.pair_id!r} is not in the pair-source map")
        scores_by_pair.setdefault(record.pair_id, []).append(record.score)

    per_pair = {
        pair_id: sum(scores) / len(scores)
        for pair_id, scores in scores_by_pair.items()
    }

    source_order: list[str] = []
    for source in pair_to_source.values():
        if source not in source_order:
            source_order.append(source)

    summaries = []
    for source in source_order:
        all_scores = [
            s
            for pair_id, scores in scores_by_pair.items()
            if pair_to_source[pair_id] == source
            for s in scores
        ]
        if not all_scores:
            raise EmptySource(f"source {source!r} has no ratings")
        summaries.append(SourceSummary(
            source=source,
            mean_rating=sum(all_scores) / len(all_scores),
            pct_jokes=100.0 * sum(1 for s in all_scores if s >= JOKE_THRESHOLD) / len(all_scores),
        ))
    return AggregateResult(per_pair=per_pair, summaries=tuple(summaries))


def _round_half_up(value: float, places: str) -> str:
    return str(Decimal(str(value)).quantize(Decimal(places), rounding=ROUND_HALF_UP))


def format_mean(value: float) -> str:
    return _round_half_up(value, "0.01")


def format_pct(value: float) -> str:
    return _round_half_up(value, "0.1")


def emit_report(
    result: AggregateResult,
    pair_to_source: Mapping[str, str],
    path: str | Path,
) -> None:
    """Write the summary table (mean to 2 decimals, joke percentage to 1)
    followed by a per-pair appendix."""
    if not result.summaries:
        raise ValueError("nothing to report")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "mean_rating", "pct_jokes"])
        for summary in result.summaries:
            writer.writerow([
                summary.source, format_mean(summary.mean_rating), format_pct(summary.pct_jokes),
            ])
        writer.writerow([])
        writer.writerow(["pair_id", "source", "mean_rating"])
        for pair_id in pair_to_source:
            if pair_id in result.per_pair:
                writer.writerow([
                    pair_id, pair_to_source[pair_id], format_mean(result.per_pair[pair_id]),
                ])


# --- ratings file I/O -----------------------------------------------------------

def load_ratings(path: str | Path) -> list[RatingRecord]:
    """One rating per row: pair_id, rater_id, score."""
    records: list[RatingRecord] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"pair_id", "rater_id", "score"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise FormatError("header: pair_id, rater_id, score columns are required")
        for rownum, row in enumerate(reader, 2):
            try:
                records.append(RatingRecord(
                    pair_id=row["pair_id"], rater_id=row["rater_id"], score=int(row["score"]),
                ))
            except (TypeError, ValueError) as exc:
                raise FormatError(f"row {rownum}: {exc}") from None
    return records


def load_pair_map(path: str | Path) -> dict[str, str]:
    """pair_id → source, one pair per row, order preserved."""
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"pair_id", "source"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise FormatError("header: pair_id, source columns are required")
        for rownum, row in enumerate(reader, 2):
            pair_id, source = row["pair_id"], row["source"]
            if not pair_id or not source:
                raise FormatError(f"row {rownum}: empty pair_id or source")
            mapping[pair_id] = source
    return mapping
