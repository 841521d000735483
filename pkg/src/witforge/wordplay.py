"""Sound-alike pairing and pun construction over association lists.

Terms are encoded word by word with Double Metaphone; multi-word codes are
joined with a boundary symbol so a missing word costs edits. Distance is
Levenshtein over code symbols normalized by the longer code, minimized
over primary/alternate combinations. No model calls happen here, so the
whole module is exhaustively testable.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .metaphone import double_metaphone_trace
from .model import Association

WORD_BOUNDARY = "|"
DEFAULT_WORDPLAY_THRESHOLD = 0.4

_ARTICLES = frozenset({"the", "a", "an"})


@dataclass(frozen=True)
class PhoneticCode:
    """Primary code plus an alternate when the encoding is ambiguous."""

    primary: str
    alternate: Optional[str] = None

    def variants(self) -> tuple[str, ...]:
        if self.alternate is None:
            return (self.primary,)
        return (self.primary, self.alternate)


@dataclass(frozen=True)
class WordplayPair:
    """A sound-alike pair; a comes from list 0, b from list 1."""

    a: Association
    b: Association
    distance: float

    def __post_init__(self) -> None:
        recomputed = phonetic_distance(self.a.text, self.b.text)
        if self.distance != recomputed:
            raise ValueError(
                f"stored distance {self.distance} does not match recomputed {recomputed}"
            )


@dataclass(frozen=True)
class _EncodedTerm:
    code: PhoneticCode
    # cleaned words joined by single spaces, articles dropped
    spelling: str
    # index into spelling for every primary-code symbol
    trace: tuple[int, ...]


def strip_leading_article(text: str) -> str:
    words = text.split()
    if len(words) > 1 and words[0].lower() in _ARTICLES:
        return " ".join(words[1:])
    return text.strip()


def _clean_words(term: str) -> list[str]:
    words = []
    for raw in strip_leading_article(term).split():
        letters = "".join(ch for ch in raw if ch.isalpha())
        if letters:
            words.append(letters)
    return words


def _encode_term(term: str) -> _EncodedTerm:
    words = _clean_words(term)
    primary_parts: list[str] = []
    alternate_parts: list[str] = []
    trace: list[int] = []
    spelling_parts: list[str] = []
    has_alternate = False
    offset = 0
    for i, word in enumerate(words):
        if i > 0:
            # the boundary symbol maps back to the joining space
            trace.append(offset - 1)
        pri, alt, word_trace = double_metaphone_trace(word)
        primary_parts.append(pri)
        alternate_parts.append(alt if alt is not None else pri)
        if alt is not None:
            has_alternate = True
        trace.extend(offset + t for t in word_trace)
        spelling_parts.append(word)
        offset += len(word) + 1
    primary = WORD_BOUNDARY.join(primary_parts)
    alternate = WORD_BOUNDARY.join(alternate_parts) if has_alternate else None
    return _EncodedTerm(
        code=PhoneticCode(primary, alternate),
        spelling=" ".join(spelling_parts),
        trace=tuple(trace),
    )


def phonetic_encode(term: str) -> PhoneticCode:
    """Encode a term, case-insensitively, ignoring non-letter characters
    and a leading article. Empty input yields an empty primary code."""
    return _encode_term(term).code


def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (ca != cb),
            ))
        prev = cur
    return prev[-1]


def phonetic_distance(a: str, b: str) -> float:
    """Normalized edit distance in [0, 1] between the sounds of two terms,
    minimized over primary/alternate code combinations. Two empty codes
    are defined to be at distance 0."""
    ca = phonetic_encode(a)
    cb = phonetic_encode(b)
    best = None
    for va in ca.variants():
        for vb in cb.variants():
            longer = max(len(va), len(vb))
            if longer == 0:
                d = 0.0
            else:
                d = levenshtein(va, vb) / longer
            if best is None or d < best:
                best = d
    return best if best is not None else 0.0


def best_wordplay_pair(
    list_a: Sequence[Association],
    list_b: Sequence[Association],
    threshold: float = DEFAULT_WORDPLAY_THRESHOLD,
) -> Optional[WordplayPair]:
    """Exhaustively score |A| x |B| pairs and return the closest one at or
    under the threshold, or None. Ties break toward the lower distance,
    then the lower list-a index, then the lower list-b index."""
    best: Optional[tuple[float, int, int]] = None
    for i, a in enumerate(list_a):
        for j, b in enumerate(list_b):
            d = phonetic_distance(a.text, b.text)
            key = (d, i, j)
            if best is None or key < best:
                best = key
    if best is None or best[0] > threshold:
        return None
    d, i, j = best
    return WordplayPair(a=list_a[i], b=list_b[j], distance=d)


def _splice(short: _EncodedTerm, long: _EncodedTerm) -> str:
    at = long.code.primary.find(short.code.primary)
    end_symbol = at + len(short.code.primary)
    start_char = long.trace[at] if long.trace else 0
    if end_symbol < len(long.code.primary):
        end_char = long.trace[end_symbol]
    else:
        end_char = len(long.spelling)
    return long.spelling[:start_char] + short.spelling + long.spelling[end_char:]


def build_pun_phrase(pair: WordplayPair) -> str:
    """Blend the pair into one phrase: when one term's code is contained
    in the other's, splice the shorter term's spelling in at the aligned
    position; otherwise juxtapose the two texts, a first."""
    ea = _encode_term(pair.a.text)
    eb = _encode_term(pair.b.text)
    juxtaposed = f"{pair.a.text.strip()} {pair.b.text.strip()}".strip()
    if ea.code.primary == eb.code.primary:
        return ea.spelling if ea.spelling else juxtaposed
    if ea.code.primary in eb.code.primary:
        phrase = _splice(ea, eb)
    elif eb.code.primary in ea.code.primary:
        phrase = _splice(eb, ea)
    else:
        phrase = juxtaposed
    return phrase if phrase else juxtaposed
