"""Noun-phrase chunking over tag sequences and key-phrase aggregation.

Chunking scans each sentence greedily left to right; at every position all
patterns are tried and the longest total match wins (earlier pattern on a
length tie). The default patterns are an adjective/participle + noun run,
optionally linked by ``of`` to a second noun run, with the formula tag
counting as a noun.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from mathnlp.errors import PatternSyntaxError, WrongLexiconKind
from mathnlp.ingest import Lexicon
from mathnlp.tagger import TaggedToken
from mathnlp.textprep import FORMULA, MaskedText, WORD

ONE = "one"
OPTIONAL = "optional"
ONE_OR_MORE = "one-or-more"
ZERO_OR_MORE = "zero-or-more"

_REP_MARKERS = {"1": ONE, "?": OPTIONAL, "+": ONE_OR_MORE, "*": ZERO_OR_MORE}


@dataclass(frozen=True)
class PatternElement:
    tag_ids: frozenset[str]
    repeat: str = ONE
    surface: str | None = None  # lowercased surface constraint for linker words


@dataclass(frozen=True)
class TagPattern:
    name: str
    elements: tuple[PatternElement, ...]

    def __post_init__(self):
        if not any(e.repeat in (ONE, ONE_OR_MORE) for e in self.elements):
            raise ValueError(f"pattern {self.name!r} has no mandatory element")


DEFAULT_PATTERN_TEXT = """
NP1: JJ|VBN|VBG{*} NN|NNS|NNP|NNPS|FORMULA{+}
NP2: JJ|VBN|VBG{*} NN|NNS|NNP|NNPS|FORMULA{+} IN=of JJ|VBN|VBG{*} NN|NNS|NNP|NNPS|FORMULA{+}
"""


def parse_patterns(text: str) -> list[TagPattern]:
    """Parse pattern configuration: one ``name: CLASS{rep} ...`` per line.

    A class is ``|``-joined tag ids, optionally constrained to a surface
    with ``=surface`` (e.g. ``IN=of``); ``{rep}`` is one of ``{1}`` (or
    absent), ``{?}``, ``{+}``, ``{*}``.
    """
    patterns: list[TagPattern] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise PatternSyntaxError(line_no, "missing ':' after the pattern name")
        name, _, body = line.partition(":")
        name = name.strip()
        if not name:
            raise PatternSyntaxError(line_no, "empty pattern name")
        elements = []
        for chunk in body.split():
            repeat = ONE
            if chunk.endswith("}"):
                brace = chunk.rfind("{")
                if brace < 0:
                    raise PatternSyntaxError(line_no, f"unmatched '}}' in {chunk!r}")
                marker = chunk[brace + 1 : -1]
                if marker not in _REP_MARKERS:
                    raise PatternSyntaxError(line_no, f"unknown repetition {marker!r}")
                repeat = _REP_MARKERS[marker]
                chunk = chunk[:brace]
            surface = None
            if "=" in chunk:
                chunk, _, surface = chunk.partition("=")
                surface = surface.lower()
                if not surface:
                    raise PatternSyntaxError(line_no, "empty surface constraint")
            tag_ids = frozenset(t for t in chunk.split("|") if t)
            if not tag_ids:
                raise PatternSyntaxError(line_no, "empty tag class")
            elements.append(PatternElement(tag_ids=tag_ids, repeat=repeat, surface=surface))
        if not elements:
            raise PatternSyntaxError(line_no, "pattern has no elements")
        try:
            patterns.append(TagPattern(name=name, elements=tuple(elements)))
        except ValueError as exc:
            raise PatternSyntaxError(line_no, str(exc)) from exc
    return patterns


def read_pattern_file(path: str | Path) -> list[TagPattern]:
    return parse_patterns(Path(path).read_text(encoding="utf-8"))


def default_patterns() -> list[TagPattern]:
    return parse_patterns(DEFAULT_PATTERN_TEXT)


def _element_matches(element: PatternElement, token: TaggedToken) -> bool:
    if token.tag not in element.tag_ids:
        return False
    return element.surface is None or token.surface.lower() == element.surface


def _closure(elements: Sequence[PatternElement], state: int) -> set[int]:
    """Epsilon closure: skip forward over optional/zero-or-more elements."""
    states = {state}
    while state < len(elements) and elements[state].repeat in (OPTIONAL, ZERO_OR_MORE):
        state += 1
        states.add(state)
    return states


def _match_length(pattern: TagPattern, tokens: Sequence[TaggedToken], start: int) -> int:
    """Longest full match of ``pattern`` at ``start`` (0 if none).

    Simulates the element sequence as a small NFA whose states are element
    indices; the last position where the accept state is live gives the
    longest match.
    """
    elements = pattern.elements
    accept = len(elements)
    states = _closure(elements, 0)
    best = 0
    i = start
    while i < len(tokens) and states:
        token = tokens[i]
        next_states: set[int] = set()
        for state in states:
            if state == accept or not _element_matches(elements[state], token):
                continue
            next_states |= _closure(elements, state + 1)
            if elements[state].repeat in (ONE_OR_MORE, ZERO_OR_MORE):
                next_states.add(state)
        i += 1
        states = next_states
        if accept in states:
            best = i - start
    return best


def chunk_noun_phrases(
    tagged_sentence: Sequence[TaggedToken], patterns: Sequence[TagPattern] | None = None
) -> list[tuple[int, int]]:
    """Non-overlapping token ranges of noun phrases in one sentence."""
    patterns = default_patterns() if patterns is None else patterns
    ranges: list[tuple[int, int]] = []
    i = 0
    n = len(tagged_sentence)
    while i < n:
        best_len = 0
        for pattern in patterns:
            length = _match_length(pattern, tagged_sentence, i)
            if length > best_len:
                best_len = length
        if best_len:
            ranges.append((i, i + best_len))
            i += best_len
        else:
            i += 1
    return ranges


@dataclass(frozen=True)
class KeyPhraseCandidate:
    normalized: str
    surfaces: frozenset[str]
    frequency: int
    occurrences: tuple[tuple[int, tuple[int, int]], ...]  # (sentence index, token range)
    contains_formula: bool


def _document_word_forms(tagged_sentences: Sequence[Sequence[TaggedToken]]) -> set[str]:
    return {
        token.surface.casefold()
        for sentence in tagged_sentences
        for token in sentence
        if token.kind == WORD
    }


def aggregate_keyphrases(
    doc_chunks: Sequence[Sequence[tuple[int, int]]],
    tagged_sentences: Sequence[Sequence[TaggedToken]],
    masked: MaskedText,
) -> list[KeyPhraseCandidate]:
    """Merge chunks into candidates keyed by their normalized form.

    Normalization case-folds word tokens, restores formula placeholders to
    their TeX source, and drops a terminal plural ``s`` from the head token
    when the singular form occurs somewhere in the document. Output is
    sorted by descending frequency, then lexicographically.
    """
    tex_by_placeholder = {e.placeholder: e.tex_source for e in masked.formula_table}
    witnessed = _document_word_forms(tagged_sentences)

    grouped: dict[str, dict] = {}
    for sentence_idx, (chunks, sentence) in enumerate(zip(doc_chunks, tagged_sentences)):
        for start, end in chunks:
            tokens = sentence[start:end]
            parts = []
            has_formula = False
            for token in tokens:
                if token.kind == FORMULA and token.surface in tex_by_placeholder:
                    # TeX may span lines; collapse whitespace so normalized
                    # forms stay single-line (they feed TAB-separated files).
                    parts.append(" ".join(tex_by_placeholder[token.surface].split()))
                    has_formula = True
                else:
                    parts.append(token.surface.casefold())
            head = tokens[-1]
            if head.kind == WORD and parts[-1].endswith("s"):
                singular = parts[-1][:-1]
                if singular and singular in witnessed:
                    parts[-1] = singular
            normalized = " ".join(parts)
            surface = " ".join(t.surface for t in tokens)
            entry = grouped.setdefault(
                normalized,
                {"surfaces": set(), "occurrences": [], "formula": False},
            )
            entry["surfaces"].add(surface)
            entry["occurrences"].append((sentence_idx, (start, end)))
            entry["formula"] = entry["formula"] or has_formula

    candidates = [
        KeyPhraseCandidate(
            normalized=normalized,
            surfaces=frozenset(entry["surfaces"]),
            frequency=len(entry["occurrences"]),
            occurrences=tuple(entry["occurrences"]),
            contains_formula=entry["formula"],
        )
        for normalized, entry in grouped.items()
    ]
    candidates.sort(key=lambda c: (-c.frequency, c.normalized))
    return candidates


def filter_keyphrases(
    candidates: Iterable[KeyPhraseCandidate], stoplist: Lexicon
) -> list[KeyPhraseCandidate]:
    """Drop stoplisted phrases and single-token candidates shorter than 3 characters."""
    if stoplist.kind != "phrase_stoplist":
        raise WrongLexiconKind("phrase_stoplist", stoplist.kind)
    stop = stoplist.keys
    kept = []
    for candidate in candidates:
        if candidate.normalized in stop:
            continue
        if " " not in candidate.normalized and len(candidate.normalized) < 3:
            continue
        kept.append(candidate)
    return kept
