"""Dictionary-driven recognition over tagged tokens.

Acronyms are found with the capitals heuristic and resolved against an
acronym lexicon; mathematician names and named mathematical entities are
matched greedily (longest match first) against gazetteers whose keys were
case-folded and whitespace-tokenized at load time. Overlaps across kinds
resolve by priority: named_entity > person_name > acronym.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from mathnlp.errors import WrongLexiconKind
from mathnlp.ingest import Lexicon
from mathnlp.tagger import HmmModel, TaggedToken, propose_unknown_tag
from mathnlp.textprep import WORD

ACRONYM_RE = re.compile(r"[A-Z][A-Z0-9]+")

KIND_PRIORITY = ("named_entity", "person_name", "acronym")


@dataclass(frozen=True)
class EntityMatch:
    kind: str
    token_range: tuple[int, int]
    matched_key: str
    payload: tuple[str, ...]


@dataclass(frozen=True)
class UnknownToken:
    surface: str
    proposed_tag: str
    confidence: float
    occurrence_count: int


@dataclass(frozen=True)
class UnknownTokenReport:
    entries: tuple[UnknownToken, ...]


def detect_acronyms(tokens: Sequence[TaggedToken], lexicon: Lexicon) -> list[EntityMatch]:
    """Word tokens of length >= 2 that are all capitals (digits allowed after
    the first character); lexicon hits carry their resolutions, novel
    acronyms an empty payload."""
    if lexicon.kind != "acronym":
        raise WrongLexiconKind("acronym", lexicon.kind)
    resolutions = lexicon.as_dict()
    matches = []
    for i, token in enumerate(tokens):
        if token.kind != WORD or not ACRONYM_RE.fullmatch(token.surface):
            continue
        payload = resolutions.get(token.surface, ())
        matches.append(
            EntityMatch(
                kind="acronym",
                token_range=(i, i + 1),
                matched_key=token.surface,
                payload=payload,
            )
        )
    return matches


def _key_tokens(lexicon: Lexicon) -> dict[str, list[tuple[tuple[str, ...], str, tuple[str, ...]]]]:
    """Index key token sequences by their first token, longest first."""
    index: dict[str, list[tuple[tuple[str, ...], str, tuple[str, ...]]]] = {}
    for key, payload in lexicon.entries:
        parts = tuple(key.split())
        if not parts:
            continue
        index.setdefault(parts[0], []).append((parts, key, payload))
    for entries in index.values():
        entries.sort(key=lambda item: -len(item[0]))
    return index


def match_gazetteer(tokens: Sequence[TaggedToken], lexicon: Lexicon) -> list[EntityMatch]:
    """Greedy left-to-right longest match of case-folded token sequences.

    For person-name lexicons (keys are family names, payloads given-name
    variants) the recognized shapes are ``family``, ``given family`` and
    ``family , given``; the longest shape at a position wins.
    """
    if lexicon.kind not in ("person_name", "named_entity"):
        raise WrongLexiconKind("person_name or named_entity", lexicon.kind)
    folded = [t.surface.casefold() for t in tokens]
    matches: list[EntityMatch] = []

    if lexicon.kind == "named_entity":
        index = _key_tokens(lexicon)
        i = 0
        while i < len(tokens):
            found = None
            for parts, key, payload in index.get(folded[i], ()):
                end = i + len(parts)
                if end <= len(tokens) and tuple(folded[i:end]) == parts:
                    found = (end, key, payload)
                    break
            if found:
                end, key, payload = found
                matches.append(
                    EntityMatch(kind="named_entity", token_range=(i, end), matched_key=key, payload=payload)
                )
                i = end
            else:
                i += 1
        return matches

    families = lexicon.as_dict()
    given_by_family = {fam: {g.casefold() for g in payload} for fam, payload in families.items()}
    i = 0
    n = len(tokens)
    while i < n:
        word = folded[i]
        # family , given
        if (
            word in families
            and i + 2 < n
            and tokens[i + 1].surface == ","
            and folded[i + 2] in given_by_family[word]
        ):
            matches.append(
                EntityMatch(kind="person_name", token_range=(i, i + 3), matched_key=word, payload=families[word])
            )
            i += 3
            continue
        # given family
        if i + 1 < n and folded[i + 1] in families and word in given_by_family[folded[i + 1]]:
            fam = folded[i + 1]
            matches.append(
                EntityMatch(kind="person_name", token_range=(i, i + 2), matched_key=fam, payload=families[fam])
            )
            i += 2
            continue
        # family alone
        if word in families:
            matches.append(
                EntityMatch(kind="person_name", token_range=(i, i + 1), matched_key=word, payload=families[word])
            )
        i += 1
    return matches


def _overlaps(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def collect_entities(
    tokens: Sequence[TaggedToken], lexicons: Mapping[str, Lexicon]
) -> list[EntityMatch]:
    """Run every available recognizer and resolve overlaps by kind priority."""
    by_kind: dict[str, list[EntityMatch]] = {kind: [] for kind in KIND_PRIORITY}
    if "named_entity" in lexicons:
        by_kind["named_entity"] = match_gazetteer(tokens, lexicons["named_entity"])
    if "person_name" in lexicons:
        by_kind["person_name"] = match_gazetteer(tokens, lexicons["person_name"])
    acronym_lexicon = lexicons.get("acronym", Lexicon(kind="acronym", entries=()))
    by_kind["acronym"] = detect_acronyms(tokens, acronym_lexicon)

    kept: list[EntityMatch] = []
    for kind in KIND_PRIORITY:
        for match in by_kind[kind]:
            if any(
                _overlaps(match.token_range, other.token_range)
                for other in kept
                if other.kind != kind
            ):
                continue
            kept.append(match)
    kept.sort(key=lambda m: (m.token_range, KIND_PRIORITY.index(m.kind)))
    return kept


def _lexicon_token_sets(lexicons: Iterable[Lexicon]) -> tuple[set[str], set[str]]:
    """(case-sensitive acronym keys, case-folded tokens of all other lexicons)."""
    exact: set[str] = set()
    folded: set[str] = set()
    for lexicon in lexicons:
        if lexicon.kind == "acronym":
            exact.update(key for key, _ in lexicon.entries)
            continue
        for key, payload in lexicon.entries:
            folded.update(key.split())
            if lexicon.kind == "person_name":
                folded.update(p.casefold() for p in payload)
    return exact, folded


def report_unknown_tokens(
    tagged_sentences: Sequence[Sequence[TaggedToken]],
    model: HmmModel,
    lexicons: Mapping[str, Lexicon],
) -> UnknownTokenReport:
    """Distinct word surfaces outside the tagger vocabulary and every lexicon,
    with a proposed tag and document frequency, most frequent first."""
    exact, folded = _lexicon_token_sets(lexicons.values())
    counts: dict[str, int] = {}
    for sentence in tagged_sentences:
        for token in sentence:
            if token.kind != WORD:
                continue
            if model.knows(token.surface):
                continue
            if token.surface in exact or token.surface.casefold() in folded:
                continue
            counts[token.surface] = counts.get(token.surface, 0) + 1
    entries = []
    for surface, count in counts.items():
        tag, confidence = propose_unknown_tag(model, surface)
        entries.append(
            UnknownToken(surface=surface, proposed_tag=tag, confidence=confidence, occurrence_count=count)
        )
    entries.sort(key=lambda e: (-e.occurrence_count, e.surface))
    return UnknownTokenReport(entries=tuple(entries))
