"""Readers for external data: tagged corpora, lexicons, the MSC scheme,
and labeled classification corpora.

All formats are TAB-separated UTF-8 text. Corpus sentences are separated
by blank lines; every parse error carries a 1-based line number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

from mathnlp.errors import (
    DuplicateCode,
    DuplicateKey,
    EmptyCorpus,
    MalformedLine,
    UnknownTag,
)

if TYPE_CHECKING:
    from mathnlp.tagger import TagSet

LEXICON_KINDS = ("acronym", "person_name", "named_entity", "phrase_stoplist")

# Acronym keys stay case-sensitive: the capitals heuristic that detects
# them in text is itself case-sensitive.
CASE_SENSITIVE_KINDS = frozenset({"acronym"})


@dataclass(frozen=True)
class TaggedCorpus:
    sentences: tuple[tuple[tuple[str, str], ...], ...]
    source_name: str

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)


@dataclass(frozen=True)
class Lexicon:
    kind: str
    entries: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        if self.kind not in LEXICON_KINDS:
            raise ValueError(f"unknown lexicon kind {self.kind!r}")

    @property
    def keys(self) -> frozenset[str]:
        return frozenset(key for key, _ in self.entries)

    def get(self, key: str) -> tuple[str, ...] | None:
        for k, payload in self.entries:
            if k == key:
                return payload
        return None

    def as_dict(self) -> dict[str, tuple[str, ...]]:
        return dict(self.entries)


@dataclass(frozen=True)
class MscScheme:
    classes: tuple[tuple[str, str], ...]

    @property
    def codes(self) -> frozenset[str]:
        return frozenset(code for code, _ in self.classes)


@dataclass(frozen=True)
class LabeledDocument:
    doc_id: str
    text: str
    labels: frozenset[str]


def read_tagged_corpus(path: str | Path, tagset: "TagSet") -> TaggedCorpus:
    """Read a two-column ``surface<TAB>tag`` corpus, blank lines between sentences."""
    path = Path(path)
    sentences: list[tuple[tuple[str, str], ...]] = []
    current: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                if current:
                    sentences.append(tuple(current))
                    current = []
                continue
            columns = line.split("\t")
            if len(columns) != 2:
                raise MalformedLine(line_no, f"expected 2 TAB-separated columns, got {len(columns)}")
            surface, tag = columns
            if not surface or any(ch.isspace() for ch in surface):
                raise MalformedLine(line_no, f"bad surface {surface!r}")
            if not tag:
                raise MalformedLine(line_no, "empty tag")
            if tag not in tagset:
                raise UnknownTag(line_no, tag)
            current.append((surface, tag))
    if current:
        sentences.append(tuple(current))
    if not sentences:
        raise EmptyCorpus(f"{path} contains no sentences")
    return TaggedCorpus(sentences=tuple(sentences), source_name=path.name)


def write_tagged_corpus(corpus: TaggedCorpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for i, sentence in enumerate(corpus.sentences):
            if i:
                handle.write("\n")
            for surface, tag in sentence:
                handle.write(f"{surface}\t{tag}\n")


def read_lexicon(path: str | Path, kind: str) -> Lexicon:
    """Read ``key<TAB>payload...`` lines; keys are case-folded except for acronyms."""
    path = Path(path)
    entries: list[tuple[str, tuple[str, ...]]] = []
    seen: set[str] = set()
    fold = kind not in CASE_SENSITIVE_KINDS
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            columns = line.split("\t")
            key = columns[0].strip()
            if not key:
                raise MalformedLine(line_no, "empty key")
            if fold:
                key = key.casefold()
            if key in seen:
                raise DuplicateKey(key, line_no)
            seen.add(key)
            payload = tuple(c.strip() for c in columns[1:] if c.strip())
            entries.append((key, payload))
    return Lexicon(kind=kind, entries=tuple(entries))


_MSC_CODE_RE = re.compile(r"[0-9][0-9A-Za-z]")


def read_msc_scheme(path: str | Path) -> MscScheme:
    """Read the top-level MSC scheme as ``code<TAB>description`` lines."""
    path = Path(path)
    classes: list[tuple[str, str]] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            columns = line.split("\t")
            if len(columns) != 2:
                raise MalformedLine(line_no, f"expected 2 TAB-separated columns, got {len(columns)}")
            code, description = columns[0].strip(), columns[1].strip()
            if not _MSC_CODE_RE.fullmatch(code):
                raise MalformedLine(line_no, f"bad class code {code!r}")
            if code in seen:
                raise DuplicateCode(code, line_no)
            seen.add(code)
            classes.append((code, description))
    if len(classes) < 2:
        raise MalformedLine(1, "an MSC scheme needs at least 2 classes")
    return MscScheme(classes=tuple(classes))


def read_labeled_corpus(path: str | Path, scheme: MscScheme | None = None) -> list[LabeledDocument]:
    """Read one document per line: ``doc_id<TAB>code,code,...<TAB>text``."""
    path = Path(path)
    documents: list[LabeledDocument] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            columns = line.split("\t", 2)
            if len(columns) != 3:
                raise MalformedLine(line_no, f"expected 3 TAB-separated columns, got {len(columns)}")
            doc_id, codes, text = columns
            if not doc_id.strip():
                raise MalformedLine(line_no, "empty doc_id")
            if not text:
                raise MalformedLine(line_no, "empty text")
            labels = frozenset(c.strip() for c in codes.split(",") if c.strip())
            if not labels:
                raise MalformedLine(line_no, "no labels")
            if scheme is not None:
                bad = labels - scheme.codes
                if bad:
                    raise MalformedLine(line_no, f"labels outside the scheme: {sorted(bad)}")
            documents.append(LabeledDocument(doc_id=doc_id.strip(), text=text, labels=labels))
    if not documents:
        raise EmptyCorpus(f"{path} contains no documents")
    return documents
