"""End-to-end document analysis: masking, tagging, entity matching,
key-phrase extraction and class proposals, with all spans mapped back to
the original (pre-masking) text.

A :class:`Pipeline` bundles the loaded models, lexicons and patterns; it
is immutable after loading and safe to share across threads. Analysis is
a pure function of (pipeline, text): repeated calls serialize to
byte-identical JSON.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from mathnlp import PIPELINE_VERSION
from mathnlp.classify import (
    LinearSvmModel,
    NaiveBayesModel,
    ClassProposal,
    featurize,
    load_linear_svm,
    load_naive_bayes,
    predict,
)
from mathnlp.errors import ModelNotLoaded
from mathnlp.ingest import Lexicon, MscScheme, read_lexicon, read_msc_scheme
from mathnlp.lexlayer import UnknownTokenReport, collect_entities, report_unknown_tokens
from mathnlp.phrases import (
    TagPattern,
    aggregate_keyphrases,
    chunk_noun_phrases,
    default_patterns,
    filter_keyphrases,
    read_pattern_file,
)
from mathnlp.tagger import HmmModel, load_hmm, tag_document
from mathnlp.textprep import (
    MaskedText,
    mask_formulae,
    segment_sentences,
    span_to_original,
    tokenize,
)

TAGGER_FILE = "tagger.hmm"
CLASSIFIER_FILES = {"nb": "nb.model", "sv": "svm.model"}
LEXICON_FILES = {
    "acronym": "acronyms.tsv",
    "person_name": "person_names.tsv",
    "named_entity": "named_entities.tsv",
    "phrase_stoplist": "phrase_stoplist.tsv",
}
SCHEME_FILE = "msc.tsv"
PATTERN_FILE = "patterns.txt"


@dataclass(frozen=True)
class KeyPhraseOccurrence:
    sentence_index: int
    token_range: tuple[int, int]
    span: tuple[int, int]  # byte range into the original text


@dataclass(frozen=True)
class KeyPhraseEntry:
    normalized: str
    surfaces: tuple[str, ...]
    frequency: int
    contains_formula: bool
    occurrences: tuple[KeyPhraseOccurrence, ...]


@dataclass(frozen=True)
class EntityEntry:
    kind: str
    matched_key: str
    payload: tuple[str, ...]
    sentence_index: int
    token_range: tuple[int, int]
    span: tuple[int, int]


@dataclass(frozen=True)
class AnalysisResult:
    doc_id: str
    original_text: str
    keyphrases: tuple[KeyPhraseEntry, ...]
    proposals: tuple[ClassProposal, ...]
    unknown_tokens: UnknownTokenReport
    entities: tuple[EntityEntry, ...]
    pipeline_version: str


@dataclass(frozen=True)
class Pipeline:
    tagger: HmmModel
    classifiers: Mapping[str, NaiveBayesModel | LinearSvmModel]
    lexicons: Mapping[str, Lexicon]
    patterns: tuple[TagPattern, ...]
    scheme: MscScheme | None = None

    @property
    def methods(self) -> tuple[str, ...]:
        return tuple(m for m in CLASSIFIER_FILES if m in self.classifiers)

    def scheme_classes(self) -> tuple[tuple[str, str], ...]:
        """(code, title) pairs: the loaded scheme, else classifier codes."""
        if self.scheme is not None:
            return self.scheme.classes
        codes: set[str] = set()
        for model in self.classifiers.values():
            codes.update(model.classes)
        return tuple((code, "") for code in sorted(codes))


def load_pipeline(models_dir: str | Path, lexicons_dir: str | Path | None = None) -> Pipeline:
    """Load models and lexicons from their conventional file names.

    ``tagger.hmm`` is required; classifier models, lexicons, the class
    scheme and the pattern file are picked up when present.
    """
    models_dir = Path(models_dir)
    tagger_path = models_dir / TAGGER_FILE
    if not tagger_path.exists():
        raise ModelNotLoaded("tagger")
    tagger = load_hmm(tagger_path)

    classifiers: dict[str, NaiveBayesModel | LinearSvmModel] = {}
    nb_path = models_dir / CLASSIFIER_FILES["nb"]
    if nb_path.exists():
        classifiers["nb"] = load_naive_bayes(nb_path)
    svm_path = models_dir / CLASSIFIER_FILES["sv"]
    if svm_path.exists():
        classifiers["sv"] = load_linear_svm(svm_path)

    lexicons: dict[str, Lexicon] = {}
    scheme = None
    patterns = tuple(default_patterns())
    if lexicons_dir is not None:
        lexicons_dir = Path(lexicons_dir)
        for kind, filename in LEXICON_FILES.items():
            path = lexicons_dir / filename
            if path.exists():
                lexicons[kind] = read_lexicon(path, kind)
        scheme_path = lexicons_dir / SCHEME_FILE
        if scheme_path.exists():
            scheme = read_msc_scheme(scheme_path)
        pattern_path = lexicons_dir / PATTERN_FILE
        if pattern_path.exists():
            patterns = tuple(read_pattern_file(pattern_path))

    return Pipeline(
        tagger=tagger,
        classifiers=classifiers,
        lexicons=lexicons,
        patterns=patterns,
        scheme=scheme,
    )


def default_doc_id(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


def _sentence_slices(masked: MaskedText) -> list[tuple[int, str]]:
    """(byte offset, sentence text) for each segmented sentence."""
    raw = masked.text.encode("utf-8")
    return [
        (start, raw[start:end].decode("utf-8"))
        for start, end in segment_sentences(masked.text)
    ]


def _token_span(sentence, token_range: tuple[int, int]) -> tuple[int, int]:
    start, end = token_range
    return (sentence[start].span[0], sentence[end - 1].span[1])


def analyze_document(
    text: str,
    pipeline: Pipeline,
    doc_id: str | None = None,
    methods: Sequence[str] | None = None,
) -> AnalysisResult:
    """Run the full pipeline over one document.

    ``methods`` restricts which class-proposal methods run (default: every
    method with a loaded model); naming a method without a model raises
    :class:`ModelNotLoaded`. Unbalanced math delimiters in ``text``
    propagate from masking with their byte offset.
    """
    if methods is None:
        methods = pipeline.methods
    else:
        methods = tuple(methods)
        for method in methods:
            if method not in pipeline.classifiers:
                raise ModelNotLoaded(method)

    masked = mask_formulae(text)
    sentences = [
        tokenize(sentence_text, base_offset=offset, placeholder_base=masked.placeholder_base)
        for offset, sentence_text in _sentence_slices(masked)
    ]
    tagged = tag_document(pipeline.tagger, sentences)

    entities = []
    for sentence_index, sentence in enumerate(tagged):
        for match in collect_entities(sentence, pipeline.lexicons):
            entities.append(
                EntityEntry(
                    kind=match.kind,
                    matched_key=match.matched_key,
                    payload=match.payload,
                    sentence_index=sentence_index,
                    token_range=match.token_range,
                    span=span_to_original(masked, _token_span(sentence, match.token_range)),
                )
            )

    doc_chunks = [chunk_noun_phrases(sentence, pipeline.patterns) for sentence in tagged]
    candidates = aggregate_keyphrases(doc_chunks, tagged, masked)
    stoplist = pipeline.lexicons.get(
        "phrase_stoplist", Lexicon(kind="phrase_stoplist", entries=())
    )
    kept = filter_keyphrases(candidates, stoplist)

    raw = text.encode("utf-8")
    keyphrases = []
    for candidate in kept:
        occurrences = tuple(
            KeyPhraseOccurrence(
                sentence_index=sentence_index,
                token_range=token_range,
                span=span_to_original(masked, _token_span(tagged[sentence_index], token_range)),
            )
            for sentence_index, token_range in candidate.occurrences
        )
        # surfaces as the reader sees them: slices of the original text
        surfaces = sorted({raw[occ.span[0] : occ.span[1]].decode("utf-8") for occ in occurrences})
        keyphrases.append(
            KeyPhraseEntry(
                normalized=candidate.normalized,
                surfaces=tuple(surfaces),
                frequency=candidate.frequency,
                contains_formula=candidate.contains_formula,
                occurrences=occurrences,
            )
        )
    keyphrases = tuple(keyphrases)

    proposals = []
    all_tokens = [token for sentence in sentences for token in sentence]
    for method in methods:
        model = pipeline.classifiers[method]
        if model.source == "keyphrases":
            vector = featurize(kept, "keyphrases", model.feature_index, frozen=True)
        else:
            vector = featurize(all_tokens, "tokens", model.feature_index, frozen=True)
        proposals.append(predict(model, vector))

    unknown = report_unknown_tokens(tagged, pipeline.tagger, pipeline.lexicons)

    return AnalysisResult(
        doc_id=doc_id if doc_id is not None else default_doc_id(text),
        original_text=text,
        keyphrases=keyphrases,
        proposals=tuple(proposals),
        unknown_tokens=unknown,
        entities=tuple(entities),
        pipeline_version=PIPELINE_VERSION,
    )


def document_features(
    text: str,
    source: str,
    index,
    frozen: bool,
    tagger: HmmModel | None = None,
    patterns: Sequence[TagPattern] | None = None,
    stoplist: Lexicon | None = None,
):
    """Feature vector for raw document text, for training and evaluation.

    Tokens mode needs no models; keyphrases mode tags the text first and
    so requires ``tagger`` (and optionally patterns and a stoplist, with
    the defaults used otherwise).
    """
    masked = mask_formulae(text)
    sentences = [
        tokenize(sentence_text, base_offset=offset, placeholder_base=masked.placeholder_base)
        for offset, sentence_text in _sentence_slices(masked)
    ]
    if source == "tokens":
        return featurize(
            [token for sentence in sentences for token in sentence], "tokens", index, frozen
        )
    if tagger is None:
        raise ModelNotLoaded("tagger")
    if patterns is None:
        patterns = tuple(default_patterns())
    tagged = tag_document(tagger, sentences)
    doc_chunks = [chunk_noun_phrases(sentence, patterns) for sentence in tagged]
    candidates = aggregate_keyphrases(doc_chunks, tagged, masked)
    if stoplist is None:
        stoplist = Lexicon(kind="phrase_stoplist", entries=())
    kept = filter_keyphrases(candidates, stoplist)
    return featurize(kept, "keyphrases", index, frozen)


def result_to_dict(result: AnalysisResult) -> dict:
    """Plain-JSON form of an analysis result (lists and scalars only)."""
    return {
        "doc_id": result.doc_id,
        "original_text": result.original_text,
        "pipeline_version": result.pipeline_version,
        "keyphrases": [
            {
                "normalized": entry.normalized,
                "surfaces": list(entry.surfaces),
                "frequency": entry.frequency,
                "contains_formula": entry.contains_formula,
                "occurrences": [
                    {
                        "sentence_index": occ.sentence_index,
                        "token_range": list(occ.token_range),
                        "span": list(occ.span),
                    }
                    for occ in entry.occurrences
                ],
            }
            for entry in result.keyphrases
        ],
        "proposals": [
            {
                "method": proposal.method,
                "ranked": [[code, score] for code, score in proposal.ranked],
            }
            for proposal in result.proposals
        ],
        "unknown_tokens": [
            {
                "surface": entry.surface,
                "proposed_tag": entry.proposed_tag,
                "confidence": entry.confidence,
                "occurrence_count": entry.occurrence_count,
            }
            for entry in result.unknown_tokens.entries
        ],
        "entities": [
            {
                "kind": entity.kind,
                "matched_key": entity.matched_key,
                "payload": list(entity.payload),
                "sentence_index": entity.sentence_index,
                "token_range": list(entity.token_range),
                "span": list(entity.span),
            }
            for entity in result.entities
        ],
    }


def result_to_json(result: AnalysisResult) -> str:
    return json.dumps(result_to_dict(result), sort_keys=True, ensure_ascii=False)


def result_to_text(result: AnalysisResult) -> str:
    """Compact human-readable report."""
    lines = [f"document {result.doc_id} (pipeline {result.pipeline_version})"]
    lines.append("")
    lines.append("key phrases:")
    if not result.keyphrases:
        lines.append("  (none)")
    for entry in result.keyphrases:
        marker = " [formula]" if entry.contains_formula else ""
        lines.append(f"  {entry.frequency:>4}  {entry.normalized}{marker}")
    for proposal in result.proposals:
        lines.append("")
        lines.append(f"proposed classes ({proposal.method}):")
        for code, score in proposal.ranked[:5]:
            lines.append(f"  {code}  {score:.6f}")
    if result.entities:
        lines.append("")
        lines.append("entities:")
        for entity in result.entities:
            lines.append(f"  {entity.kind}: {entity.matched_key}")
    if result.unknown_tokens.entries:
        lines.append("")
        lines.append("unknown tokens:")
        for entry in result.unknown_tokens.entries:
            lines.append(
                f"  {entry.surface} (x{entry.occurrence_count}, "
                f"{entry.proposed_tag} {entry.confidence:.3f})"
            )
    return "\n".join(lines) + "\n"
