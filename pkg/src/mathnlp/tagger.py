"""Bigram HMM part-of-speech tagging with Viterbi decoding.

The model keeps add-k smoothed transition and emission statistics plus a
suffix-based model for words outside the training vocabulary, estimated
from rare training tokens (total count <= 2). Formula placeholder tokens
are always decoded to the dedicated formula tag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence

from mathnlp.errors import CorruptFile, EmptyCorpus, KnownToken, UnknownTag, VersionMismatch
from mathnlp.textprep import FORMULA, PLACEHOLDER_RE, Token

if TYPE_CHECKING:
    from mathnlp.ingest import TaggedCorpus

SENT_START = "<s>"
FORMULA_TAG = "FORMULA"
UNK = "__UNK__"

# The 45-tag Penn Treebank scheme: 36 word tags plus 9 punctuation tags.
PENN_TAGS = (
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD",
    "NN", "NNS", "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR",
    "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG", "VBN", "VBP",
    "VBZ", "WDT", "WP", "WP$", "WRB",
    "#", "$", "''", "(", ")", ",", ".", ":", "``",
)

NEG_INF = float("-inf")


@dataclass(frozen=True)
class TagSet:
    tags: tuple[str, ...]
    formula_tag: str = FORMULA_TAG

    def __post_init__(self):
        if len(set(self.tags)) != len(self.tags):
            raise ValueError("tag ids must be unique")
        if self.formula_tag not in self.tags:
            raise ValueError("the formula tag must be a member of the tag set")
        if SENT_START in self.tags:
            raise ValueError(f"{SENT_START!r} is virtual and cannot be a tag")

    def __contains__(self, tag: str) -> bool:
        return tag in self.tags

    def __len__(self) -> int:
        return len(self.tags)

    def index(self, tag: str) -> int:
        return self.tags.index(tag)

    @classmethod
    def default(cls) -> "TagSet":
        return cls(tags=PENN_TAGS + (FORMULA_TAG,))


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    span: tuple[int, int]
    kind: str
    tag: str


def emission_key(surface: str) -> str:
    """Lowercased surface, except formula placeholders which stay verbatim."""
    if PLACEHOLDER_RE.fullmatch(surface):
        return surface
    return surface.lower()


def suffix_features(surface: str) -> list[str]:
    """Suffixes up to length 4 plus capitalization, digit and hyphen flags."""
    low = surface.lower()
    feats = [f"S:{low[-length:]}" for length in range(1, min(4, len(low)) + 1)]
    if surface[:1].isupper():
        feats.append("F:CAP")
    if any(ch.isdigit() for ch in surface):
        feats.append("F:DIG")
    if "-" in surface:
        feats.append("F:HYP")
    return feats


@dataclass
class HmmModel:
    tagset: TagSet
    transition_logprob: dict[tuple[str, str], float]
    emission_logprob: dict[tuple[str, str], float]
    emission_default: dict[str, float]
    suffix_logprob: dict[tuple[str, str], float]
    vocabulary: frozenset[str]
    k_trans: float
    k_emit: float
    _known_suffix_features: frozenset[str] = field(init=False, repr=False)
    _tag_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self._known_suffix_features = frozenset(f for _, f in self.suffix_logprob)
        self._tag_index = {tag: i for i, tag in enumerate(self.tagset.tags)}

    def knows(self, surface: str) -> bool:
        return emission_key(surface) in self.vocabulary


def train_hmm(
    corpus: "TaggedCorpus",
    tagset: TagSet | None = None,
    k_trans: float = 0.01,
    k_emit: float = 0.1,
) -> HmmModel:
    """Estimate transition, emission and suffix statistics from a tagged corpus.

    Transitions cover sentence-start -> first tag and tag -> tag within a
    sentence, add-k smoothed over the full tag set. Emissions are add-k
    smoothed against vocabulary + UNK. The suffix model is built from
    tokens whose lowercased surface occurs at most twice in training.
    """
    tagset = tagset or TagSet.default()
    sentences = corpus.sentences
    if not sentences:
        raise EmptyCorpus("cannot train on an empty corpus")

    trans_counts: dict[tuple[str, str], int] = {}
    prev_totals: dict[str, int] = {}
    emit_counts: dict[tuple[str, str], int] = {}
    tag_totals: dict[str, int] = {}
    key_counts: dict[str, int] = {}

    for line_no, sentence in enumerate(sentences, start=1):
        prev = SENT_START
        for surface, tag in sentence:
            if tag not in tagset:
                raise UnknownTag(line_no, tag)
            key = emission_key(surface)
            trans_counts[(prev, tag)] = trans_counts.get((prev, tag), 0) + 1
            prev_totals[prev] = prev_totals.get(prev, 0) + 1
            emit_counts[(tag, key)] = emit_counts.get((tag, key), 0) + 1
            tag_totals[tag] = tag_totals.get(tag, 0) + 1
            key_counts[key] = key_counts.get(key, 0) + 1
            prev = tag

    tags = tagset.tags
    n_tags = len(tags)
    transition_logprob: dict[tuple[str, str], float] = {}
    for prev in (SENT_START,) + tags:
        total = prev_totals.get(prev, 0)
        denominator = total + k_trans * n_tags
        for tag in tags:
            if denominator > 0:
                p = (trans_counts.get((prev, tag), 0) + k_trans) / denominator
            else:
                p = 1.0 / n_tags
            transition_logprob[(prev, tag)] = math.log(p) if p > 0 else NEG_INF

    vocabulary = frozenset(key_counts)
    v_size = len(vocabulary)
    emission_logprob: dict[tuple[str, str], float] = {}
    emission_default: dict[str, float] = {}
    for tag in tags:
        total = tag_totals.get(tag, 0)
        denominator = total + k_emit * (v_size + 1)
        if denominator > 0:
            default = k_emit / denominator
        else:
            default = 1.0 / (v_size + 1)
        emission_default[tag] = math.log(default) if default > 0 else NEG_INF
    for (tag, key), count in emit_counts.items():
        denominator = tag_totals[tag] + k_emit * (v_size + 1)
        emission_logprob[(tag, key)] = math.log((count + k_emit) / denominator)

    # Suffix statistics over rare tokens: log P(tag | feature).
    suffix_tag_feature: dict[tuple[str, str], int] = {}
    feature_totals: dict[str, int] = {}
    for sentence in sentences:
        for surface, tag in sentence:
            key = emission_key(surface)
            if key_counts[key] > 2 or PLACEHOLDER_RE.fullmatch(surface):
                continue
            for feat in suffix_features(surface):
                suffix_tag_feature[(tag, feat)] = suffix_tag_feature.get((tag, feat), 0) + 1
                feature_totals[feat] = feature_totals.get(feat, 0) + 1
    suffix_logprob = {
        (tag, feat): math.log(count) - math.log(feature_totals[feat])
        for (tag, feat), count in suffix_tag_feature.items()
    }

    return HmmModel(
        tagset=tagset,
        transition_logprob=transition_logprob,
        emission_logprob=emission_logprob,
        emission_default=emission_default,
        suffix_logprob=suffix_logprob,
        vocabulary=vocabulary,
        k_trans=k_trans,
        k_emit=k_emit,
    )


def suffix_posterior(model: HmmModel, surface: str) -> dict[str, float]:
    """Posterior over tags for an out-of-vocabulary surface.

    Per-feature posteriors P(tag | feature) from the rare-token statistics
    are multiplied over the features present in the suffix model; with no
    matching statistics (or a zero product everywhere) the posterior is
    uniform.
    """
    tags = model.tagset.tags
    feats = [f for f in suffix_features(surface) if f in model._known_suffix_features]
    if not feats:
        return {tag: 1.0 / len(tags) for tag in tags}
    scores: dict[str, float] = {}
    for tag in tags:
        logp = 0.0
        for feat in feats:
            term = model.suffix_logprob.get((tag, feat))
            if term is None:
                logp = NEG_INF
                break
            logp += term
        scores[tag] = logp
    top = max(scores.values())
    if top == NEG_INF:
        return {tag: 1.0 / len(tags) for tag in tags}
    total = sum(math.exp(lp - top) for lp in scores.values() if lp > NEG_INF)
    return {
        tag: (math.exp(lp - top) / total if lp > NEG_INF else 0.0)
        for tag, lp in scores.items()
    }


def propose_unknown_tag(model: HmmModel, surface: str) -> tuple[str, float]:
    """Most likely tag for an unknown surface with its posterior confidence."""
    if model.knows(surface):
        raise KnownToken(surface)
    posterior = suffix_posterior(model, surface)
    best_tag = model.tagset.tags[0]
    best_p = posterior[best_tag]
    for tag in model.tagset.tags[1:]:
        if posterior[tag] > best_p:
            best_tag, best_p = tag, posterior[tag]
    return best_tag, best_p


def _emission_column(model: HmmModel, token: Token | TaggedToken) -> list[float]:
    """Emission log scores for one token, ordered by tag-set index."""
    tags = model.tagset.tags
    if token.kind == FORMULA:
        formula = model.tagset.formula_tag
        return [0.0 if tag == formula else NEG_INF for tag in tags]
    key = emission_key(token.surface)
    if key in model.vocabulary:
        lookup = model.emission_logprob
        defaults = model.emission_default
        return [lookup.get((tag, key), defaults[tag]) for tag in tags]
    posterior = suffix_posterior(model, token.surface)
    return [math.log(posterior[tag]) if posterior[tag] > 0 else NEG_INF for tag in tags]


def viterbi_decode(model: HmmModel, tokens: Sequence[Token | TaggedToken]) -> list[tuple[str, float]]:
    """Best tag sequence under the bigram model, as (tag, cumulative log score).

    Formula tokens are constrained to the formula tag. Score ties are
    broken toward the lower tag index in tag-set order, both when choosing
    a predecessor cell and when choosing the final tag, which makes the
    decoded sequence unique.
    """
    if not tokens:
        raise ValueError("token list must be non-empty")
    tags = model.tagset.tags
    n_tags = len(tags)
    trans = model.transition_logprob
    start_row = [trans[(SENT_START, tag)] for tag in tags]
    cols = [[trans[(prev, tag)] for prev in tags] for tag in tags]

    emit = _emission_column(model, tokens[0])
    delta = [start_row[t] + emit[t] for t in range(n_tags)]
    deltas = [delta]
    backptr: list[list[int]] = []

    for token in tokens[1:]:
        emit = _emission_column(model, token)
        prev_delta = delta
        delta = [NEG_INF] * n_tags
        pointers = [0] * n_tags
        for t in range(n_tags):
            col = cols[t]
            best_prev = 0
            best_score = prev_delta[0] + col[0]
            for p in range(1, n_tags):
                score = prev_delta[p] + col[p]
                if score > best_score:
                    best_prev, best_score = p, score
            delta[t] = best_score + emit[t]
            pointers[t] = best_prev
        deltas.append(delta)
        backptr.append(pointers)

    best = 0
    for t in range(1, n_tags):
        if delta[t] > delta[best]:
            best = t
    path = [best]
    for pointers in reversed(backptr):
        path.append(pointers[path[-1]])
    path.reverse()

    return [(tags[t], deltas[i][t]) for i, t in enumerate(path)]


def tag_document(
    model: HmmModel, sentences: Iterable[Sequence[Token]]
) -> list[list[TaggedToken]]:
    """Decode each sentence independently and pair tokens with their tags."""
    tagged: list[list[TaggedToken]] = []
    for sentence in sentences:
        if not sentence:
            tagged.append([])
            continue
        decoded = viterbi_decode(model, sentence)
        tagged.append(
            [
                TaggedToken(surface=tok.surface, span=tok.span, kind=tok.kind, tag=tag)
                for tok, (tag, _) in zip(sentence, decoded)
            ]
        )
    return tagged


# ---------------------------------------------------------------------------
# Persistence: versioned TAB-separated text with 17-significant-digit floats.
# ---------------------------------------------------------------------------

_HMM_HEADER = "HMM v1"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def save_hmm(model: HmmModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"{_HMM_HEADER}\n")
        handle.write("META\n")
        handle.write(f"k_trans\t{_fmt(model.k_trans)}\n")
        handle.write(f"k_emit\t{_fmt(model.k_emit)}\n")
        handle.write(f"formula_tag\t{model.tagset.formula_tag}\n")
        handle.write("TAGS\n")
        for tag in model.tagset.tags:
            handle.write(f"{tag}\n")
        handle.write("TRANS\n")
        for (prev, tag), logp in model.transition_logprob.items():
            handle.write(f"{prev}\t{tag}\t{_fmt(logp)}\n")
        handle.write("EMIT\n")
        for (tag, key), logp in model.emission_logprob.items():
            handle.write(f"{tag}\t{key}\t{_fmt(logp)}\n")
        for tag, logp in model.emission_default.items():
            handle.write(f"{tag}\t{UNK}\t{_fmt(logp)}\n")
        handle.write("SUFFIX\n")
        for (tag, feat), logp in model.suffix_logprob.items():
            handle.write(f"{tag}\t{feat}\t{_fmt(logp)}\n")
        handle.write("END\n")


class _SectionReader:
    """Line reader tracking byte offsets for corruption reports."""

    def __init__(self, path: Path):
        self.path = path
        with open(path, "rb") as handle:
            self.raw = handle.read()
        self.offset = 0
        self.line_start = 0

    def lines(self):
        for raw_line in self.raw.split(b"\n"):
            self.line_start = self.offset
            self.offset += len(raw_line) + 1
            try:
                yield raw_line.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise CorruptFile(self.line_start, "not valid UTF-8") from exc


def load_hmm(path: str | Path) -> HmmModel:
    path = Path(path)
    reader = _SectionReader(path)
    lines = reader.lines()
    header = next(lines, None)
    if header != _HMM_HEADER:
        if header is not None and header.startswith("HMM v"):
            raise VersionMismatch(_HMM_HEADER, header)
        raise CorruptFile(0, f"bad header {header!r}")

    sections = {"META", "TAGS", "TRANS", "EMIT", "SUFFIX", "END"}
    meta: dict[str, str] = {}
    tags: list[str] = []
    transition: dict[tuple[str, str], float] = {}
    emission: dict[tuple[str, str], float] = {}
    emission_default: dict[str, float] = {}
    suffix: dict[tuple[str, str], float] = {}
    section = None
    finished = False
    for line in lines:
        if finished:
            break
        if line in sections:
            if line == "END":
                finished = True
                continue
            section = line
            continue
        if not line:
            continue
        try:
            if section == "META":
                key, value = line.split("\t")
                meta[key] = value
            elif section == "TAGS":
                tags.append(line)
            elif section == "TRANS":
                prev, tag, logp = line.split("\t")
                transition[(prev, tag)] = float(logp)
            elif section == "EMIT":
                tag, key, logp = line.split("\t")
                if key == UNK:
                    emission_default[tag] = float(logp)
                else:
                    emission[(tag, key)] = float(logp)
            elif section == "SUFFIX":
                tag, feat, logp = line.split("\t")
                suffix[(tag, feat)] = float(logp)
            else:
                raise CorruptFile(reader.line_start, f"row outside any section: {line!r}")
        except (ValueError, KeyError) as exc:
            raise CorruptFile(reader.line_start, f"bad row {line!r}") from exc
    if not finished:
        raise CorruptFile(reader.offset, "missing END marker (truncated file?)")
    if not tags or "k_trans" not in meta or "k_emit" not in meta:
        raise CorruptFile(0, "incomplete model")

    tagset = TagSet(tags=tuple(tags), formula_tag=meta.get("formula_tag", FORMULA_TAG))
    vocabulary = frozenset(key for (_, key) in emission)
    return HmmModel(
        tagset=tagset,
        transition_logprob=transition,
        emission_logprob=emission,
        emission_default=emission_default,
        suffix_logprob=suffix,
        vocabulary=vocabulary,
        k_trans=float(meta["k_trans"]),
        k_emit=float(meta["k_emit"]),
    )
