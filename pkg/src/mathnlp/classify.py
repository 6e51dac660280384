"""Top-level MSC classification: multinomial Naive Bayes and one-vs-rest
linear SVMs over sparse bag-of-feature vectors.

Features come either from case-folded word tokens (formula placeholders
collapse to a single ``__FORMULA__`` feature) or from normalized key
phrases. Both trainers persist their feature index with the model, and
prediction always runs against a frozen index.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from mathnlp.errors import (
    CorruptFile,
    EmptyCorpus,
    EmptyTestSet,
    NonPositiveAlpha,
    SingleClassCorpus,
    VersionMismatch,
)
from mathnlp.phrases import KeyPhraseCandidate
from mathnlp.textprep import FORMULA, Token, WORD

FORMULA_FEATURE = "__FORMULA__"
UNK_ID = -1

SOURCE_TOKENS = "tokens"
SOURCE_KEYPHRASES = "keyphrases"


class FeatureIndex:
    """Bidirectional feature-string <-> integer-id map.

    Unknown features map to :data:`UNK_ID` once the index is frozen at
    prediction time.
    """

    def __init__(self, features: Iterable[str] = ()):
        self._by_name: dict[str, int] = {}
        self._names: list[str] = []
        for name in features:
            self.add(name)

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def add(self, name: str) -> int:
        fid = self._by_name.get(name)
        if fid is None:
            fid = len(self._names)
            self._by_name[name] = fid
            self._names.append(name)
        return fid

    def lookup(self, name: str, frozen: bool) -> int:
        fid = self._by_name.get(name)
        if fid is not None:
            return fid
        if frozen:
            return UNK_ID
        return self.add(name)

    def name_of(self, fid: int) -> str:
        return self._names[fid]


@dataclass(frozen=True)
class FeatureVector:
    counts: dict[int, int]
    source: str


def featurize(doc, source: str, index: FeatureIndex, frozen: bool) -> FeatureVector:
    """Build a sparse count vector from an analyzed document.

    ``doc`` is an iterable of tokens for ``source="tokens"`` (word tokens
    are counted case-folded, formula tokens as ``__FORMULA__``, everything
    else skipped) or an iterable of key-phrase candidates for
    ``source="keyphrases"`` (each counted at its corpus frequency).
    """
    counts: dict[int, int] = {}
    if source == SOURCE_TOKENS:
        for token in doc:
            if token.kind == WORD:
                name = token.surface.casefold()
            elif token.kind == FORMULA:
                name = FORMULA_FEATURE
            else:
                continue
            fid = index.lookup(name, frozen)
            counts[fid] = counts.get(fid, 0) + 1
    elif source == SOURCE_KEYPHRASES:
        for candidate in doc:
            fid = index.lookup(candidate.normalized, frozen)
            counts[fid] = counts.get(fid, 0) + candidate.frequency
    else:
        raise ValueError(f"unknown feature source {source!r}")
    return FeatureVector(counts=counts, source=source)


@dataclass(frozen=True)
class ClassProposal:
    method: str
    ranked: tuple[tuple[str, float], ...]


@dataclass
class NaiveBayesModel:
    classes: tuple[str, ...]
    log_prior: dict[str, float]
    log_likelihood: dict[tuple[str, int], float]
    log_default: dict[str, float]  # per class, for unseen features and UNK
    vocabulary_size: int
    alpha: float
    feature_index: FeatureIndex
    source: str


def train_naive_bayes(
    corpus: Sequence[tuple[FeatureVector, Iterable[str]]],
    alpha: float,
    index: FeatureIndex,
    source: str = SOURCE_TOKENS,
) -> NaiveBayesModel:
    """Multinomial NB with Laplace-style add-alpha smoothing.

    A document with several labels contributes one training instance per
    label. The smoothing denominator uses vocabulary size + 1, the extra
    slot covering unknown features at prediction time.
    """
    if not corpus:
        raise EmptyCorpus("cannot train Naive Bayes on an empty corpus")
    if alpha <= 0:
        raise NonPositiveAlpha(f"alpha must be positive, got {alpha}")

    class_counts: dict[str, int] = {}
    feature_counts: dict[tuple[str, int], int] = {}
    class_totals: dict[str, int] = {}
    total_instances = 0
    for vector, labels in corpus:
        for label in sorted(set(labels)):
            total_instances += 1
            class_counts[label] = class_counts.get(label, 0) + 1
            for fid, count in vector.counts.items():
                feature_counts[(label, fid)] = feature_counts.get((label, fid), 0) + count
                class_totals[label] = class_totals.get(label, 0) + count

    classes = tuple(sorted(class_counts))
    v_size = len(index)
    log_prior = {c: math.log(class_counts[c] / total_instances) for c in classes}
    log_default = {}
    log_likelihood = {}
    for c in classes:
        denominator = class_totals.get(c, 0) + alpha * (v_size + 1)
        log_default[c] = math.log(alpha / denominator)
    for (c, fid), count in feature_counts.items():
        denominator = class_totals[c] + alpha * (v_size + 1)
        log_likelihood[(c, fid)] = math.log((count + alpha) / denominator)

    return NaiveBayesModel(
        classes=classes,
        log_prior=log_prior,
        log_likelihood=log_likelihood,
        log_default=log_default,
        vocabulary_size=v_size,
        alpha=alpha,
        feature_index=index,
        source=source,
    )


def predict_naive_bayes(model: NaiveBayesModel, x: FeatureVector) -> ClassProposal:
    """Posterior over classes, computed in log space and normalized."""
    scores = {}
    for c in model.classes:
        total = model.log_prior[c]
        default = model.log_default[c]
        for fid, count in x.counts.items():
            total += count * model.log_likelihood.get((c, fid), default)
        scores[c] = total
    top = max(scores.values())
    norm = top + math.log(sum(math.exp(s - top) for s in scores.values()))
    posterior = {c: math.exp(s - norm) for c, s in scores.items()}
    ranked = tuple(sorted(posterior.items(), key=lambda item: (-item[1], item[0])))
    return ClassProposal(method="nb", ranked=ranked)


@dataclass
class LinearSvmModel:
    classes: tuple[str, ...]
    weights: dict[str, dict[int, float]]
    biases: dict[str, float]
    lambda_reg: float
    epochs: int
    seed: int
    feature_index: FeatureIndex
    source: str
    objective_history: dict[str, list[float]] = field(default_factory=dict)


def _hinge_objective(
    w: dict[int, float],
    b: float,
    lambda_reg: float,
    examples: Sequence[tuple[dict[int, int], int]],
) -> float:
    """Regularized hinge loss: lambda/2 * ||w||^2 + mean hinge over examples."""
    reg = 0.5 * lambda_reg * sum(v * v for v in w.values())
    hinge = 0.0
    for counts, y in examples:
        margin = y * (sum(w.get(f, 0.0) * c for f, c in counts.items()) + b)
        hinge += max(0.0, 1.0 - margin)
    return reg + hinge / len(examples)


def train_linear_svm(
    corpus: Sequence[tuple[FeatureVector, Iterable[str]]],
    lambda_reg: float,
    epochs: int,
    seed: int,
    index: FeatureIndex,
    source: str = SOURCE_TOKENS,
) -> LinearSvmModel:
    """One-vs-rest linear SVMs trained by stochastic sub-gradient descent.

    Each class is a binary hinge-loss problem (its documents +1, the rest
    -1) with step size 1/(lambda*t) over a seed-determined shuffle; the
    final weights are the average over all update steps. The bias is not
    regularized. Identical seed and corpus give bit-identical weights.
    """
    if not corpus:
        raise EmptyCorpus("cannot train an SVM on an empty corpus")
    labels_per_doc = [frozenset(labels) for _, labels in corpus]
    classes = tuple(sorted(set().union(*labels_per_doc)))
    if len(classes) < 2:
        raise SingleClassCorpus("SVM training needs at least 2 distinct labels")

    n = len(corpus)
    rng = random.Random(seed)
    orders = []
    for _ in range(epochs):
        order = list(range(n))
        rng.shuffle(order)
        orders.append(order)

    weights: dict[str, dict[int, float]] = {}
    biases: dict[str, float] = {}
    history: dict[str, list[float]] = {}

    for cls in classes:
        examples = [
            (corpus[i][0].counts, 1 if cls in labels_per_doc[i] else -1) for i in range(n)
        ]
        w: dict[int, float] = {}
        b = 0.0
        sum_w: dict[int, float] = {}
        sum_b = 0.0
        t = 0
        per_epoch: list[float] = []
        for order in orders:
            for i in order:
                t += 1
                eta = 1.0 / (lambda_reg * t)
                counts, y = examples[i]
                margin = y * (sum(w.get(f, 0.0) * c for f, c in counts.items()) + b)
                decay = 1.0 - eta * lambda_reg
                for f in w:
                    w[f] *= decay
                if margin < 1.0:
                    for f, c in counts.items():
                        w[f] = w.get(f, 0.0) + eta * y * c
                    b += eta * y
                for f, v in w.items():
                    sum_w[f] = sum_w.get(f, 0.0) + v
                sum_b += b
            avg_w = {f: v / t for f, v in sum_w.items()}
            per_epoch.append(_hinge_objective(avg_w, sum_b / t, lambda_reg, examples))
        weights[cls] = {f: v / t for f, v in sum_w.items() if v != 0.0}
        biases[cls] = sum_b / t
        history[cls] = per_epoch

    return LinearSvmModel(
        classes=classes,
        weights=weights,
        biases=biases,
        lambda_reg=lambda_reg,
        epochs=epochs,
        seed=seed,
        feature_index=index,
        source=source,
        objective_history=history,
    )


def predict_linear_svm(model: LinearSvmModel, x: FeatureVector) -> ClassProposal:
    """Raw decision margins per class, highest first; no calibration."""
    ranked = []
    for cls in model.classes:
        w = model.weights[cls]
        margin = sum(w.get(f, 0.0) * c for f, c in x.counts.items()) + model.biases[cls]
        ranked.append((cls, margin))
    ranked.sort(key=lambda item: (-item[1], item[0]))
    return ClassProposal(method="sv", ranked=tuple(ranked))


def predict(model, x: FeatureVector) -> ClassProposal:
    if isinstance(model, NaiveBayesModel):
        return predict_naive_bayes(model, x)
    if isinstance(model, LinearSvmModel):
        return predict_linear_svm(model, x)
    raise TypeError(f"not a classifier model: {type(model)!r}")


@dataclass(frozen=True)
class EvaluationMetrics:
    n_documents: int
    k: int
    top1_accuracy: float
    precision_at_k: float
    recall_at_k: float
    per_class: dict[str, dict[str, int]]


def evaluate(model, test_set: Sequence[tuple[FeatureVector, Iterable[str]]], k: int) -> EvaluationMetrics:
    """Top-1 accuracy plus precision/recall at ``k`` (clamped to the class count).

    A document counts as top-1 correct when the top-ranked class is in its
    label set. Per-class counts report gold labels, top-1 predictions and
    top-1 hits.
    """
    if not test_set:
        raise EmptyTestSet("cannot evaluate on an empty test set")
    k_eff = max(1, min(k, len(model.classes)))
    per_class = {
        c: {"gold": 0, "predicted_top1": 0, "correct_top1": 0} for c in model.classes
    }
    top1_hits = 0
    precision_sum = 0.0
    recall_sum = 0.0
    for vector, labels in test_set:
        labels = set(labels)
        proposal = predict(model, vector)
        top = proposal.ranked[0][0]
        top_k = {code for code, _ in proposal.ranked[:k_eff]}
        hit = top in labels
        top1_hits += hit
        relevant = top_k & labels
        precision_sum += len(relevant) / k_eff
        if labels:
            recall_sum += len(relevant) / len(labels)
        for label in labels:
            if label in per_class:
                per_class[label]["gold"] += 1
        if top in per_class:
            per_class[top]["predicted_top1"] += 1
            if hit:
                per_class[top]["correct_top1"] += 1
    n = len(test_set)
    return EvaluationMetrics(
        n_documents=n,
        k=k_eff,
        top1_accuracy=top1_hits / n,
        precision_at_k=precision_sum / n,
        recall_at_k=recall_sum / n,
        per_class=per_class,
    )


# ---------------------------------------------------------------------------
# Persistence (same conventions as the HMM format).
# ---------------------------------------------------------------------------

_NB_HEADER = "NB v1"
_SVM_HEADER = "SVM v1"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def save_naive_bayes(model: NaiveBayesModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"{_NB_HEADER}\n")
        handle.write("META\n")
        handle.write(f"alpha\t{_fmt(model.alpha)}\n")
        handle.write(f"source\t{model.source}\n")
        handle.write(f"vocabulary_size\t{model.vocabulary_size}\n")
        handle.write("FEATURES\n")
        for fid, name in enumerate(model.feature_index.names):
            handle.write(f"{fid}\t{name}\n")
        handle.write("CLASSES\n")
        for c in model.classes:
            handle.write(f"{c}\t{_fmt(model.log_prior[c])}\t{_fmt(model.log_default[c])}\n")
        handle.write("LIK\n")
        for (c, fid), logp in model.log_likelihood.items():
            handle.write(f"{c}\t{fid}\t{_fmt(logp)}\n")
        handle.write("END\n")


def save_linear_svm(model: LinearSvmModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"{_SVM_HEADER}\n")
        handle.write("META\n")
        handle.write(f"lambda\t{_fmt(model.lambda_reg)}\n")
        handle.write(f"epochs\t{model.epochs}\n")
        handle.write(f"seed\t{model.seed}\n")
        handle.write(f"source\t{model.source}\n")
        handle.write("FEATURES\n")
        for fid, name in enumerate(model.feature_index.names):
            handle.write(f"{fid}\t{name}\n")
        handle.write("CLASSES\n")
        for c in model.classes:
            handle.write(f"{c}\t{_fmt(model.biases[c])}\n")
        handle.write("W\n")
        for c in model.classes:
            for fid, value in model.weights[c].items():
                handle.write(f"{c}\t{fid}\t{_fmt(value)}\n")
        handle.write("END\n")


def _read_sectioned(path: Path, header: str, section_names: set[str]):
    """Yield (section, row, byte_offset) for a versioned TAB-separated file."""
    with open(path, "rb") as handle:
        raw = handle.read()
    offset = 0
    section = None
    first = True
    finished = False
    for raw_line in raw.split(b"\n"):
        line_start = offset
        offset += len(raw_line) + 1
        try:
            line = raw_line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptFile(line_start, "not valid UTF-8") from exc
        if first:
            if line != header:
                if line.startswith(header.split(" ")[0] + " v"):
                    raise VersionMismatch(header, line)
                raise CorruptFile(0, f"bad header {line!r}")
            first = False
            continue
        if finished:
            continue
        if line in section_names:
            if line == "END":
                finished = True
                continue
            section = line
            continue
        if not line:
            continue
        if section is None:
            raise CorruptFile(line_start, f"row outside any section: {line!r}")
        yield section, line, line_start
    if first:
        raise CorruptFile(0, "empty file")
    if not finished:
        raise CorruptFile(len(raw), "missing END marker (truncated file?)")


def load_naive_bayes(path: str | Path) -> NaiveBayesModel:
    path = Path(path)
    meta: dict[str, str] = {}
    features: list[str] = []
    classes: list[str] = []
    log_prior: dict[str, float] = {}
    log_default: dict[str, float] = {}
    log_likelihood: dict[tuple[str, int], float] = {}
    for section, line, start in _read_sectioned(path, _NB_HEADER, {"META", "FEATURES", "CLASSES", "LIK", "END"}):
        try:
            if section == "META":
                key, value = line.split("\t")
                meta[key] = value
            elif section == "FEATURES":
                fid, name = line.split("\t", 1)
                if int(fid) != len(features):
                    raise ValueError("feature ids out of order")
                features.append(name)
            elif section == "CLASSES":
                c, prior, default = line.split("\t")
                classes.append(c)
                log_prior[c] = float(prior)
                log_default[c] = float(default)
            elif section == "LIK":
                c, fid, logp = line.split("\t")
                log_likelihood[(c, int(fid))] = float(logp)
        except ValueError as exc:
            raise CorruptFile(start, f"bad row {line!r}") from exc
    if not classes or "alpha" not in meta:
        raise CorruptFile(0, "incomplete model")
    return NaiveBayesModel(
        classes=tuple(classes),
        log_prior=log_prior,
        log_likelihood=log_likelihood,
        log_default=log_default,
        vocabulary_size=int(meta.get("vocabulary_size", len(features))),
        alpha=float(meta["alpha"]),
        feature_index=FeatureIndex(features),
        source=meta.get("source", SOURCE_TOKENS),
    )


def load_linear_svm(path: str | Path) -> LinearSvmModel:
    path = Path(path)
    meta: dict[str, str] = {}
    features: list[str] = []
    classes: list[str] = []
    biases: dict[str, float] = {}
    weights: dict[str, dict[int, float]] = {}
    for section, line, start in _read_sectioned(path, _SVM_HEADER, {"META", "FEATURES", "CLASSES", "W", "END"}):
        try:
            if section == "META":
                key, value = line.split("\t")
                meta[key] = value
            elif section == "FEATURES":
                fid, name = line.split("\t", 1)
                if int(fid) != len(features):
                    raise ValueError("feature ids out of order")
                features.append(name)
            elif section == "CLASSES":
                c, bias = line.split("\t")
                classes.append(c)
                biases[c] = float(bias)
                weights[c] = {}
            elif section == "W":
                c, fid, value = line.split("\t")
                weights[c][int(fid)] = float(value)
        except (ValueError, KeyError) as exc:
            raise CorruptFile(start, f"bad row {line!r}") from exc
    if len(classes) < 2 or "lambda" not in meta:
        raise CorruptFile(0, "incomplete model")
    return LinearSvmModel(
        classes=tuple(classes),
        weights=weights,
        biases=biases,
        lambda_reg=float(meta["lambda"]),
        epochs=int(meta.get("epochs", 0)),
        seed=int(meta.get("seed", 0)),
        feature_index=FeatureIndex(features),
        source=meta.get("source", SOURCE_TOKENS),
    )
