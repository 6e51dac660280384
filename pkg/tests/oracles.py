"""Independent reference implementations used to check the fast paths.

Everything here favors obviousness over speed: exhaustive enumeration for
Viterbi, a recursive matcher for tag patterns, and exact rational
arithmetic for Bayes posteriors. None of it shares code with the package
beyond plain data types.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from mathnlp.phrases import ONE, ONE_OR_MORE, OPTIONAL, TagPattern, ZERO_OR_MORE
from mathnlp.tagger import TaggedToken


def viterbi_exhaustive(
    n_tags: int,
    start_scores: list[float],
    trans_scores: list[list[float]],  # trans_scores[prev][cur]
    emit_scores: list[list[float]],  # emit_scores[position][tag]
) -> tuple[list[int], float]:
    """Argmax tag sequence by trying every assignment.

    Ties are resolved toward the sequence whose reversed index tuple is
    smallest, i.e. the lowest tag index wins at the last position first.
    Score accumulation is ordered exactly like the decoder's
    ((prev + transition) + emission) so float ties agree bit for bit.
    """
    n = len(emit_scores)
    best_seq: tuple[int, ...] | None = None
    best_score = float("-inf")
    for seq in itertools.product(range(n_tags), repeat=n):
        score = start_scores[seq[0]]
        score = score + emit_scores[0][seq[0]]
        for i in range(1, n):
            score = score + trans_scores[seq[i - 1]][seq[i]]
            score = score + emit_scores[i][seq[i]]
        if best_seq is None or score > best_score or (
            score == best_score and tuple(reversed(seq)) < tuple(reversed(best_seq))
        ):
            best_seq = seq
            best_score = score
    assert best_seq is not None
    return list(best_seq), best_score


def _pattern_match_ends(pattern: TagPattern, sentence, start: int) -> set[int]:
    """All positions where a full match of ``pattern`` starting at ``start`` can end."""

    def matches(element, token) -> bool:
        if token.tag not in element.tag_ids:
            return False
        return element.surface is None or token.surface.lower() == element.surface

    def go(element_idx: int, pos: int) -> set[int]:
        if element_idx == len(pattern.elements):
            return {pos}
        element = pattern.elements[element_idx]
        ends: set[int] = set()
        if element.repeat in (OPTIONAL, ZERO_OR_MORE):
            ends |= go(element_idx + 1, pos)
        p = pos
        while p < len(sentence) and matches(element, sentence[p]):
            p += 1
            ends |= go(element_idx + 1, p)
            if element.repeat in (ONE, OPTIONAL):
                break
        return ends

    return go(0, start)


def chunk_oracle(sentence: list[TaggedToken], patterns: list[TagPattern]) -> list[tuple[int, int]]:
    """Greedy longest-match chunking via the recursive matcher."""
    ranges: list[tuple[int, int]] = []
    i = 0
    while i < len(sentence):
        best = 0
        for pattern in patterns:
            ends = _pattern_match_ends(pattern, sentence, i)
            length = max((e - i for e in ends), default=0)
            if length > best:
                best = length
        if best:
            ranges.append((i, i + best))
            i += best
        else:
            i += 1
    return ranges


def bayes_exact(
    docs: list[tuple[dict[int, int], set[str]]],
    alpha: Fraction,
    vocabulary_size: int,
    x: dict[int, int],
) -> dict[str, Fraction]:
    """Exact multinomial NB posterior via rational arithmetic.

    Documents contribute one instance per label; smoothing denominators
    use vocabulary_size + 1 with the extra slot standing in for unknown
    features (feature id -1 or any id unseen for the class).
    """
    instances: list[tuple[dict[int, int], str]] = []
    for counts, labels in docs:
        for label in sorted(labels):
            instances.append((counts, label))
    classes = sorted({label for _, label in instances})

    joint: dict[str, Fraction] = {}
    for cls in classes:
        members = [counts for counts, label in instances if label == cls]
        prior = Fraction(len(members), len(instances))
        class_total = sum(sum(counts.values()) for counts in members)
        denominator = class_total + alpha * (vocabulary_size + 1)

        def likelihood(fid: int) -> Fraction:
            seen = sum(counts.get(fid, 0) for counts in members)
            return (seen + alpha) / denominator

        score = prior
        for fid, count in x.items():
            if 0 <= fid < vocabulary_size:
                score *= likelihood(fid) ** count
            else:
                score *= (alpha / denominator) ** count
        joint[cls] = score

    total = sum(joint.values())
    return {cls: score / total for cls, score in joint.items()}
