"""Text preparation: TeX formula masking, sentence segmentation, tokenization.

Formulae delimited by ``$...$``, ``$$...$$``, ``\\(...\\)`` or ``\\[...\\]``
are replaced by synthetic noun-like placeholders (``MATHF0``, ``MATHF1``,
...) so that downstream tagging and chunking can treat them as ordinary
tokens. Masking is lossless: :func:`unmask` restores the original text
byte-exactly.

All spans in this module are half-open ``(start, end)`` offsets into the
UTF-8 byte encoding of the text they refer to.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from mathnlp.errors import UnbalancedDelimiter

# Token kinds.
WORD = "word"
NUMBER = "number"
PUNCTUATION = "punctuation"
FORMULA = "formula"
SYMBOL = "symbol"

DEFAULT_PLACEHOLDER_BASE = "MATHF"

# Placeholders as they may appear in any text, regardless of the collision
# prefix chosen at masking time.
PLACEHOLDER_RE = re.compile(r"Q*MATHF\d+")

# Abbreviations that suppress a sentence boundary after their period.
ABBREVIATIONS = ("e.g.", "i.e.", "cf.", "prof.", "dr.", "et al.")


@dataclass(frozen=True)
class FormulaEntry:
    placeholder: str
    tex_source: str
    original_span: tuple[int, int]  # byte span in the original text
    masked_span: tuple[int, int]  # byte span of the placeholder in the masked text


@dataclass(frozen=True)
class MaskedText:
    text: str
    formula_table: tuple[FormulaEntry, ...]
    placeholder_base: str = DEFAULT_PLACEHOLDER_BASE


@dataclass(frozen=True)
class Token:
    surface: str
    span: tuple[int, int]
    kind: str


def _byte_prefix(text: str) -> list[int]:
    """Cumulative UTF-8 byte offset for every character position."""
    offsets = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets


def _choose_placeholder_base(text: str) -> str:
    base = DEFAULT_PLACEHOLDER_BASE
    while re.search(re.escape(base) + r"\d", text):
        base = "Q" + base
    return base


def _find_dollar(text: str, start: int) -> int:
    """Index of the next unescaped ``$`` at or after ``start``, or -1."""
    i = start
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\\":
            i += 2
        elif ch == "$":
            return i
        else:
            i += 1
    return -1


def _find_double_dollar(text: str, start: int) -> int:
    i = start
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\\":
            i += 2
        elif ch == "$" and i + 1 < n and text[i + 1] == "$":
            return i
        else:
            i += 1
    return -1


def mask_formulae(text: str) -> MaskedText:
    """Replace each maximal TeX math segment with a placeholder token.

    Scanning is left-to-right and non-nesting: the first matching closing
    delimiter ends a segment. ``\\$`` escapes a literal dollar sign. If the
    literal placeholder pattern already occurs in the input, placeholders
    gain a ``Q`` prefix until they cannot collide.

    Raises :class:`UnbalancedDelimiter` with the byte offset of an opener
    that has no closing delimiter.
    """
    base = _choose_placeholder_base(text)
    bpos = _byte_prefix(text)
    parts: list[str] = []
    table: list[FormulaEntry] = []
    out_bytes = 0  # byte length of the masked text built so far
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        open_at = i
        close_end = -1  # char index one past the closing delimiter
        if ch == "$":
            if i + 1 < n and text[i + 1] == "$":
                at = _find_double_dollar(text, i + 2)
                if at >= 0:
                    close_end = at + 2
            else:
                at = _find_dollar(text, i + 1)
                if at >= 0:
                    close_end = at + 1
            if close_end < 0:
                raise UnbalancedDelimiter(bpos[open_at])
        elif ch == "\\" and i + 1 < n and text[i + 1] in "([":
            closer = "\\)" if text[i + 1] == "(" else "\\]"
            at = text.find(closer, i + 2)
            if at < 0:
                raise UnbalancedDelimiter(bpos[open_at])
            close_end = at + 2
        elif ch == "\\" and i + 1 < n:
            parts.append(text[i : i + 2])
            out_bytes += len(text[i : i + 2].encode("utf-8"))
            i += 2
            continue
        else:
            parts.append(ch)
            out_bytes += len(ch.encode("utf-8"))
            i += 1
            continue

        placeholder = f"{base}{len(table)}"
        segment = text[open_at:close_end]
        table.append(
            FormulaEntry(
                placeholder=placeholder,
                tex_source=segment,
                original_span=(bpos[open_at], bpos[close_end]),
                masked_span=(out_bytes, out_bytes + len(placeholder)),
            )
        )
        parts.append(placeholder)
        out_bytes += len(placeholder)
        i = close_end

    return MaskedText(text="".join(parts), formula_table=tuple(table), placeholder_base=base)


def unmask(masked: MaskedText) -> str:
    """Restore the original text byte-exactly."""
    if not masked.formula_table:
        return masked.text
    mapping = {entry.placeholder: entry.tex_source for entry in masked.formula_table}
    pattern = re.compile(re.escape(masked.placeholder_base) + r"\d+")
    return pattern.sub(lambda m: mapping[m.group()], masked.text)


def span_to_original(masked: MaskedText, span: tuple[int, int]) -> tuple[int, int]:
    """Map a byte span in the masked text back to the original text.

    A span endpoint inside a placeholder snaps outward so that the mapped
    span covers the whole TeX segment.
    """
    start, end = span

    def map_start(pos: int) -> int:
        shift = 0
        for entry in masked.formula_table:
            ms, me = entry.masked_span
            os_, oe = entry.original_span
            if pos <= ms:
                return pos + shift
            if pos < me:
                return os_
            shift = oe - me
        return pos + shift

    def map_end(pos: int) -> int:
        shift = 0
        for entry in masked.formula_table:
            ms, me = entry.masked_span
            os_, oe = entry.original_span
            if pos <= ms:
                return pos + shift
            if pos <= me:
                return oe
            shift = oe - me
        return pos + shift

    return (map_start(start), map_end(end))


def _is_abbreviation_end(text: str, period_idx: int) -> bool:
    """True if the period at ``period_idx`` terminates a guarded abbreviation."""
    prefix = text[: period_idx + 1]
    low = prefix.lower()
    for abbr in ABBREVIATIONS:
        if low.endswith(abbr):
            before = len(prefix) - len(abbr) - 1
            if before < 0 or not prefix[before].isalpha():
                return True
    # Single capital letter + period, e.g. initials in "A. N. Author".
    if len(prefix) >= 2 and prefix[-2].isupper() and prefix[-2].isalpha():
        if len(prefix) == 2 or not prefix[-3].isalpha():
            return True
    return False


_BOUNDARY_RE = re.compile(r"[.?!]")


def segment_sentences(masked_text: str) -> list[tuple[int, int]]:
    """Split masked text into sentence byte ranges.

    A boundary falls after ``.``, ``?`` or ``!`` followed by whitespace and
    an uppercase letter or digit, unless the period closes a guarded
    abbreviation. Ranges are trimmed to the non-whitespace extent of each
    sentence; text without any boundary is a single sentence.
    """
    bpos = _byte_prefix(masked_text)
    n = len(masked_text)
    starts = [0]
    for m in _BOUNDARY_RE.finditer(masked_text):
        idx = m.start()
        j = idx + 1
        if j >= n or not masked_text[j].isspace():
            continue
        while j < n and masked_text[j].isspace():
            j += 1
        if j >= n:
            continue
        nxt = masked_text[j]
        if not (nxt.isdigit() or (nxt.isalpha() and nxt.isupper())):
            continue
        if masked_text[idx] == "." and _is_abbreviation_end(masked_text, idx):
            continue
        starts.append(idx + 1)
    starts.append(n)

    ranges: list[tuple[int, int]] = []
    for k in range(len(starts) - 1):
        a, b = starts[k], starts[k + 1]
        while a < b and masked_text[a].isspace():
            a += 1
        while b > a and masked_text[b - 1].isspace():
            b -= 1
        if a < b:
            ranges.append((bpos[a], bpos[b]))
    return ranges


_DECIMAL = r"\d+\.\d+"
_WORDRUN = r"[^\W_]+(?:-[^\W_]+)*"
_TOKEN_RE = re.compile(rf"({_DECIMAL})|({_WORDRUN})|(\S)", re.UNICODE)
_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?")


def _char_kind(ch: str) -> str:
    return PUNCTUATION if unicodedata.category(ch).startswith("P") else SYMBOL


def tokenize(
    sentence_text: str,
    base_offset: int = 0,
    placeholder_base: str = DEFAULT_PLACEHOLDER_BASE,
) -> list[Token]:
    """Break one sentence of masked text into tokens.

    Words are maximal alphanumeric runs with internal hyphens kept intact,
    numbers are digit runs with an optional decimal point, placeholders
    become formula tokens, and any other non-space character is a
    single-character punctuation or symbol token. ``base_offset`` is added
    to every byte span so spans index into the full masked document.
    """
    placeholder_re = re.compile(re.escape(placeholder_base) + r"\d+")
    bpos = _byte_prefix(sentence_text)
    tokens: list[Token] = []
    for m in _TOKEN_RE.finditer(sentence_text):
        surface = m.group()
        span = (base_offset + bpos[m.start()], base_offset + bpos[m.end()])
        if placeholder_re.fullmatch(surface):
            kind = FORMULA
        elif _NUMBER_RE.fullmatch(surface):
            kind = NUMBER
        elif m.group(2) is not None or m.group(1) is not None:
            kind = WORD
        else:
            kind = _char_kind(surface)
        tokens.append(Token(surface=surface, span=span, kind=kind))
    return tokens
