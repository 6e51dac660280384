"""Exception types shared across the pipeline.

File-format errors carry a 1-based line number; delimiter and corruption
errors carry a byte offset.
"""

from __future__ import annotations


class MathNlpError(Exception):
    """Base class for all errors raised by this package."""


class MalformedLine(MathNlpError):
    def __init__(self, line_no: int, message: str = "malformed line"):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnknownTag(MathNlpError):
    def __init__(self, line_no: int, tag: str):
        super().__init__(f"line {line_no}: tag {tag!r} is not in the tag set")
        self.line_no = line_no
        self.tag = tag


class EmptyCorpus(MathNlpError):
    pass


class DuplicateKey(MathNlpError):
    def __init__(self, key: str, line_no: int):
        super().__init__(f"line {line_no}: duplicate key {key!r}")
        self.key = key
        self.line_no = line_no


class DuplicateCode(MathNlpError):
    def __init__(self, code: str, line_no: int):
        super().__init__(f"line {line_no}: duplicate class code {code!r}")
        self.code = code
        self.line_no = line_no


class UnbalancedDelimiter(MathNlpError):
    def __init__(self, byte_offset: int):
        super().__init__(f"math delimiter opened at byte {byte_offset} is never closed")
        self.byte_offset = byte_offset


class KnownToken(MathNlpError):
    def __init__(self, surface: str):
        super().__init__(f"{surface!r} is in the model vocabulary")
        self.surface = surface


class WrongLexiconKind(MathNlpError):
    def __init__(self, expected: str, got: str):
        super().__init__(f"expected a {expected} lexicon, got {got}")
        self.expected = expected
        self.got = got


class PatternSyntaxError(MathNlpError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class NonPositiveAlpha(MathNlpError):
    pass


class SingleClassCorpus(MathNlpError):
    pass


class EmptyTestSet(MathNlpError):
    pass


class ModelNotLoaded(MathNlpError):
    def __init__(self, method: str):
        super().__init__(f"no model loaded for {method!r}")
        self.method = method


class VersionMismatch(MathNlpError):
    def __init__(self, expected: str, found: str):
        super().__init__(f"expected header {expected!r}, found {found!r}")
        self.expected = expected
        self.found = found


class CorruptFile(MathNlpError):
    def __init__(self, byte_offset: int, message: str = "corrupt model file"):
        super().__init__(f"byte {byte_offset}: {message}")
        self.byte_offset = byte_offset


class StorageFailure(MathNlpError):
    pass


class InvalidFeedback(MathNlpError):
    pass
