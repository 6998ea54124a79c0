"""Exception taxonomy shared across the toolkit.

Every domain error carries a stable ``category`` slug so the CLI and the
review API can emit machine-readable errors without string matching.
"""

from __future__ import annotations


class BokitError(Exception):
    """Base class for every domain error raised by this package."""

    category = "error"


class InvalidTextError(BokitError):
    """Input text contains an invalid codepoint sequence."""

    category = "invalid_text"

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class ConfigError(BokitError):
    category = "config"


class LexiconError(BokitError):
    category = "lexicon"


class UnsupportedMagnitudeError(BokitError):
    category = "unsupported_magnitude"


class EmptyCorpusError(BokitError):
    category = "empty_corpus"


class TargetTooSmallError(BokitError):
    category = "target_too_small"


class InvalidTokenIdError(BokitError):
    """A token id is outside the model vocabulary."""

    category = "invalid_token_id"

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class ModelFormatError(BokitError):
    category = "model_format"


class MalformedHeaderError(BokitError):
    category = "malformed_header"


class UnsupportedEncodingError(BokitError):
    category = "unsupported_encoding"


class AllZeroInputError(BokitError):
    category = "all_zero_input"


class FullySilentError(BokitError):
    category = "fully_silent"


class EmptyBufferError(BokitError):
    category = "empty_buffer"


class ZeroDurationError(BokitError):
    category = "zero_duration"


class ZeroSyllablesError(BokitError):
    category = "zero_syllables"


class EmptyReferenceError(BokitError):
    category = "empty_reference"


class OutOfRangeScoreError(BokitError):
    """A MOS rating outside [1, 5]; carries the offending location."""

    category = "out_of_range_score"

    def __init__(self, message: str, system: str | None = None,
                 rater: str | None = None, utterance_id: str | None = None):
        super().__init__(message)
        self.system = system
        self.rater = rater
        self.utterance_id = utterance_id


class UnreadableIndexError(BokitError):
    category = "unreadable_index"


class NoAcceptedRecordsError(BokitError):
    category = "no_accepted_records"


class UnknownIdError(BokitError):
    category = "unknown_id"


class NotReviewableError(BokitError):
    category = "not_reviewable"


class InvalidEditError(BokitError):
    category = "invalid_edit"
