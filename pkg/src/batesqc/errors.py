"""Typed errors raised across the QC pipeline.

Unwritable output paths raise the builtin OSError; everything
domain-specific lives here.
"""


class BatesQcError(Exception):
    """Base class for all errors raised by this package."""


class InvalidFormat(BatesQcError):
    """Text does not follow the PREFIX[SEP]DIGITS grammar."""


class Overflow(BatesQcError):
    """Incrementing a Bates value would exceed its fixed digit width."""


class ParseError(BatesQcError):
    """A load-file row is malformed. Carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateBates(BatesQcError):
    """The same Bates value appears on more than one manifest row."""


class MixedPrefix(BatesQcError):
    """Manifest rows carry more than one Bates prefix."""


class MissingColumn(BatesQcError):
    """A required load-file column is absent from the header."""


class DegenerateRegion(BatesQcError):
    """A crop or split would produce a zero-pixel region."""


class EngineFailure(BatesQcError):
    """The OCR engine exited abnormally. Carries captured diagnostics."""

    def __init__(self, message: str, stderr: str = "", exit_code: int | None = None):
        super().__init__(message)
        self.stderr = stderr
        self.exit_code = exit_code


class Timeout(BatesQcError):
    """The OCR engine did not answer within the configured deadline."""


class BackendUnavailable(BatesQcError):
    """The configured OCR backend cannot be constructed (missing binary)."""


class PrefixNotFound(BatesQcError):
    """The expected Bates prefix does not occur in the OCR text."""


class RangeInvalid(BatesQcError):
    """Gap-detection endpoints are inverted or disagree on prefix/width."""


class InconsistentInput(BatesQcError):
    """Findings passed to summarize() do not partition the page count."""


class FatalConfig(BatesQcError):
    """Job-aborting configuration error (unloadable manifest, missing backend)."""
