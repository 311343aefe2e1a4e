"""Deterministic correction of raw OCR text from the stamp corners.

Four error classes are repaired, in a fixed order: stray newlines
around the stamp, an inserted space, the digit 0 read as letter O, and
a surplus O attached to the front of the digit block (a misread
leading zero). Whitespace removal must run before prefix anchoring,
and the O/0 map before digit counting, so the order is load-bearing.

Correction never fabricates digits: every output digit is reachable
from the raw text through the declared character maps alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .bates import SEPARATORS, UPPERCASE, BatesGrammar, BatesNumber, parse_bates
from .errors import InvalidFormat, PrefixNotFound

RULE_WHITESPACE = "whitespace"
RULE_O_TO_ZERO = "o-to-zero"
RULE_ZERO_TRIM = "zero-trim"


class FailureReason(str, Enum):
    EMPTY_TEXT = "EmptyText"
    PREFIX_NOT_FOUND = "PrefixNotFound"
    WIDTH_MISMATCH = "WidthMismatch"
    UNPARSEABLE = "Unparseable"


@dataclass(frozen=True)
class CorrectionConfig:
    """What the production's endorsements are supposed to look like."""

    expected_prefix: str
    expected_width: int
    separator: str = ""
    conf_vocabulary: tuple[str, ...] = ("CONFIDENTIAL",)
    conf_max_distance: float = 0.2

    def __post_init__(self):
        if not self.expected_prefix or not all(c in UPPERCASE for c in self.expected_prefix):
            raise ValueError(f"expected_prefix must be uppercase letters, got {self.expected_prefix!r}")
        if self.expected_width < 1:
            raise ValueError("expected_width must be >= 1")
        if self.separator not in SEPARATORS:
            raise ValueError(f"separator must be one of {SEPARATORS}")
        if not 0.0 <= self.conf_max_distance < 1.0:
            raise ValueError("conf_max_distance must be in [0, 1)")
        vocab = []
        for entry in self.conf_vocabulary:
            norm = " ".join(entry.upper().split())
            if norm and norm not in vocab:
                vocab.append(norm)
        if not vocab:
            raise ValueError("conf_vocabulary must contain at least one designation")
        object.__setattr__(self, "conf_vocabulary", tuple(vocab))


@dataclass(frozen=True)
class StampExtraction:
    """Raw and corrected text for one corner region, with provenance."""

    raw_text: str
    corrected: BatesNumber | None = None
    conf_match: str | None = None
    applied_rules: tuple[str, ...] = ()
    failure: FailureReason | None = None
    detail: str = ""


def normalize_whitespace(text: str) -> str:
    """Drop every whitespace character, internal or surrounding."""
    return "".join(text.split())


def repair_digits(text: str, cfg: CorrectionConfig) -> str:
    """Repair the digit block behind the expected prefix.

    Anchors on the leftmost exact occurrence of the prefix, maps every
    O/o after it to 0, and when the digit block then exceeds the
    expected width by leading zeros only, drops the surplus zeros.
    The prefix itself is never rewritten; damage to it is out of scope
    here and surfaces as PrefixNotFound.
    """
    repaired, _ = _repair_digits(text, cfg)
    return repaired


def _repair_digits(text: str, cfg: CorrectionConfig) -> tuple[str, tuple[str, ...]]:
    at = text.find(cfg.expected_prefix)
    if at < 0:
        raise PrefixNotFound(f"prefix {cfg.expected_prefix!r} not in {text!r}")
    rules = []
    head = text[: at + len(cfg.expected_prefix)]
    tail = text[at + len(cfg.expected_prefix):]
    mapped = tail.replace("O", "0").replace("o", "0")
    if mapped != tail:
        rules.append(RULE_O_TO_ZERO)
    sep = ""
    zone = mapped
    if cfg.separator in ("-", "_") and zone.startswith(cfg.separator):
        sep, zone = cfg.separator, zone[1:]
    if zone.isdigit() and len(zone) > cfg.expected_width:
        surplus = len(zone) - cfg.expected_width
        if zone[:surplus] == "0" * surplus:
            zone = zone[surplus:]
            rules.append(RULE_ZERO_TRIM)
    return head + sep + zone, tuple(rules)


def correct(raw: str, cfg: CorrectionConfig) -> StampExtraction:
    """Full correction pipeline for the Bates corner.

    normalize_whitespace, then digit repair, then parse and validate
    against the expected prefix, separator and width. Failures are
    returned as typed reasons with the raw text retained, never raised.
    """
    rules: list[str] = []
    normalized = normalize_whitespace(raw)
    if normalized != raw:
        rules.append(RULE_WHITESPACE)
    if not normalized:
        return StampExtraction(raw, failure=FailureReason.EMPTY_TEXT, applied_rules=tuple(rules))
    try:
        repaired, repair_rules = _repair_digits(normalized, cfg)
    except PrefixNotFound as exc:
        return StampExtraction(
            raw, failure=FailureReason.PREFIX_NOT_FOUND,
            applied_rules=tuple(rules), detail=str(exc),
        )
    rules.extend(repair_rules)
    grammar = BatesGrammar(separators=("", cfg.separator) if cfg.separator else ("",))
    try:
        parsed = parse_bates(repaired, grammar)
    except InvalidFormat as exc:
        return StampExtraction(
            raw, failure=FailureReason.UNPARSEABLE,
            applied_rules=tuple(rules), detail=str(exc),
        )
    if parsed.prefix != cfg.expected_prefix:
        return StampExtraction(
            raw, failure=FailureReason.UNPARSEABLE, applied_rules=tuple(rules),
            detail=f"parsed prefix {parsed.prefix!r} != expected {cfg.expected_prefix!r}",
        )
    if parsed.separator != cfg.separator and not (cfg.separator == " " and parsed.separator == ""):
        return StampExtraction(
            raw, failure=FailureReason.UNPARSEABLE, applied_rules=tuple(rules),
            detail=f"separator {parsed.separator!r} != expected {cfg.separator!r}",
        )
    if parsed.width != cfg.expected_width:
        return StampExtraction(
            raw, failure=FailureReason.WIDTH_MISMATCH, applied_rules=tuple(rules),
            detail=f"{parsed.width} digits, expected {cfg.expected_width}",
        )
    # A space separator was eaten by normalization; restore it from the
    # configured form. Digits and prefix are taken from the text.
    corrected = BatesNumber(cfg.expected_prefix, cfg.separator, parsed.value, cfg.expected_width)
    return StampExtraction(raw, corrected=corrected, applied_rules=tuple(rules))


def levenshtein(a: str, b: str) -> int:
    """Plain edit distance, O(min(len)) space."""
    if len(a) > len(b):
        a, b = b, a
    prev = list(range(len(a) + 1))
    for i, cb in enumerate(b, start=1):
        row = [i]
        for j, ca in enumerate(a, start=1):
            cost = 0 if ca == cb else 1
            row.append(min(row[-1] + 1, prev[j] + 1, prev[j - 1] + cost))
        prev = row
    return prev[-1]


def match_confidentiality(raw: str, cfg: CorrectionConfig) -> str | None:
    """Nearest designation in the vocabulary, if close enough.

    The raw text is uppercased and internal whitespace collapsed, so
    the match does not care how the engine spaced the words. The entry
    with minimum edit distance wins, ties broken by vocabulary order,
    and is returned only when distance / max(len) stays within the
    configured threshold.
    """
    norm = " ".join(raw.upper().split())
    if not norm:
        return None
    best = None
    best_d = None
    for entry in cfg.conf_vocabulary:
        d = levenshtein(norm, entry)
        if best_d is None or d < best_d:
            best, best_d = entry, d
    if best_d / max(len(norm), len(best)) <= cfg.conf_max_distance:
        return best
    return None


def extract_confidentiality(raw: str, cfg: CorrectionConfig) -> StampExtraction:
    """Wrap the left-corner text and its vocabulary match."""
    return StampExtraction(raw, conf_match=match_confidentiality(raw, cfg))
