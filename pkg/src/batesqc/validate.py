"""Compare extractions against the manifest and aggregate findings.

Every page yields exactly one of Match / BatesMismatch /
BatesNotExtracted / OcrFailure, plus at most one confidentiality
finding and at most one DoubleStamp. SequenceGap findings are not tied
to a page; they name the missing value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .bates import BatesNumber
from .errors import InconsistentInput, RangeInvalid
from .manifest import PageRecord
from .postproc import CorrectionConfig, FailureReason, StampExtraction


class FindingKind(str, Enum):
    MATCH = "Match"
    BATES_MISMATCH = "BatesMismatch"
    BATES_NOT_EXTRACTED = "BatesNotExtracted"
    OCR_FAILURE = "OcrFailure"
    MISSING_CONFIDENTIALITY = "MissingConfidentiality"
    CONFIDENTIALITY_MISMATCH = "ConfidentialityMismatch"
    DOUBLE_STAMP = "DoubleStamp"
    SEQUENCE_GAP = "SequenceGap"


#: Exactly one of these per page; their counts partition total_pages.
PARTITION_KINDS = frozenset({
    FindingKind.MATCH,
    FindingKind.BATES_MISMATCH,
    FindingKind.BATES_NOT_EXTRACTED,
    FindingKind.OCR_FAILURE,
})

KIND_ORDER = {kind: i for i, kind in enumerate(FindingKind)}


@dataclass(frozen=True)
class Finding:
    kind: FindingKind
    page: PageRecord | None = None
    expected: str | None = None
    observed: str | None = None
    detail: str = ""
    #: True when the untouched raw engine text already equalled the
    #: expected string. Internal; not part of the report schema.
    raw_matched: bool = False

    def __post_init__(self):
        if self.kind is FindingKind.SEQUENCE_GAP:
            if self.page is not None or self.expected is None:
                raise ValueError("SequenceGap findings carry expected and no page")
        elif self.page is None:
            raise ValueError(f"{self.kind.value} findings must carry a page")


@dataclass(frozen=True)
class ValidationReport:
    total_pages: int
    raw_match_rate: float
    corrected_match_rate: float
    conf_missing_rate: float
    findings: tuple[Finding, ...]
    per_kind_counts: Mapping[str, int] = field(default_factory=dict)


def compare_page(rec: PageRecord, bates_ext: StampExtraction,
                 conf_ext: StampExtraction) -> list[Finding]:
    """Findings for one page: the Bates verdict plus confidentiality.

    The Bates verdict is string equality of the corrected rendering
    against the manifest rendering. An empty extraction is its own
    class (the stamp may still be there; the engine saw nothing).
    """
    expected = rec.bates.render()
    raw_matched = bates_ext.raw_text == expected
    findings: list[Finding] = []
    if bates_ext.corrected is not None:
        observed = bates_ext.corrected.render()
        if observed == expected:
            findings.append(Finding(FindingKind.MATCH, page=rec, expected=expected,
                                    observed=observed, raw_matched=raw_matched))
        else:
            findings.append(Finding(FindingKind.BATES_MISMATCH, page=rec, expected=expected,
                                    observed=observed, detail="corrected text differs from metadata"))
    elif bates_ext.failure is FailureReason.EMPTY_TEXT:
        findings.append(Finding(FindingKind.BATES_NOT_EXTRACTED, page=rec, expected=expected,
                                detail="no text extracted from the Bates corner"))
    else:
        reason = bates_ext.failure.value if bates_ext.failure else "unknown"
        findings.append(Finding(FindingKind.BATES_MISMATCH, page=rec, expected=expected,
                                observed=bates_ext.raw_text,
                                detail=f"correction failed: {reason}"))
    if rec.expected_confidentiality:
        expected_conf = " ".join(rec.expected_confidentiality.upper().split())
        if conf_ext.conf_match is None:
            findings.append(Finding(FindingKind.MISSING_CONFIDENTIALITY, page=rec,
                                    expected=expected_conf, observed=conf_ext.raw_text or None,
                                    detail="no designation recognized in the left corner"))
        elif conf_ext.conf_match != expected_conf:
            findings.append(Finding(FindingKind.CONFIDENTIALITY_MISMATCH, page=rec,
                                    expected=expected_conf, observed=conf_ext.conf_match,
                                    detail="a different designation matched"))
    return findings


def detect_gaps(observed: Iterable[BatesNumber], first: BatesNumber,
                last: BatesNumber) -> list[BatesNumber]:
    """Every value in [first, last] absent from observed, ascending."""
    if first.value > last.value:
        raise RangeInvalid(f"range [{first.render()}, {last.render()}] is inverted")
    if first.prefix != last.prefix or first.width != last.width:
        raise RangeInvalid("range endpoints disagree on prefix/width")
    seen = set()
    for b in observed:
        if b.prefix != first.prefix or b.width != first.width:
            raise RangeInvalid(f"{b.render()} does not share the range's prefix/width")
        seen.add(b.value)
    return [
        BatesNumber(first.prefix, first.separator, v, first.width)
        for v in range(first.value, last.value + 1)
        if v not in seen
    ]


_TOKEN = re.compile(r"([A-Za-z]+)([-_ ]?)([0-9Oo]+)")


def detect_double_stamp(right_corner_raw: str, cfg: CorrectionConfig) -> bool:
    """True when two or more Bates-shaped tokens appear in the corner.

    Tokens take any letter prefix (a second stamp from a re-production
    need not share ours) but must repair to the production's digit
    width; duplicated identical tokens count.
    """
    hits = 0
    for m in _TOKEN.finditer(right_corner_raw):
        if _repairs_to_width(m.group(1), m.group(3), cfg.expected_width):
            hits += 1
            if hits >= 2:
                return True
    return False


def _repairs_to_width(letters: str, digits: str, width: int) -> bool:
    # Trailing O/o in the letter run may really be digits; try every
    # split that moves only O's across the boundary.
    for k in range(len(letters), 0, -1):
        moved = letters[k:]
        if any(c not in "Oo" for c in moved):
            break
        zone = (moved + digits).replace("O", "0").replace("o", "0")
        surplus = len(zone) - width
        if surplus > 0 and zone[:surplus] == "0" * surplus:
            zone = zone[surplus:]
        if len(zone) == width:
            return True
    return False


def summarize(findings: Iterable[Finding], total_pages: int) -> ValidationReport:
    """Aggregate findings into rates and per-kind counts.

    Page-scoped partition kinds must sum to total_pages, or the input
    is inconsistent. With zero pages every rate is defined as 1.0.
    """
    findings = tuple(findings)
    counts = {kind.value: 0 for kind in FindingKind}
    raw_matches = 0
    for f in findings:
        counts[f.kind.value] += 1
        if f.kind is FindingKind.MATCH and f.raw_matched:
            raw_matches += 1
    partition_total = sum(counts[k.value] for k in PARTITION_KINDS)
    if partition_total != total_pages:
        raise InconsistentInput(
            f"{partition_total} page-scoped findings for {total_pages} pages"
        )
    if total_pages == 0:
        raw = corrected = conf_missing = 1.0
    else:
        raw = raw_matches / total_pages
        corrected = counts[FindingKind.MATCH.value] / total_pages
        conf_missing = counts[FindingKind.MISSING_CONFIDENTIALITY.value] / total_pages
    return ValidationReport(
        total_pages=total_pages,
        raw_match_rate=raw,
        corrected_match_rate=corrected,
        conf_missing_rate=conf_missing,
        findings=findings,
        per_kind_counts=counts,
    )
