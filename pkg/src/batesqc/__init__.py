"""Batch QC for legal document productions.

Extracts Bates numbers and confidentiality designations from page-image
corner regions via a pluggable OCR backend, repairs the common OCR
error patterns deterministically, and validates the results against the
production's load-file metadata.
"""

from .bates import BatesGrammar, BatesNumber, parse_bates, render_bates, successor
from .imageprep import PageImage, PreprocessOptions, RegionSpec, crop_band, preprocess, split_corners
from .manifest import FieldMap, PageRecord, ProductionManifest, load_manifest
from .ocr import OcrBackendConfig, OcrResult, make_engine, region_fingerprint
from .postproc import (
    CorrectionConfig,
    FailureReason,
    StampExtraction,
    correct,
    match_confidentiality,
    normalize_whitespace,
    repair_digits,
)
from .runner import JobConfig, OutputConfig, emit_report, run_job
from .synth import CorpusSpec, corrupt_ocr_text, generate_corpus
from .validate import (
    Finding,
    FindingKind,
    ValidationReport,
    compare_page,
    detect_double_stamp,
    detect_gaps,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "BatesGrammar", "BatesNumber", "parse_bates", "render_bates", "successor",
    "FieldMap", "PageRecord", "ProductionManifest", "load_manifest",
    "PageImage", "RegionSpec", "PreprocessOptions", "crop_band", "split_corners", "preprocess",
    "OcrBackendConfig", "OcrResult", "make_engine", "region_fingerprint",
    "CorrectionConfig", "StampExtraction", "FailureReason",
    "normalize_whitespace", "repair_digits", "correct", "match_confidentiality",
    "Finding", "FindingKind", "ValidationReport",
    "compare_page", "detect_gaps", "detect_double_stamp", "summarize",
    "JobConfig", "OutputConfig", "run_job", "emit_report",
    "CorpusSpec", "generate_corpus", "corrupt_ocr_text",
    "__version__",
]
