"""Parallel job orchestration and report emission.

Pages are distributed to a fixed pool of worker processes as
contiguous batches in manifest order; each worker owns a private OCR
engine instance. Results are merged by page index, so the report is
byte-identical no matter how many workers ran or how scheduling
interleaved. Per-page failures (unreadable image, engine crash)
become OcrFailure findings and never abort the job; only an
unloadable manifest or a missing backend is fatal.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, replace
from pathlib import Path

from .bates import BatesNumber
from .errors import BatesQcError, EngineFailure, FatalConfig, Timeout
from .imageprep import PageImage, RegionSpec, crop_band, load_page_image, save_png, split_corners
from .manifest import FieldMap, PageRecord, ProductionManifest, load_manifest
from .ocr import OcrBackendConfig, make_engine
from .postproc import CorrectionConfig, correct, extract_confidentiality
from .validate import (
    KIND_ORDER,
    Finding,
    FindingKind,
    ValidationReport,
    compare_page,
    detect_double_stamp,
    detect_gaps,
    summarize,
)

EXIT_CLEAN = 0
EXIT_FATAL = 1
EXIT_FINDINGS = 2


@dataclass(frozen=True)
class OutputConfig:
    json_path: str | None = None
    csv_path: str | None = None
    dump_regions_dir: str | None = None


@dataclass(frozen=True)
class JobConfig:
    manifest_path: str
    manifest_format: str = "csv"
    field_map: FieldMap = FieldMap()
    images_dir: str | None = None
    region: RegionSpec = RegionSpec()
    bands: frozenset[str] = frozenset({"bottom"})
    ocr: OcrBackendConfig = OcrBackendConfig(kind="scripted", script={})
    correction: CorrectionConfig | None = None
    workers: int = 1
    batch_size: int = 32
    output: OutputConfig = OutputConfig()
    check_manifest_gaps: bool = False
    progress_every: int = 0
    encoding: str = "utf-8"
    # Used when correction is None and must be derived from the manifest.
    conf_vocabulary: tuple[str, ...] = ("CONFIDENTIAL",)
    conf_max_distance: float = 0.2
    # Optional cross-checks against the manifest, for operator sanity.
    expected_prefix: str | None = None
    expected_digits: int | None = None

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass(frozen=True)
class PageOutcome:
    """Per-page result carried back from a worker."""

    findings: tuple[Finding, ...]
    corrected: BatesNumber | None


def run_job(cfg: JobConfig) -> ValidationReport:
    """Run the whole pipeline over every manifest page exactly once."""
    try:
        man = load_manifest(cfg.manifest_path, cfg.manifest_format, cfg.field_map,
                            encoding=cfg.encoding, default_bands=cfg.bands)
    except (OSError, BatesQcError) as exc:
        raise FatalConfig(f"cannot load manifest {cfg.manifest_path}: {exc}") from exc
    if cfg.expected_prefix is not None and cfg.expected_prefix != man.prefix:
        raise FatalConfig(f"--prefix {cfg.expected_prefix} but manifest uses {man.prefix}")
    if cfg.expected_digits is not None and cfg.expected_digits != man.width:
        raise FatalConfig(f"--digits {cfg.expected_digits} but manifest uses {man.width}")
    correction = cfg.correction or CorrectionConfig(
        expected_prefix=man.prefix, expected_width=man.width, separator=man.separator,
        conf_vocabulary=cfg.conf_vocabulary, conf_max_distance=cfg.conf_max_distance)
    try:
        make_engine(cfg.ocr)
    except BatesQcError as exc:
        raise FatalConfig(str(exc)) from exc
    if cfg.output.dump_regions_dir:
        Path(cfg.output.dump_regions_dir).mkdir(parents=True, exist_ok=True)

    images_dir = cfg.images_dir or str(Path(cfg.manifest_path).parent)
    work = _WorkContext(images_dir=images_dir, region=cfg.region,
                        correction=correction,
                        dump_dir=cfg.output.dump_regions_dir)
    batches = [(start, man.pages[start:start + cfg.batch_size])
               for start in range(0, len(man.pages), cfg.batch_size)]
    outcomes: list[PageOutcome | None] = [None] * len(man.pages)
    progress = _Progress(cfg.progress_every, len(man.pages))

    if cfg.workers == 1:
        _init_worker(cfg.ocr)
        for start, records in batches:
            _, batch = _run_batch(work, start, records)
            outcomes[start:start + len(batch)] = batch
            progress.advance(len(batch))
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers, initializer=_init_worker,
                                 initargs=(cfg.ocr,)) as pool:
            futures = [pool.submit(_run_batch, work, start, records)
                       for start, records in batches]
            for fut in as_completed(futures):
                start, batch = fut.result()
                outcomes[start:start + len(batch)] = batch
                progress.advance(len(batch))

    findings: list[Finding] = []
    extracted: list[BatesNumber] = []
    for outcome in outcomes:
        assert outcome is not None
        findings.extend(outcome.findings)
        if outcome.corrected is not None:
            extracted.append(outcome.corrected)
    findings.extend(_gap_findings(extracted, "missing from extracted sequence"))
    if cfg.check_manifest_gaps:
        findings.extend(_gap_findings([p.bates for p in man.pages],
                                      "missing from manifest sequence"))
    page_order = {rec: i for i, rec in enumerate(man.pages)}
    findings.sort(key=lambda f: (
        page_order.get(f.page, len(page_order)),
        KIND_ORDER[f.kind],
        f.expected or "",
        f.detail,
    ))
    return summarize(findings, len(man.pages))


def _gap_findings(observed: list[BatesNumber], detail: str) -> list[Finding]:
    if len(observed) < 2:
        return []
    first = min(observed, key=lambda b: b.value)
    last = max(observed, key=lambda b: b.value)
    return [Finding(FindingKind.SEQUENCE_GAP, expected=missing.render(), detail=detail)
            for missing in detect_gaps(observed, first, last)]


@dataclass(frozen=True)
class _WorkContext:
    images_dir: str
    region: RegionSpec
    correction: CorrectionConfig
    dump_dir: str | None


_ENGINE = None


def _init_worker(ocr_cfg: OcrBackendConfig) -> None:
    # One engine per worker process; never shared across workers.
    global _ENGINE
    _ENGINE = make_engine(ocr_cfg)


def _run_batch(work: _WorkContext, start: int,
               records: tuple[PageRecord, ...]) -> tuple[int, list[PageOutcome]]:
    return start, [_process_page(work, rec) for rec in records]


def _process_page(work: _WorkContext, rec: PageRecord) -> PageOutcome:
    path = Path(work.images_dir) / rec.image_path
    try:
        img = load_page_image(str(path))
    except Exception as exc:
        return _ocr_failure(rec, f"unreadable image: {exc}")
    band_results = []
    for band in sorted(rec.stamp_bands):
        spec = replace(work.region, band=band)
        band_img = crop_band(img, spec)
        left, right = split_corners(band_img, work.region.split)
        if work.dump_dir:
            _dump_region(work.dump_dir, rec, left)
            _dump_region(work.dump_dir, rec, right)
        try:
            right_text = _ENGINE.recognize(right).raw_text
            left_text = _ENGINE.recognize(left).raw_text
        except (EngineFailure, Timeout) as exc:
            return _ocr_failure(rec, f"engine failed on {band} band: {exc}")
        band_results.append((
            correct(right_text, work.correction),
            extract_confidentiality(left_text, work.correction),
        ))
    # With both bands in play, the first band whose correction (or
    # designation match) succeeded speaks for the page.
    bates_ext = next((b for b, _ in band_results if b.corrected), band_results[0][0])
    conf_ext = next((c for _, c in band_results if c.conf_match), band_results[0][1])
    findings = compare_page(rec, bates_ext, conf_ext)
    if detect_double_stamp(bates_ext.raw_text, work.correction):
        findings.append(Finding(FindingKind.DOUBLE_STAMP, page=rec,
                                expected=rec.bates.render(), observed=bates_ext.raw_text,
                                detail="multiple Bates-shaped tokens in the right corner"))
    return PageOutcome(tuple(findings), bates_ext.corrected)


def _ocr_failure(rec: PageRecord, detail: str) -> PageOutcome:
    return PageOutcome(
        (Finding(FindingKind.OCR_FAILURE, page=rec, expected=rec.bates.render(), detail=detail),),
        None,
    )


def _dump_region(dump_dir: str, rec: PageRecord, region: PageImage) -> None:
    stem = rec.bates.render().replace(" ", "_")
    save_png(region, str(Path(dump_dir) / f"{stem}_{region.band}_{region.corner}.png"))


class _Progress:
    """Stderr progress line every N pages; stdout stays untouched."""

    def __init__(self, every: int, total: int):
        self.every = every
        self.total = total
        self.done = 0
        self.next_mark = every

    def advance(self, n: int) -> None:
        if not self.every:
            return
        self.done += n
        if self.done >= self.next_mark or self.done == self.total:
            print(f"processed {self.done}/{self.total} pages", file=sys.stderr)
            while self.next_mark <= self.done:
                self.next_mark += self.every


def report_to_json(report: ValidationReport) -> str:
    """Canonical JSON: fixed key order, findings already sorted."""
    obj = {
        "total_pages": report.total_pages,
        "raw_match_rate": report.raw_match_rate,
        "corrected_match_rate": report.corrected_match_rate,
        "conf_missing_rate": report.conf_missing_rate,
        "per_kind_counts": {kind.value: report.per_kind_counts[kind.value]
                            for kind in FindingKind},
        "findings": [_finding_obj(f) for f in report.findings],
    }
    return json.dumps(obj, indent=2) + "\n"


def _finding_obj(f: Finding) -> dict:
    obj: dict = {"kind": f.kind.value}
    if f.expected is not None:
        obj["bates_expected"] = f.expected
    if f.observed is not None:
        obj["observed"] = f.observed
    if f.page is not None:
        obj["image"] = f.page.image_path
    obj["detail"] = f.detail
    return obj


def report_to_csv(report: ValidationReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["kind", "bates_expected", "observed", "image", "detail"])
    for f in report.findings:
        writer.writerow([
            f.kind.value,
            f.expected or "",
            f.observed or "",
            f.page.image_path if f.page else "",
            f.detail,
        ])
    return buf.getvalue()


def emit_report(report: ValidationReport, cfg: JobConfig) -> int:
    """Write the JSON/CSV outputs and map findings to an exit code.

    0 when every finding is a Match, 2 when any QC finding exists.
    Unwritable paths raise OSError; the CLI turns that into exit 1.
    """
    if cfg.output.json_path:
        Path(cfg.output.json_path).write_text(report_to_json(report), encoding="utf-8")
    if cfg.output.csv_path:
        Path(cfg.output.csv_path).write_text(report_to_csv(report), encoding="utf-8")
    clean = all(f.kind is FindingKind.MATCH for f in report.findings)
    return EXIT_CLEAN if clean else EXIT_FINDINGS
