"""Command line interface: `batesqc run` and `batesqc synth`."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import FatalConfig
from .imageprep import RegionSpec
from .manifest import FieldMap
from .ocr import DEFAULT_COMMAND_TEMPLATE, OcrBackendConfig
from .runner import EXIT_FATAL, JobConfig, OutputConfig, emit_report, run_job
from .synth import CorpusSpec, generate_corpus


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="batesqc",
                                     description="Production stamping QC via corner-region OCR")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="validate a production against its load file")
    run.add_argument("--manifest", required=True, help="load file path")
    run.add_argument("--manifest-format", choices=("csv", "dat", "opt"), default="csv")
    run.add_argument("--images", default=None, help="base directory for relative image paths")
    run.add_argument("--prefix", default=None, help="expected Bates prefix (checked against the manifest)")
    run.add_argument("--digits", type=int, default=None, help="expected digit width (checked against the manifest)")
    run.add_argument("--band", choices=("bottom", "top", "both"), default="bottom")
    run.add_argument("--band-height", default="0.10",
                     help="stamp band height: fraction of page height, or integer pixels")
    run.add_argument("--split", type=float, default=2 / 3, help="left corner share of the band width")
    run.add_argument("--conf-vocab", default=None, help="file of designations, one per line")
    run.add_argument("--conf-max-distance", type=float, default=0.2,
                     help="normalized edit-distance threshold for designation matching")
    run.add_argument("--ocr-cmd", default=DEFAULT_COMMAND_TEMPLATE,
                     help="external OCR command template; {input} expands to a temp PNG")
    run.add_argument("--ocr-script", default=None,
                     help="JSON fingerprint-to-text map; replaces the external engine")
    run.add_argument("--ocr-timeout-ms", type=int, default=30_000)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--batch-size", type=int, default=32)
    run.add_argument("--json", dest="json_out", default=None, help="report JSON output path")
    run.add_argument("--csv", dest="csv_out", default=None, help="findings CSV output path")
    run.add_argument("--check-manifest-gaps", action="store_true",
                     help="also detect gaps in the manifest's own numbering")
    run.add_argument("--dump-regions", default=None, help="directory for corner-region PNG dumps")
    run.add_argument("--bates-col", default="BEGBATES")
    run.add_argument("--image-col", default="IMAGE")
    run.add_argument("--conf-col", default="CONF")
    run.add_argument("--encoding", default="utf-8", help="load file encoding (utf-8 or cp1252)")
    run.add_argument("--progress-every", type=int, default=0,
                     help="print progress to stderr every N pages (0 = quiet)")

    synth = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--pages", type=int, required=True)
    synth.add_argument("--prefix", default="ABC")
    synth.add_argument("--digits", type=int, default=7)
    synth.add_argument("--start", type=int, default=1)
    synth.add_argument("--separator", choices=("none", "-", "_", "space"), default="none")
    synth.add_argument("--page-size", default="850x1100", help="page pixels as WxH")
    synth.add_argument("--conf-vocab", default=None, help="file of designations, one per line")
    synth.add_argument("--conf-missing-rate", type=float, default=0.0)
    synth.add_argument("--fault", action="append", default=[], metavar="KIND=RATE",
                       help="omit_bates / wrong_bates / double_stamp rate, repeatable")
    synth.add_argument("--out", required=True, help="output directory")
    return parser


def _parse_band_height(text: str) -> float | int:
    try:
        return int(text)
    except ValueError:
        return float(text)


def _read_vocab(path: str | None) -> tuple[str, ...]:
    if path is None:
        return ("CONFIDENTIAL",)
    with open(path, "r", encoding="utf-8") as fh:
        entries = tuple(line.strip() for line in fh if line.strip())
    return entries or ("CONFIDENTIAL",)


def _cmd_run(args: argparse.Namespace) -> int:
    if args.ocr_script:
        with open(args.ocr_script, "r", encoding="utf-8") as fh:
            ocr = OcrBackendConfig(kind="scripted", script=json.load(fh),
                                   timeout_ms=args.ocr_timeout_ms)
    else:
        ocr = OcrBackendConfig(kind="external_command", command_template=args.ocr_cmd,
                               timeout_ms=args.ocr_timeout_ms)
    bands = frozenset({"bottom", "top"}) if args.band == "both" else frozenset({args.band})
    cfg = JobConfig(
        manifest_path=args.manifest,
        manifest_format=args.manifest_format,
        field_map=FieldMap(bates=args.bates_col, image=args.image_col,
                           confidentiality=args.conf_col),
        images_dir=args.images,
        region=RegionSpec(band_height=_parse_band_height(args.band_height), split=args.split),
        bands=bands,
        ocr=ocr,
        correction=None,
        workers=args.workers,
        batch_size=args.batch_size,
        output=OutputConfig(json_path=args.json_out, csv_path=args.csv_out,
                            dump_regions_dir=args.dump_regions),
        check_manifest_gaps=args.check_manifest_gaps,
        progress_every=args.progress_every,
        encoding=args.encoding,
        conf_vocabulary=_read_vocab(args.conf_vocab),
        conf_max_distance=args.conf_max_distance,
        expected_prefix=args.prefix,
        expected_digits=args.digits,
    )
    report = run_job(cfg)
    return emit_report(report, cfg)


def _cmd_synth(args: argparse.Namespace) -> int:
    fault_rates = {}
    for item in args.fault:
        if "=" not in item:
            raise FatalConfig(f"--fault expects KIND=RATE, got {item!r}")
        kind, rate = item.split("=", 1)
        fault_rates[kind.strip()] = float(rate)
    try:
        w, h = (int(v) for v in args.page_size.lower().split("x"))
    except ValueError:
        raise FatalConfig(f"--page-size expects WxH, got {args.page_size!r}") from None
    sep = {"none": "", "space": " "}.get(args.separator, args.separator)
    spec = CorpusSpec(
        seed=args.seed,
        pages=args.pages,
        prefix=args.prefix,
        width=args.digits,
        separator=sep,
        start_value=args.start,
        page_size_px=(w, h),
        conf_vocabulary=_read_vocab(args.conf_vocab),
        conf_missing_rate=args.conf_missing_rate,
        fault_rates=fault_rates,
    )
    manifest, ledger = generate_corpus(spec, args.out)
    print(f"wrote {len(manifest.pages)} pages and {len(ledger)} fault entries to {args.out}",
          file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_synth(args)
    except FatalConfig as exc:
        print(f"batesqc: fatal: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except OSError as exc:
        print(f"batesqc: io error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except ValueError as exc:
        print(f"batesqc: bad configuration: {exc}", file=sys.stderr)
        return EXIT_FATAL


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
