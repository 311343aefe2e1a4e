"""Load-file parsing into a validated production manifest.

Three dialects are supported:

* CSV: RFC-4180 with a header row; column names are bound via FieldMap.
* DAT: Concordance convention, 0x14 field separator, 0xFE text
  qualifier, one header row; UTF-8 or Windows-1252.
* OPT: comma-separated cross-reference lines
  ``BATES,VOLUME,IMAGEPATH,DOCBREAK,,,PAGECOUNT``; only BATES and
  IMAGEPATH are consumed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .bates import BatesNumber, parse_bates
from .errors import DuplicateBates, MissingColumn, MixedPrefix, ParseError

DAT_FIELD_SEP = "\x14"
DAT_QUALIFIER = "\xfe"

FORMATS = ("csv", "dat", "opt")
BANDS = ("bottom", "top")


@dataclass(frozen=True)
class FieldMap:
    """Binds logical fields to load-file column names."""

    bates: str = "BEGBATES"
    image: str = "IMAGE"
    confidentiality: str = "CONF"
    doc_id: str | None = None


@dataclass(frozen=True)
class PageRecord:
    bates: BatesNumber
    image_path: str
    doc_id: str = ""
    expected_confidentiality: str | None = None
    stamp_bands: frozenset[str] = frozenset({"bottom"})

    def __post_init__(self):
        if not self.image_path:
            raise ValueError("image_path must be non-empty")
        if not self.stamp_bands or not self.stamp_bands <= set(BANDS):
            raise ValueError(f"stamp_bands must be a non-empty subset of {BANDS}")


@dataclass(frozen=True)
class ProductionManifest:
    """Expected per-page stamps, sorted ascending by Bates value."""

    pages: tuple[PageRecord, ...]
    prefix: str
    width: int
    separator: str = ""

    def values(self) -> list[int]:
        return [p.bates.value for p in self.pages]


def load_manifest(
    path: str,
    format: str = "csv",
    field_map: FieldMap | None = None,
    encoding: str = "utf-8",
    default_bands: frozenset[str] = frozenset({"bottom"}),
) -> ProductionManifest:
    """Parse a load file and enforce all manifest invariants.

    Every malformed input maps to a typed error, never a partial
    manifest: ParseError (with line number), DuplicateBates,
    MixedPrefix, MissingColumn.
    """
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {format!r}")
    field_map = field_map or FieldMap()
    with open(path, "r", encoding=encoding, newline="") as fh:
        text = fh.read()
    if format == "csv":
        rows = _rows_from_csv(text, field_map)
    elif format == "dat":
        rows = _rows_from_dat(text, field_map)
    else:
        rows = _rows_from_opt(text)
    return _build(rows, default_bands)


def _rows_from_csv(text: str, fm: FieldMap) -> list[tuple[int, str, str, str | None, str]]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(1, "empty file") from None
    cols = _bind_columns(header, fm)
    rows = []
    for line_no, cells in enumerate(reader, start=2):
        if not cells or all(c == "" for c in cells):
            continue
        rows.append(_pick(line_no, cells, cols))
    return rows


def _rows_from_dat(text: str, fm: FieldMap) -> list[tuple[int, str, str, str | None, str]]:
    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "empty file")
    header = [_unwrap_dat(c) for c in lines[0].split(DAT_FIELD_SEP)]
    cols = _bind_columns(header, fm)
    rows = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = [_unwrap_dat(c) for c in line.split(DAT_FIELD_SEP)]
        rows.append(_pick(line_no, cells, cols))
    return rows


def _rows_from_opt(text: str) -> list[tuple[int, str, str, str | None, str]]:
    rows = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) < 3:
            raise ParseError(line_no, f"expected at least 3 comma-separated fields, got {len(cells)}")
        bates, image = cells[0].strip(), cells[2].strip()
        rows.append((line_no, bates, image, None, bates))
    return rows


def _unwrap_dat(cell: str) -> str:
    if len(cell) >= 2 and cell.startswith(DAT_QUALIFIER) and cell.endswith(DAT_QUALIFIER):
        return cell[1:-1]
    return cell.strip(DAT_QUALIFIER)


def _bind_columns(header: list[str], fm: FieldMap) -> dict[str, int | None]:
    index = {name.strip(): i for i, name in enumerate(header)}
    if fm.bates not in index:
        raise MissingColumn(f"required column {fm.bates!r} not in header {header}")
    if fm.image not in index:
        raise MissingColumn(f"required column {fm.image!r} not in header {header}")
    return {
        "bates": index[fm.bates],
        "image": index[fm.image],
        "conf": index.get(fm.confidentiality),
        "doc_id": index.get(fm.doc_id) if fm.doc_id else None,
    }


def _pick(line_no: int, cells: list[str], cols: dict[str, int | None]):
    try:
        bates = cells[cols["bates"]].strip()
        image = cells[cols["image"]].strip()
    except IndexError:
        raise ParseError(line_no, f"row has {len(cells)} fields, fewer than the header") from None
    conf = None
    if cols["conf"] is not None and cols["conf"] < len(cells):
        conf = cells[cols["conf"]].strip() or None
    doc_id = bates
    if cols["doc_id"] is not None and cols["doc_id"] < len(cells):
        doc_id = cells[cols["doc_id"]].strip() or bates
    return (line_no, bates, image, conf, doc_id)


def _build(rows, default_bands: frozenset[str]) -> ProductionManifest:
    if not rows:
        raise ParseError(1, "no data rows")
    records: list[tuple[int, PageRecord]] = []
    prefix = width = separator = None
    for line_no, bates_text, image, conf, doc_id in rows:
        try:
            b = parse_bates(bates_text)
        except Exception as exc:
            raise ParseError(line_no, f"bad Bates number {bates_text!r}: {exc}") from None
        if not image:
            raise ParseError(line_no, "empty image path")
        if prefix is None:
            prefix, width, separator = b.prefix, b.width, b.separator
        elif b.prefix != prefix:
            raise MixedPrefix(f"line {line_no}: prefix {b.prefix!r} differs from {prefix!r}")
        elif b.width != width or b.separator != separator:
            # One endorsement form per production; a stray width or
            # separator is a malformed row, not a second production.
            raise ParseError(line_no, f"{bates_text!r} does not share the production's digit width/separator")
        records.append((line_no, PageRecord(b, image, doc_id, conf, default_bands)))
    seen: dict[int, int] = {}
    for line_no, rec in records:
        if rec.bates.value in seen:
            raise DuplicateBates(
                f"{rec.bates.render()} on line {line_no} already appeared on line {seen[rec.bates.value]}"
            )
        seen[rec.bates.value] = line_no
    pages = tuple(rec for _, rec in sorted(records, key=lambda t: t[1].bates.value))
    return ProductionManifest(pages=pages, prefix=prefix, width=width, separator=separator)
