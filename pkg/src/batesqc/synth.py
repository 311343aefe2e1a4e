"""Seeded synthetic corpus generator and OCR-text corruptor.

Generates stamped page images with a matching CSV manifest, a ledger
of every injected fault, and a "perfect OCR" script (region
fingerprint to rendered text) so the whole pipeline can run end to end
against the scripted backend with no engine installed.

Everything is a pure function of (spec, out_dir): identical spec means
byte-identical pages, manifest, ledger and script.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from PIL import Image, ImageDraw

from . import font5x7
from .bates import BatesNumber
from .imageprep import round_half_up
from .manifest import PageRecord, ProductionManifest

MANIFEST_NAME = "manifest.csv"
LEDGER_NAME = "ledger.json"
SCRIPT_NAME = "script.json"

FAULT_KINDS = ("omit_bates", "wrong_bates", "double_stamp")

#: Text-level corruption patterns for scripted-backend tests.
PATTERNS = ("newlines", "space", "zero_to_o", "prefix_extra_o")


@dataclass(frozen=True)
class CorpusSpec:
    seed: int = 0
    pages: int = 10
    prefix: str = "ABC"
    width: int = 7
    separator: str = ""
    start_value: int = 1
    page_size_px: tuple[int, int] = (850, 1100)
    conf_vocabulary: tuple[str, ...] = ("CONFIDENTIAL",)
    conf_missing_rate: float = 0.0
    fault_rates: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.pages < 1:
            raise ValueError("pages must be >= 1")
        if not 0.0 <= self.conf_missing_rate <= 1.0:
            raise ValueError("conf_missing_rate must be in [0, 1]")
        for kind, rate in self.fault_rates.items():
            if kind not in FAULT_KINDS:
                raise ValueError(f"unknown fault kind {kind!r}, expected one of {FAULT_KINDS}")
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"fault rate for {kind} must be in [0, 1]")
        if self.start_value + self.pages - 1 >= 10 ** self.width:
            raise ValueError("page count exceeds the Bates width capacity")


def _sub_seed(*parts) -> int:
    digest = hashlib.blake2b(":".join(str(p) for p in parts).encode(), digest_size=8)
    return int.from_bytes(digest.digest(), "big")


def _fault_hit(seed: int, kind: str, rate: float, index: int) -> bool:
    """Seed-phased stratified selection.

    Any prefix of pages carries within one of index*rate selections, so
    small corpora still land on the nominal rate, and adding pages
    never changes which earlier pages are faulted.
    """
    if rate <= 0.0:
        return False
    if rate >= 1.0:
        return True
    phase = _sub_seed(seed, "phase", kind) / 2 ** 64
    return math.floor((index + 1) * rate + phase) > math.floor(index * rate + phase)


def generate_corpus(spec: CorpusSpec, out_dir: str | Path) -> tuple[ProductionManifest, list[dict]]:
    """Render pages and write manifest.csv, ledger.json and script.json.

    The manifest records the intended (correct) stamps; the ledger
    records every page whose rendering was made to differ from it.
    Returns the in-memory manifest and the fault ledger.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    width_px, height_px = spec.page_size_px
    scale = max(1, height_px // 275)
    records: list[PageRecord] = []
    ledger: list[dict] = []
    script: dict[str, str] = {}
    rows: list[tuple[str, str, str]] = []

    for i in range(spec.pages):
        b = BatesNumber(spec.prefix, spec.separator, spec.start_value + i, spec.width)
        bates_text = b.render()
        designation = spec.conf_vocabulary[_sub_seed(spec.seed, "designation", i) % len(spec.conf_vocabulary)]
        fault = _bates_fault(spec, i)
        conf_missing = _fault_hit(spec.seed, "conf_missing", spec.conf_missing_rate, i)

        rendered_bates = _rendered_bates_text(b, fault)
        rendered_conf = "" if conf_missing else designation
        file_name = bates_text.replace(" ", "_") + ".png"
        _render_page(out / file_name, width_px, height_px, scale,
                     rendered_bates, rendered_conf, i)

        rows.append((bates_text, file_name, designation))
        records.append(PageRecord(b, file_name, bates_text, designation))
        script[f"{file_name}:0:bottom:right"] = rendered_bates
        script[f"{file_name}:0:bottom:left"] = rendered_conf
        if fault:
            ledger.append({"page_index": i, "bates": bates_text,
                           "fault": fault, "rendered": rendered_bates})
        if conf_missing:
            ledger.append({"page_index": i, "bates": bates_text,
                           "fault": "conf_missing", "rendered": ""})

    with open(out / MANIFEST_NAME, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["BEGBATES", "IMAGE", "CONF"])
        writer.writerows(rows)
    with open(out / LEDGER_NAME, "w", encoding="utf-8") as fh:
        json.dump({"pages": spec.pages, "faults": ledger}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out / SCRIPT_NAME, "w", encoding="utf-8") as fh:
        json.dump(script, fh, indent=2, sort_keys=True)
        fh.write("\n")

    manifest = ProductionManifest(pages=tuple(records), prefix=spec.prefix,
                                  width=spec.width, separator=spec.separator)
    return manifest, ledger


def _bates_fault(spec: CorpusSpec, index: int) -> str | None:
    # At most one Bates fault per page; omission beats a wrong number
    # beats a double stamp when the seeded selections collide.
    for kind in FAULT_KINDS:
        if _fault_hit(spec.seed, kind, spec.fault_rates.get(kind, 0.0), index):
            return kind
    return None


def _rendered_bates_text(b: BatesNumber, fault: str | None) -> str:
    if fault == "omit_bates":
        return ""
    if fault == "wrong_bates":
        wrong = b.value + 1 if b.value + 1 < 10 ** b.width else b.value - 1
        return BatesNumber(b.prefix, b.separator, wrong, b.width).render()
    if fault == "double_stamp":
        return b.render() + "\n" + b.render()
    return b.render()


def _render_page(path: Path, width_px: int, height_px: int, scale: int,
                 bates_text: str, conf_text: str, page_index: int) -> None:
    img = Image.new("L", (width_px, height_px), 255)
    draw = ImageDraw.Draw(img)
    body_scale = max(1, scale // 2)
    glyph_h = font5x7.text_height(scale)
    margin = max(4, width_px // 50)

    # Body filler so pages are not pathologically blank.
    body_y = height_px // 4
    for line in (f"PAGE {page_index + 1}", "THIS DOCUMENT WAS PRODUCED", "IN RESPONSE TO A REQUEST"):
        font5x7.draw_text(draw, (margin, body_y), line, body_scale)
        body_y += font5x7.text_height(body_scale) * 2

    band_h = round_half_up(0.10 * height_px)
    center_y = height_px - band_h // 2
    boundary = round_half_up((2 / 3) * width_px)

    lines = [ln for ln in bates_text.split("\n") if ln]
    if lines:
        total_h = len(lines) * glyph_h + (len(lines) - 1) * 2 * scale
        y = center_y - total_h // 2
        for ln in lines:
            x = width_px - margin - font5x7.text_width(ln, scale)
            font5x7.draw_text(draw, (max(x, boundary + 2), y), ln, scale)
            y += glyph_h + 2 * scale
    if conf_text:
        font5x7.draw_text(draw, (margin, center_y - glyph_h // 2), conf_text, scale)

    img.save(path, format="PNG")


def corrupt_ocr_text(text: str, pattern: str, seed: int) -> str:
    """Apply one instance of an OCR error pattern at a seeded position.

    Patterns compose: the input may already carry other corruptions,
    so positions are derived from the text itself rather than assumed
    from a pristine rendering. zero_to_o is a no-op when no 0 is
    present; prefix_extra_o lands at the head of the digit run (after
    the separator, when there is one), which is where a misread
    leading zero shows up.
    """
    if pattern not in PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r}, expected one of {PATTERNS}")
    rng = random.Random(_sub_seed(seed, pattern, text))
    if pattern == "newlines":
        side = rng.choice(("before", "after", "both"))
        before = "\n" if side in ("before", "both") else ""
        after = "\n" if side in ("after", "both") else ""
        return before + text + after
    start = len(text) - len(text.lstrip())
    end = len(text.rstrip())
    core = text[start:end]
    if pattern == "space":
        if len(core) < 2:
            return text
        at = rng.randint(1, len(core) - 1)
        core = core[:at] + " " + core[at:]
    elif pattern == "zero_to_o":
        zeros = [i for i, c in enumerate(core) if c == "0"]
        if not zeros:
            return text
        at = rng.choice(zeros)
        core = core[:at] + "O" + core[at + 1:]
    else:  # prefix_extra_o
        digit_at = next((i for i, c in enumerate(core) if c.isdigit()), None)
        if digit_at is None:
            return text
        core = core[:digit_at] + "O" + core[digit_at:]
    return text[:start] + core + text[end:]
