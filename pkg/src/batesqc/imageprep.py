"""Stamp-region geometry: band cropping and corner splitting.

All operations are pure; each returns a new PageImage and never touches
the input raster. The stamp band is a horizontal strip at the bottom
(or top) of the page, split two-thirds/one-third into the left
(confidentiality) and right (Bates) corner regions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from PIL import Image

from .errors import DegenerateRegion

Image.MAX_IMAGE_PIXELS = None  # productions run to very large scans

RESAMPLE = {
    "nearest": Image.Resampling.NEAREST,
    "bilinear": Image.Resampling.BILINEAR,
}


def round_half_up(x: float) -> int:
    """Deterministic .5-up rounding, identical on every platform."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class PageImage:
    """An 8-bit grayscale or RGB raster plus its provenance.

    band/corner are set by crop_band and split_corners so downstream
    consumers (the scripted OCR backend, region dumps) can identify the
    region without re-deriving geometry.
    """

    image: Image.Image
    source_path: str = ""
    page_index: int = 0
    band: str | None = None
    corner: str | None = None

    def __post_init__(self):
        if self.image.mode not in ("L", "RGB"):
            raise ValueError(f"expected L or RGB raster, got mode {self.image.mode!r}")
        if self.image.width < 1 or self.image.height < 1:
            raise ValueError("image must be at least 1x1")

    @property
    def width_px(self) -> int:
        return self.image.width

    @property
    def height_px(self) -> int:
        return self.image.height

    @property
    def pixels(self) -> bytes:
        return self.image.tobytes()


@dataclass(frozen=True)
class RegionSpec:
    """Where the stamp band sits and how it splits into corners.

    band_height is a fraction of page height when float (must be in
    (0, 0.5]) or an absolute pixel count when int. split is the left
    corner's share of the band width, 2/3 by default.
    """

    band: str = "bottom"
    band_height: float | int = 0.10
    split: float = 2 / 3

    def __post_init__(self):
        if self.band not in ("bottom", "top"):
            raise ValueError(f"band must be bottom or top, got {self.band!r}")
        if isinstance(self.band_height, int):
            if self.band_height < 1:
                raise ValueError("absolute band_height must be >= 1 px")
        elif not 0.0 < self.band_height <= 0.5:
            raise ValueError("fractional band_height must be in (0, 0.5]")
        if not 0.0 < self.split < 1.0:
            raise ValueError("split must be in (0, 1)")


def load_pages(path: str) -> list[PageImage]:
    """Decode an image file into one PageImage per page.

    Single-page TIFF and PNG decode to one entry; a multi-page TIFF
    expands to one entry per frame, page_index following frame order.
    """
    pages = []
    with Image.open(path) as img:
        n = getattr(img, "n_frames", 1)
        for i in range(n):
            img.seek(i)
            pages.append(PageImage(_normalize_mode(img), source_path=str(path), page_index=i))
    return pages


def load_page_image(path: str, page_index: int = 0) -> PageImage:
    with Image.open(path) as img:
        if page_index:
            img.seek(page_index)
        return PageImage(_normalize_mode(img), source_path=str(path), page_index=page_index)


def _normalize_mode(img: Image.Image) -> Image.Image:
    if img.mode == "L":
        return img.copy()
    if img.mode in ("1", "I;16", "I", "F", "LA"):
        return img.convert("L")
    return img.convert("RGB")


def crop_band(img: PageImage, spec: RegionSpec, clamp: bool = True) -> PageImage:
    """Crop the stamp band: bottom rows [H-h, H) or top rows [0, h).

    Fractional heights round half-up and are clamped into [1, H];
    pass clamp=False to get DegenerateRegion instead when h rounds
    to zero.
    """
    h_page = img.height_px
    if isinstance(spec.band_height, int):
        h = spec.band_height
    else:
        h = round_half_up(spec.band_height * h_page)
    if h < 1 or h > h_page:
        if not clamp:
            raise DegenerateRegion(f"band height {h} px on a {h_page} px tall page")
        h = min(max(h, 1), h_page)
    if spec.band == "bottom":
        box = (0, h_page - h, img.width_px, h_page)
    else:
        box = (0, 0, img.width_px, h)
    return replace(img, image=img.image.crop(box), band=spec.band, corner=None)


def split_corners(band: PageImage, split: float = 2 / 3) -> tuple[PageImage, PageImage]:
    """Split a band at x = round(split * W) into (left, right) corners.

    The corners are a pixel-exact partition: disjoint, no column
    dropped, widths summing to W. Raises DegenerateRegion if either
    side would be empty.
    """
    w = band.width_px
    x = round_half_up(split * w)
    if x < 1 or x >= w:
        raise DegenerateRegion(f"split {split} of width {w} leaves an empty corner")
    left = band.image.crop((0, 0, x, band.height_px))
    right = band.image.crop((x, 0, w, band.height_px))
    return (
        replace(band, image=left, corner="left"),
        replace(band, image=right, corner="right"),
    )


@dataclass(frozen=True)
class PreprocessOptions:
    grayscale: bool = False
    rescale_to_height: int | None = None
    binarize_threshold: int | None = None
    resample: str = "nearest"

    def __post_init__(self):
        if self.rescale_to_height is not None and self.rescale_to_height < 1:
            raise ValueError("rescale target must be >= 1")
        if self.binarize_threshold is not None and not 0 <= self.binarize_threshold <= 255:
            raise ValueError("binarize_threshold must be in [0, 255]")
        if self.resample not in RESAMPLE:
            raise ValueError(f"resample must be one of {tuple(RESAMPLE)}")


def preprocess(img: PageImage, opts: PreprocessOptions) -> PageImage:
    """Apply grayscale, rescale and binarize, in that fixed order.

    A no-op options set returns the input unchanged, so the transform
    is idempotent at its fixpoint.
    """
    out = img.image
    if opts.grayscale and out.mode != "L":
        out = out.convert("L")
    if opts.rescale_to_height is not None and out.height != opts.rescale_to_height:
        new_w = max(1, round_half_up(out.width * opts.rescale_to_height / out.height))
        out = out.resize((new_w, opts.rescale_to_height), RESAMPLE[opts.resample])
    if opts.binarize_threshold is not None:
        t = opts.binarize_threshold
        out = out.point(lambda p: 255 if p >= t else 0)
    if out is img.image:
        return img
    return replace(img, image=out)


def save_png(img: PageImage, path: str) -> None:
    img.image.save(path, format="PNG")
