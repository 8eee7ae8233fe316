"""Affine augmentation constructors (flips, rotation, crop) and composition.

Every augmentation is a single invertible 2x3 pixel-space map plus the output
canvas size. Rotation keeps the canvas size (content leaving the frame is
lost); crops are specified in source pixels.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DimensionMismatch, InvalidCrop
from .geometry import AffineMap

MIN_DET = 1e-9


@dataclass(frozen=True)
class AffineAugmentation:
    """Invertible map from source pixels to destination pixels, with the
    source and destination canvas sizes."""

    map: AffineMap
    in_width: int
    in_height: int
    out_width: int
    out_height: int

    def __post_init__(self):
        if self.in_width < 1 or self.in_height < 1:
            raise ValueError("input dimensions must be >= 1")
        if self.out_width < 1 or self.out_height < 1:
            raise ValueError("output dimensions must be >= 1")
        if abs(self.map.det) < MIN_DET:
            raise ValueError(f"non-invertible map (|det| = {abs(self.map.det):.3g})")


def make_identity(w: int, h: int) -> AffineAugmentation:
    return AffineAugmentation(AffineMap.identity(), w, h, w, h)


def make_vflip(w: int, h: int) -> AffineAugmentation:
    """(x, y) -> (x, h - y)."""
    return AffineAugmentation(AffineMap(1.0, 0.0, 0.0, -1.0, 0.0, float(h)), w, h, w, h)


def make_hflip(w: int, h: int) -> AffineAugmentation:
    """(x, y) -> (w - x, y)."""
    return AffineAugmentation(AffineMap(-1.0, 0.0, 0.0, 1.0, float(w), 0.0), w, h, w, h)


def make_rotate(w: int, h: int, degrees: float) -> AffineAugmentation:
    """Counter-clockwise rotation about the image center, same-size canvas."""
    theta = math.radians(degrees)
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    cx = w / 2.0
    cy = h / 2.0
    return AffineAugmentation(
        AffineMap(
            a=cos_t, b=-sin_t, c=sin_t, d=cos_t,
            tx=cx - cos_t * cx + sin_t * cy,
            ty=cy - sin_t * cx - cos_t * cy,
        ),
        w, h, w, h,
    )


def make_crop(w: int, h: int, x0: int, y0: int, cw: int, ch: int) -> AffineAugmentation:
    """(x, y) -> (x - x0, y - y0) onto a (cw, ch) canvas."""
    if cw < 1 or ch < 1:
        raise InvalidCrop(f"empty crop window {cw}x{ch}")
    if x0 < 0 or y0 < 0 or x0 + cw > w or y0 + ch > h:
        raise InvalidCrop(
            f"crop {cw}x{ch}+{x0}+{y0} exceeds {w}x{h} frame")
    return AffineAugmentation(
        AffineMap(1.0, 0.0, 0.0, 1.0, -float(x0), -float(y0)), w, h, cw, ch)


def compose(steps: Sequence[AffineAugmentation]) -> AffineAugmentation:
    """Collapse a chain of augmentations into one, in application order."""
    if not steps:
        raise DimensionMismatch("cannot compose an empty transform chain")
    combined = steps[0]
    for step in steps[1:]:
        if (step.in_width, step.in_height) != (combined.out_width, combined.out_height):
            raise DimensionMismatch(
                f"step expects {step.in_width}x{step.in_height} input but the "
                f"previous step produced {combined.out_width}x{combined.out_height}")
        combined = AffineAugmentation(
            step.map.compose(combined.map),
            combined.in_width, combined.in_height,
            step.out_width, step.out_height,
        )
    return combined


_ROTATE_RANGE = re.compile(r"^(-?\d+(?:\.\d+)?)\.\.(-?\d+(?:\.\d+)?)$")


@dataclass(frozen=True)
class TransformSpec:
    """CLI-facing description of a transform: ``vflip``, ``hflip``,
    ``rotate=30`` (or ``rotate=-30..30`` for a seeded random angle),
    ``crop=x0,y0,w,h``, or a compose chain."""

    kind: str
    degrees: float | None = None
    degrees_range: tuple[float, float] | None = None
    crop: tuple[int, int, int, int] | None = None
    steps: tuple["TransformSpec", ...] = field(default=())

    def describe(self) -> str:
        if self.kind == "rotate":
            if self.degrees_range is not None:
                return f"rotate={self.degrees_range[0]}..{self.degrees_range[1]}"
            return f"rotate={self.degrees}"
        if self.kind == "crop":
            return "crop=" + ",".join(str(v) for v in self.crop)
        if self.kind == "compose":
            return "+".join(s.describe() for s in self.steps)
        return self.kind


def parse_transform_spec(text: str) -> TransformSpec:
    """Parse one CLI transform argument. Raises ValueError on bad syntax."""
    text = text.strip()
    if text in ("vflip", "hflip"):
        return TransformSpec(kind=text)
    if text.startswith("rotate="):
        arg = text[len("rotate="):]
        m = _ROTATE_RANGE.match(arg)
        if m:
            lo, hi = float(m.group(1)), float(m.group(2))
            if hi < lo:
                raise ValueError(f"empty rotate range in {text!r}")
            return TransformSpec(kind="rotate", degrees_range=(lo, hi))
        try:
            return TransformSpec(kind="rotate", degrees=float(arg))
        except ValueError:
            raise ValueError(f"bad rotate angle in {text!r}") from None
    if text.startswith("crop="):
        parts = text[len("crop="):].split(",")
        if len(parts) != 4:
            raise ValueError(f"crop needs x0,y0,w,h in {text!r}")
        try:
            x0, y0, cw, ch = (int(p) for p in parts)
        except ValueError:
            raise ValueError(f"non-integer crop parameter in {text!r}") from None
        return TransformSpec(kind="crop", crop=(x0, y0, cw, ch))
    raise ValueError(f"unknown transform {text!r}")


def realize(spec: TransformSpec, w: int, h: int,
            rng: random.Random | None = None) -> AffineAugmentation:
    """Instantiate a spec against a source frame, drawing any random
    parameters from ``rng``."""
    if spec.kind == "vflip":
        return make_vflip(w, h)
    if spec.kind == "hflip":
        return make_hflip(w, h)
    if spec.kind == "rotate":
        if spec.degrees_range is not None:
            if rng is None:
                raise ValueError("rotate range requires a seeded generator")
            degrees = rng.uniform(*spec.degrees_range)
        else:
            degrees = spec.degrees
        return make_rotate(w, h, degrees)
    if spec.kind == "crop":
        return make_crop(w, h, *spec.crop)
    if spec.kind == "compose":
        return build_augmentation(spec.steps, w, h, rng)
    raise ValueError(f"unknown transform kind {spec.kind!r}")


def build_augmentation(specs: Sequence[TransformSpec], w: int, h: int,
                       rng: random.Random | None = None) -> AffineAugmentation:
    """Realize a chain of specs in order, threading canvas dimensions.

    An empty chain yields the identity augmentation.
    """
    if not specs:
        return make_identity(w, h)
    steps = []
    cur_w, cur_h = w, h
    for spec in specs:
        step = realize(spec, cur_w, cur_h, rng)
        steps.append(step)
        cur_w, cur_h = step.out_width, step.out_height
    return compose(steps)
