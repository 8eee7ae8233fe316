"""YOLO segmentation label parsing/serialization and dataset pairing.

Label grammar: one instance per line, ``<class_id> <x1> <y1> ... <xn> <yn>``
with whitespace-separated decimals, coordinates normalized to [0, 1] and at
least three vertex pairs. Serialization renders coordinates with exactly six
decimal places so round trips are bounded by 1e-6 per coordinate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DirectoryNotFound, MalformedLine

log = logging.getLogger(__name__)

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg")


@dataclass(eq=False)
class PolygonAnnotation:
    """One instance: class id plus ordered normalized vertices (N, 2)."""

    class_id: int
    vertices: np.ndarray

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64)
        if self.class_id < 0:
            raise ValueError(f"negative class id {self.class_id}")
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2:
            raise ValueError(f"vertices must be (N, 2), got {self.vertices.shape}")
        if self.vertices.shape[0] < 3:
            raise ValueError("annotation needs at least 3 vertices")
        if np.any(self.vertices < 0.0) or np.any(self.vertices > 1.0):
            raise ValueError("normalized coordinates must lie in [0, 1]")


@dataclass
class LabelFile:
    """All instances of one image; may be empty."""

    annotations: list[PolygonAnnotation] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.annotations)

    def __iter__(self):
        return iter(self.annotations)


def parse_label_file(text: str, lenient: bool = False) -> LabelFile:
    """Parse YOLO-seg label text.

    Blank lines are skipped. Raises MalformedLine (carrying the 1-based line
    number) on bad token counts, a non-integer or negative class id, or
    non-numeric coordinates. Coordinates outside [0, 1] are rejected in
    strict mode and clamped when ``lenient`` is set.
    """
    annotations = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) < 7:
            raise MalformedLine(line_no, f"expected at least 7 tokens, got {len(tokens)}")
        if len(tokens) % 2 == 0:
            raise MalformedLine(line_no, "odd coordinate count (unpaired x/y)")
        try:
            class_id = int(tokens[0])
        except ValueError:
            raise MalformedLine(line_no, f"class id {tokens[0]!r} is not an integer") from None
        if class_id < 0:
            raise MalformedLine(line_no, f"negative class id {class_id}")
        try:
            coords = np.array([float(t) for t in tokens[1:]], dtype=np.float64)
        except ValueError:
            raise MalformedLine(line_no, "non-numeric coordinate") from None
        if not np.all(np.isfinite(coords)):
            raise MalformedLine(line_no, "non-finite coordinate")
        if np.any(coords < 0.0) or np.any(coords > 1.0):
            if lenient:
                coords = np.clip(coords, 0.0, 1.0)
            else:
                raise MalformedLine(line_no, "coordinate outside [0, 1]")
        annotations.append(PolygonAnnotation(class_id, coords.reshape(-1, 2)))
    return LabelFile(annotations)


def serialize_label_file(lf: LabelFile) -> str:
    """Render one line per annotation, 6 decimal places, '\\n'-terminated."""
    lines = []
    for ann in lf:
        coords = " ".join(f"{v:.6f}" for v in ann.vertices.reshape(-1))
        lines.append(f"{ann.class_id} {coords}\n")
    return "".join(lines)


@dataclass(frozen=True)
class DatasetPair:
    """An image and its label file; label_path is None when no label exists
    (treated as an image with zero instances)."""

    image_path: Path
    label_path: Path | None

    @property
    def stem(self) -> str:
        return self.image_path.stem


def scan_dataset(images_dir, labels_dir) -> list[DatasetPair]:
    """Pair image files with label files by stem, sorted lexicographically.

    Images without a label get label_path None; label files without an image
    are logged as warnings. Duplicate image stems keep the lexicographically
    first file (also warned).
    """
    images_dir = Path(images_dir)
    labels_dir = Path(labels_dir)
    for d in (images_dir, labels_dir):
        if not d.is_dir():
            raise DirectoryNotFound(f"not a directory: {d}")

    images: dict[str, Path] = {}
    for path in sorted(images_dir.iterdir()):
        if path.suffix.lower() not in IMAGE_EXTENSIONS or not path.is_file():
            continue
        if path.stem in images:
            log.warning("duplicate image stem %r: keeping %s, ignoring %s",
                        path.stem, images[path.stem].name, path.name)
            continue
        images[path.stem] = path

    labels = {p.stem: p for p in sorted(labels_dir.glob("*.txt")) if p.is_file()}
    for stem in sorted(set(labels) - set(images)):
        log.warning("label file %s has no matching image", labels[stem].name)

    return [DatasetPair(images[stem], labels.get(stem))
            for stem in sorted(images)]
