"""Command-line front end: batch dataset augmentation and the benchmark.

Exit codes: 0 success, 1 partial failure (some files failed but processing
continued), 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .bench import SyntheticDatasetSpec, generate_synthetic, run_bench
from .errors import DirectoryNotFound, PolyAugError
from .labels import DatasetPair, LabelFile, parse_label_file, scan_dataset, serialize_label_file
from .pipeline import augment_pair
from .raster import load_image, save_png
from .transforms import TransformSpec, build_augmentation, parse_transform_spec


@dataclass
class AugConfig:
    images_dir: Path
    labels_dir: Path
    out_dir: Path
    transforms: list[TransformSpec] = field(default_factory=list)
    threshold: float = 0.0
    seed: int = 0
    jobs: int = 1
    lenient: bool = False
    suffix: str = "_aug"


def derive_file_seed(seed: int, stem: str) -> int:
    """Stable per-file seed from the global seed and the file stem, so output
    does not depend on processing order or worker count."""
    digest = hashlib.blake2b(f"{seed}:{stem}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


@dataclass
class FileResult:
    stem: str
    kept: int = 0
    dismissed: int = 0
    error: str | None = None


def _augment_one(pair: DatasetPair, cfg: AugConfig) -> FileResult:
    try:
        image = load_image(pair.image_path)
        text = pair.label_path.read_text() if pair.label_path else ""
        lf = parse_label_file(text, lenient=cfg.lenient)
        rng = random.Random(derive_file_seed(cfg.seed, pair.stem))
        h, w = image.shape[:2]
        aug = build_augmentation(cfg.transforms, w, h, rng)
        warped, outcome = augment_pair(image, lf, aug, cfg.threshold)

        out_name = f"{pair.stem}{cfg.suffix}"
        save_png(cfg.out_dir / "images" / f"{out_name}.png", warped)
        (cfg.out_dir / "labels" / f"{out_name}.txt").write_text(
            serialize_label_file(LabelFile(outcome.kept)))
        return FileResult(pair.stem, len(outcome.kept), len(outcome.dismissed))
    except (PolyAugError, OSError, ValueError) as exc:
        return FileResult(pair.stem, error=str(exc))


def cmd_augment(cfg: AugConfig) -> int:
    pairs = scan_dataset(cfg.images_dir, cfg.labels_dir)
    (cfg.out_dir / "images").mkdir(parents=True, exist_ok=True)
    (cfg.out_dir / "labels").mkdir(parents=True, exist_ok=True)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(lambda p: _augment_one(p, cfg), pairs))
    else:
        results = [_augment_one(pair, cfg) for pair in pairs]

    failures = 0
    for res in sorted(results, key=lambda r: r.stem):
        if res.error is not None:
            failures += 1
            print(f"{res.stem}: ERROR {res.error}", file=sys.stderr)
        else:
            print(f"{res.stem}: kept {res.kept} dismissed {res.dismissed}")
    print(f"processed {len(results)} file(s), {failures} failed")
    return 1 if failures else 0


def cmd_bench(spec: SyntheticDatasetSpec, transforms: list[TransformSpec],
              threshold: float, as_json: bool) -> int:
    dataset = generate_synthetic(spec)
    report = run_bench(dataset, transforms, threshold)
    print(report.to_json() if as_json else report.format_table())
    return 0


def _threshold_arg(value: str) -> float:
    t = float(value)
    if not 0.0 <= t <= 1.0:
        raise argparse.ArgumentTypeError(f"threshold must be in [0, 1], got {t}")
    return t


def _transform_arg(value: str) -> TransformSpec:
    try:
        return parse_transform_spec(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyaug",
        description="Geometric augmentation for polygon instance-segmentation datasets.")
    sub = parser.add_subparsers(dest="command", required=True)

    aug = sub.add_parser("augment", help="augment an images/labels dataset")
    aug.add_argument("--images", required=True, type=Path, help="input images directory")
    aug.add_argument("--labels", required=True, type=Path, help="input YOLO-seg labels directory")
    aug.add_argument("--out", required=True, type=Path,
                     help="output root (gets images/ and labels/ subdirectories)")
    aug.add_argument("--transform", action="append", default=[], type=_transform_arg,
                     metavar="SPEC",
                     help="vflip | hflip | rotate=DEG | rotate=LO..HI | crop=X0,Y0,W,H; "
                          "repeat to chain in order (default: identity)")
    aug.add_argument("--threshold", type=_threshold_arg, default=0.0,
                     help="dismiss instances whose retained visible area fraction "
                          "is below this (default 0)")
    aug.add_argument("--seed", type=int, default=0, help="global seed (default 0)")
    aug.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")
    aug.add_argument("--lenient", action="store_true",
                     help="clamp out-of-range label coordinates instead of failing")
    aug.add_argument("--suffix", default="_aug", help="output filename suffix (default _aug)")

    ben = sub.add_parser("bench", help="time/space comparison: polygon pipeline vs mask oracle")
    ben.add_argument("--n-images", type=int, default=16)
    ben.add_argument("--instances", type=int, default=4, help="instances per image")
    ben.add_argument("--vertices", type=int, default=12, help="vertices per instance")
    ben.add_argument("--size", type=int, default=256, help="square image size in pixels")
    ben.add_argument("--transform", action="append", default=[], type=_transform_arg,
                     metavar="SPEC", help="transform chain (default: vflip)")
    ben.add_argument("--threshold", type=_threshold_arg, default=0.0)
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--json", action="store_true", help="emit a machine-readable report")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "augment":
        if args.jobs < 1:
            parser.error("--jobs must be >= 1")
        out = args.out.resolve()
        if out in (args.images.resolve(), args.labels.resolve()):
            parser.error("--out must differ from the input directories")
        cfg = AugConfig(
            images_dir=args.images,
            labels_dir=args.labels,
            out_dir=args.out,
            transforms=args.transform,
            threshold=args.threshold,
            seed=args.seed,
            jobs=args.jobs,
            lenient=args.lenient,
            suffix=args.suffix,
        )
        try:
            return cmd_augment(cfg)
        except DirectoryNotFound as exc:
            parser.error(str(exc))

    if args.command == "bench":
        try:
            spec = SyntheticDatasetSpec(
                n_images=args.n_images,
                instances_per_image=args.instances,
                vertices_per_instance=args.vertices,
                image_size=args.size,
                seed=args.seed,
            )
        except ValueError as exc:
            parser.error(str(exc))
        transforms = args.transform or [TransformSpec(kind="vflip")]
        return cmd_bench(spec, transforms, args.threshold, args.json)

    parser.error(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
