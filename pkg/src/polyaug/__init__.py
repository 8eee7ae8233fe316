"""Geometric augmentation for polygon instance-segmentation annotations.

Polygons are augmented by flattening their vertices into identified
keypoints, transforming the keypoints together with the image, reassembling
the polygons, and dismissing instances whose retained visible area falls
below a threshold. A conventional mask-based path is included as a
correctness oracle and benchmark baseline.
"""

from .bench import BenchReport, SyntheticDatasetSpec, generate_synthetic, run_bench
from .errors import (
    DegenerateInstance,
    DimensionMismatch,
    DirectoryNotFound,
    InvalidCrop,
    MalformedLine,
    PolyAugError,
)
from .geometry import AffineMap, Rect, apply_affine, clip_to_rect, polygon_area, polygon_bbox
from .labels import (
    DatasetPair,
    LabelFile,
    PolygonAnnotation,
    parse_label_file,
    scan_dataset,
    serialize_label_file,
)
from .pipeline import (
    AugmentationOutcome,
    IdentifiedKeypoint,
    KeypointSet,
    augment_pair,
    format_keypoint_name,
    keypoints_to_yolo,
    yolo_to_keypoints,
)
from .raster import (
    annotation_bytes,
    load_image,
    mask_bytes,
    mask_iou,
    oracle_augment,
    rasterize_polygon,
    save_png,
    warp_image,
)
from .transforms import (
    AffineAugmentation,
    TransformSpec,
    build_augmentation,
    compose,
    make_crop,
    make_hflip,
    make_identity,
    make_rotate,
    make_vflip,
    parse_transform_spec,
)

__version__ = "0.1.0"
