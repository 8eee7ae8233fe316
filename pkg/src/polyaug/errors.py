"""Exception types shared across the package."""


class PolyAugError(Exception):
    """Base class for all polyaug errors."""


class MalformedLine(PolyAugError):
    """A label-file line violates the YOLO segmentation grammar."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"malformed label line {line_no}: {reason}")


class DirectoryNotFound(PolyAugError):
    """A dataset directory does not exist."""


class DegenerateInstance(PolyAugError):
    """An input instance has zero polygon area and cannot be encoded."""

    def __init__(self, instance_id: int):
        self.instance_id = instance_id
        super().__init__(f"instance {instance_id} has zero area")


class InvalidCrop(PolyAugError):
    """A crop window is empty or exceeds the source frame."""


class DimensionMismatch(PolyAugError):
    """Chained transforms or compared masks have incompatible dimensions."""
