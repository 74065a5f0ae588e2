"""Exception hierarchy shared by all panowarp modules.

Two branches matter for scripting: ``ValidationError`` (bad inputs or
geometry, CLI exit code 2) and ``IoError`` (file access, CLI exit code 3).
"""


class PanowarpError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PanowarpError):
    """Invalid argument, geometry, or file content."""


class IoError(PanowarpError):
    """File could not be read or written."""


class ZeroRadius(ValidationError):
    """Cartesian point coincides with the camera center."""


class PointAtCamera(ValidationError):
    """Re-projected world point lies on the target camera center."""


class DimsMismatch(ValidationError):
    """Buffers that must share a pixel grid do not."""


class NonPanoramicDims(ValidationError):
    """Operation requires full-sphere dims (width = 2 * height)."""


class FormatError(ValidationError):
    """File is not a PNG of the expected layout, or JSON is malformed."""


class ZeroDepth(ValidationError):
    """Stored depth value of zero encountered on load."""


class DepthOutOfRange(ValidationError):
    """Depth value outside (0, 65.535] meters."""


class DegenerateCorner(ValidationError):
    """Floor corner at or above the horizon cannot be lifted to 3D."""


class InvalidLayout(ValidationError):
    """Layout violates its structural invariants."""


class CameraOutsideRoom(ValidationError):
    """Camera position is not strictly inside the room."""


class CameraAboveCeiling(ValidationError):
    """Translated camera would be at or above the ceiling."""


class CameraBelowFloor(ValidationError):
    """Translated camera would be at or below the floor."""


class RoomTooSmall(ValidationError):
    """Requested translation distances cannot be placed inside the room."""


class EmptyMask(ValidationError):
    """Evaluation mask excludes every pixel."""


class ValueOutOfRange(ValidationError):
    """Values outside the required [0, 1] range."""


class ImageTooSmall(ValidationError):
    """Image smaller than the metric's window."""
