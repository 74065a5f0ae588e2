"""Room layouts on panoramas: lifting to 3D, view transformation, guidance maps.

A layout is an ordered list of corner pixels.  Wall-wall junction ``k`` owns
corners ``2k`` (ceiling) and ``2k + 1`` (floor), which share a longitude
because the junction edge is vertical; junctions are sorted by increasing
longitude.

Corner depths cannot be read from a depth map (furniture may occlude them),
so corners are lifted through the known camera height: a floor corner at
latitude ``theta_f < 0`` sits at horizontal range ``h / tan(-theta_f)``, and
its ceiling partner reuses that range.  Once in 3D, moving the camera is a
plain translation and the corners re-project exactly.

Guidance maps rasterize the layout edges as 3D segments (boundaries are
curves under equirectangular projection, so 2D lines would be wrong), stamped
as truncated Gaussians composed with per-pixel max.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CameraAboveCeiling,
    CameraBelowFloor,
    CameraOutsideRoom,
    DegenerateCorner,
    FormatError,
    InvalidLayout,
    IoError,
)
from .imaging import ImageBuffer
from .sphere import PanoDims, cart_to_sph, pix_to_sph, sph_to_pix, wrap_longitude

CEILING = "ceiling"
FLOOR = "floor"

# Floor corners this close to the horizon have unbounded lifted range.
MIN_FLOOR_LATITUDE = 1e-4
# Paired corners must share longitude to within this (radians).
JUNCTION_PHI_TOL = 1e-6


@dataclass(frozen=True)
class LayoutCorner:
    u: float
    v: float
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in (CEILING, FLOOR):
            raise ValueError(f"corner kind must be '{CEILING}' or '{FLOOR}'")


@dataclass(frozen=True)
class Layout:
    """Corner list; junction k = (corners[2k] ceiling, corners[2k+1] floor)."""

    corners: tuple[LayoutCorner, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "corners", tuple(self.corners))

    @property
    def n_corners(self) -> int:
        return len(self.corners)

    @property
    def n_junctions(self) -> int:
        return len(self.corners) // 2

    def pixel_array(self) -> np.ndarray:
        """(N, 2) array of (u, v) in corner order."""
        return np.array([(c.u, c.v) for c in self.corners], dtype=np.float64)


@dataclass(frozen=True)
class CameraConfig:
    """Camera height above the floor plane, meters."""

    height: float = 1.6

    def __post_init__(self) -> None:
        if not self.height > 0:
            raise ValueError("camera height must be positive")


@dataclass(frozen=True)
class LayoutMaps:
    """Soft guidance rasters: boundary (ceiling/wall/floor channels), corner."""

    boundary: ImageBuffer
    corner: ImageBuffer


def validate_layout(layout: Layout, dims: PanoDims) -> list[str]:
    """Check all structural invariants; returns a list of violations."""
    problems = []
    n = layout.n_corners
    if n % 2 != 0:
        problems.append(f"corner count {n} is odd")
    if n < 8:
        problems.append(f"corner count {n} < 8")
    prev_phi = None
    for k in range(n // 2):
        ceil_c, floor_c = layout.corners[2 * k], layout.corners[2 * k + 1]
        if ceil_c.kind != CEILING or floor_c.kind != FLOOR:
            problems.append(f"junction {k} is not a (ceiling, floor) pair")
            continue
        phi_c, theta_c = pix_to_sph(ceil_c.u, ceil_c.v, dims)
        phi_f, theta_f = pix_to_sph(floor_c.u, floor_c.v, dims)
        if theta_c <= 0:
            problems.append(f"junction {k}: ceiling corner latitude {theta_c:.6f} <= 0")
        if theta_f >= 0:
            problems.append(f"junction {k}: floor corner latitude {theta_f:.6f} >= 0")
        dphi = abs(float(wrap_longitude(phi_c - phi_f)))
        if dphi > JUNCTION_PHI_TOL:
            problems.append(f"junction {k}: corner longitudes differ by {dphi:.2e} rad")
        if prev_phi is not None and phi_f < prev_phi:
            problems.append(f"junction {k} breaks ascending longitude order")
        prev_phi = phi_f
    for idx, c in enumerate(layout.corners):
        if not (0.0 <= c.u < dims.width) or not (0.0 <= c.v <= dims.height):
            problems.append(f"corner {idx} pixel ({c.u}, {c.v}) outside the grid")
    return problems


def _require_valid(layout: Layout, dims: PanoDims) -> None:
    problems = validate_layout(layout, dims)
    if problems:
        raise InvalidLayout("; ".join(problems))


def lift_layout(layout: Layout, cam: CameraConfig, dims: PanoDims) -> np.ndarray:
    """Lift corners to 3D camera-frame points, (N, 3), in corner order."""
    _require_valid(layout, dims)
    h = cam.height
    pts = np.empty((layout.n_corners, 3))
    for k in range(layout.n_junctions):
        ceil_c, floor_c = layout.corners[2 * k], layout.corners[2 * k + 1]
        phi_f, theta_f = pix_to_sph(floor_c.u, floor_c.v, dims)
        if theta_f >= -MIN_FLOOR_LATITUDE:
            raise DegenerateCorner(
                f"junction {k}: floor corner latitude {float(theta_f):.6f} rad "
                "is too close to the horizon"
            )
        rho = h / math.tan(-float(theta_f))
        x = rho * math.sin(float(phi_f))
        y = rho * math.cos(float(phi_f))
        _, theta_c = pix_to_sph(ceil_c.u, ceil_c.v, dims)
        pts[2 * k] = (x, y, rho * math.tan(float(theta_c)))
        pts[2 * k + 1] = (x, y, -h)
    return pts


def _point_in_polygon(px: float, py: float, poly: np.ndarray) -> bool:
    """Even-odd test; boundary points are not guaranteed either way."""
    inside = False
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_cross:
                inside = not inside
    return inside


def transform_layout(
    layout: Layout, t, cam: CameraConfig, dims: PanoDims
) -> tuple[Layout, CameraConfig]:
    """Re-express a layout from a camera translated by ``t``.

    Corners are lifted to 3D via the camera height, shifted, re-projected,
    and junctions re-sorted by longitude.  The returned camera height is
    ``h + tz``.

    Raises CameraOutsideRoom / CameraAboveCeiling / CameraBelowFloor when the
    translated camera leaves the room.
    """
    t = np.asarray(t, dtype=np.float64).reshape(3)
    pts = lift_layout(layout, cam, dims)

    floor_xy = pts[1::2, :2]
    ceil_z = pts[0::2, 2]
    if not _point_in_polygon(float(t[0]), float(t[1]), floor_xy):
        raise CameraOutsideRoom("translated camera leaves the floor polygon")
    new_h = cam.height + float(t[2])
    if new_h <= 0:
        raise CameraBelowFloor(f"translated camera height {new_h:.3f} m <= 0")
    if float(t[2]) >= float(np.min(ceil_z)):
        raise CameraAboveCeiling("translated camera reaches the ceiling")

    shifted = pts - t[None, :]
    phi, theta, _ = cart_to_sph(shifted[:, 0], shifted[:, 1], shifted[:, 2])
    u, v = sph_to_pix(phi, theta, dims)

    order = np.argsort(phi[1::2], kind="stable")
    corners = []
    for k in order:
        corners.append(LayoutCorner(float(u[2 * k]), float(v[2 * k]), CEILING))
        corners.append(LayoutCorner(float(u[2 * k + 1]), float(v[2 * k + 1]), FLOOR))
    return Layout(tuple(corners)), CameraConfig(new_h)


def _snap(u: np.ndarray, v: np.ndarray, dims: PanoDims) -> tuple[np.ndarray, np.ndarray]:
    """Continuous projection to the pixel containing it."""
    cols = np.mod(np.floor(u).astype(np.int64), dims.width)
    rows = np.clip(np.floor(v).astype(np.int64), 0, dims.height - 1)
    return rows, cols


def _stamp_gaussians(
    target: np.ndarray, rows: np.ndarray, cols: np.ndarray, sigma: float
) -> None:
    """Max-compose truncated Gaussian footprints centered on pixels."""
    H, W = target.shape
    flat = np.unique(rows * W + cols)
    rows = flat // W
    cols = flat % W
    radius = int(math.floor(3.0 * sigma))
    for dy in range(-radius, radius + 1):
        rr = rows + dy
        keep = (rr >= 0) & (rr < H)
        if not keep.any():
            continue
        for dx in range(-radius, radius + 1):
            d2 = dx * dx + dy * dy
            if d2 > 9.0 * sigma * sigma:
                continue
            g = math.exp(-d2 / (2.0 * sigma * sigma))
            cc = np.mod(cols[keep] + dx, W)
            np.maximum.at(target, (rr[keep], cc), g)


def rasterize_layout(
    layout: Layout, cam: CameraConfig, dims: PanoDims, sigma: float = 2.0
) -> LayoutMaps:
    """Draw Gaussian-blurred boundary and corner guidance maps.

    Boundary channels: 0 ceiling-wall, 1 wall-wall, 2 floor-wall.  Each edge
    is sampled densely along its 3D segment, projected, and stamped as a
    truncated Gaussian (peak 1, std ``sigma`` px, cut at 3 sigma) composed
    with per-pixel max, so values stay in [0, 1] and drawing order is
    irrelevant.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    pts = lift_layout(layout, cam, dims)
    m = layout.n_junctions
    ceil_pts = pts[0::2]
    floor_pts = pts[1::2]

    n_samples = max(256, math.ceil(4 * dims.width / layout.n_corners))
    ts = np.linspace(0.0, 1.0, n_samples)[:, None]

    boundary = np.zeros((dims.height, dims.width, 3))
    for k in range(m):
        nxt = (k + 1) % m
        segments = (
            (ceil_pts[k], ceil_pts[nxt], 0),
            (ceil_pts[k], floor_pts[k], 1),
            (floor_pts[k], floor_pts[nxt], 2),
        )
        for a, b, channel in segments:
            samples = a[None, :] + ts * (b - a)[None, :]
            phi, theta, _ = cart_to_sph(samples[:, 0], samples[:, 1], samples[:, 2])
            u, v = sph_to_pix(phi, theta, dims)
            rows, cols = _snap(u, v, dims)
            _stamp_gaussians(boundary[:, :, channel], rows, cols, sigma)

    corner = np.zeros((dims.height, dims.width))
    pix = layout.pixel_array()
    rows, cols = _snap(pix[:, 0], pix[:, 1], dims)
    _stamp_gaussians(corner, rows, cols, sigma)

    return LayoutMaps(
        boundary=ImageBuffer(boundary), corner=ImageBuffer(corner[:, :, None])
    )


def save_layout(path, layout: Layout, cam: CameraConfig, dims: PanoDims) -> None:
    """Write the layout JSON: width, height, camera_height, corners."""
    doc = {
        "width": dims.width,
        "height": dims.height,
        "camera_height": cam.height,
        "corners": [{"u": c.u, "v": c.v, "kind": c.kind} for c in layout.corners],
    }
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e


def load_layout(path) -> tuple[Layout, CameraConfig, PanoDims]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise FormatError(f"{path} is not valid JSON: {e}") from e
    try:
        dims = PanoDims(int(doc["width"]), int(doc["height"]))
        cam = CameraConfig(float(doc["camera_height"]))
        corners = tuple(
            LayoutCorner(float(c["u"]), float(c["v"]), str(c["kind"]))
            for c in doc["corners"]
        )
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"{path} is missing or mistypes a layout field: {e}") from e
    return Layout(corners), cam, dims
