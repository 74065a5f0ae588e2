"""Coordinate transforms between panorama pixels, sphere angles, and 3D points.

Three spaces are involved:

* pixel grid ``(u, v)``: ``u`` grows rightward across columns and wraps at the
  horizontal seam, ``v`` grows downward across rows.  Pixel index ``i``
  samples the continuous coordinate ``i + 0.5``.
* sphere ``(phi, theta, r)``: longitude ``phi`` in ``[-pi, pi]`` measured from
  the forward axis toward the right, latitude ``theta`` in ``[-pi/2, pi/2]``
  positive upward, radial distance ``r`` in meters.
* Cartesian ``(x, y, z)``: x rightward, y forward, z upward, origin at the
  camera center.

The continuous mapping is ``phi = 2*pi*u/W - pi`` and
``theta = pi/2 - pi*v/H``, so the panorama center column looks along +y and
the left/right edges meet at the backward direction.

All functions are vectorized: scalars or arrays in, numpy values out, all in
double precision.  Cameras never rotate here; viewpoint changes are pure
translations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PointAtCamera, ZeroRadius

TWO_PI = 2.0 * np.pi

# A re-projected point closer than this to the target camera has no
# well-defined direction.
MIN_CAMERA_DISTANCE = 1e-12


@dataclass(frozen=True)
class PanoDims:
    """Pixel grid size of a panorama: ``width`` columns by ``height`` rows."""

    width: int
    height: int

    def __post_init__(self) -> None:
        if int(self.width) != self.width or int(self.height) != self.height:
            raise ValueError("dims must be integers")
        object.__setattr__(self, "width", int(self.width))
        object.__setattr__(self, "height", int(self.height))
        if self.width < 2 or self.height < 1:
            raise ValueError(f"invalid dims {self.width}x{self.height}")

    @property
    def shape(self) -> tuple[int, int]:
        """(rows, cols) for numpy allocation."""
        return (self.height, self.width)

    @property
    def is_full_panorama(self) -> bool:
        return self.width == 2 * self.height


def wrap_longitude(phi):
    """Wrap angles into [-pi, pi)."""
    return np.mod(np.asarray(phi, dtype=np.float64) + np.pi, TWO_PI) - np.pi


def pix_to_sph(u, v, dims: PanoDims):
    """Continuous pixel coordinates to (longitude, latitude).

    ``u`` wraps modulo the width; ``v`` is clamped to [0, H].
    """
    u = np.mod(np.asarray(u, dtype=np.float64), dims.width)
    v = np.clip(np.asarray(v, dtype=np.float64), 0.0, dims.height)
    phi = TWO_PI * u / dims.width - np.pi
    theta = 0.5 * np.pi - np.pi * v / dims.height
    return phi, theta


def sph_to_pix(phi, theta, dims: PanoDims):
    """(longitude, latitude) to continuous pixel coordinates.

    Exact inverse of :func:`pix_to_sph`; ``u`` is wrapped into [0, W).
    """
    phi = np.asarray(phi, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    u = np.mod((phi + np.pi) * dims.width / TWO_PI, dims.width)
    v = (0.5 * np.pi - theta) * dims.height / np.pi
    return u, v


def sph_to_cart(phi, theta, r):
    """Sphere angles and radial distance to Cartesian (x, y, z)."""
    phi = np.asarray(phi, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    cos_t = np.cos(theta)
    x = r * cos_t * np.sin(phi)
    y = r * cos_t * np.cos(phi)
    z = r * np.sin(theta)
    return x, y, z


def cart_to_sph(x, y, z):
    """Cartesian (x, y, z) to sphere angles and radial distance.

    Raises ZeroRadius if any point coincides with the camera center.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    horiz = np.hypot(x, y)
    r = np.hypot(horiz, z)
    if np.any(r == 0.0):
        raise ZeroRadius("point coincides with the camera center")
    phi = np.arctan2(x, y)
    theta = np.arctan2(z, horiz)
    return phi, theta, r


def transfer_point(x, y, z, t):
    """Express a world-fixed point relative to a camera translated by ``t``."""
    t = _as_translation(t)
    return (
        np.asarray(x, dtype=np.float64) - t[0],
        np.asarray(y, dtype=np.float64) - t[1],
        np.asarray(z, dtype=np.float64) - t[2],
    )


def reproject_pixel(u, v, depth, t, dims: PanoDims):
    """Map source pixels with known radial depth into a translated view.

    Lifts each pixel to 3D at its depth, re-expresses it relative to the
    camera moved by ``t``, and projects back to pixels.

    Returns ``(u_t, v_t, depth_t)`` where ``depth_t`` is the new radial
    distance.  Zero translation returns the (wrapped) inputs unchanged.

    Raises PointAtCamera when a point lands on the target camera center.
    """
    t = _as_translation(t)
    u = np.mod(np.asarray(u, dtype=np.float64), dims.width)
    v = np.clip(np.asarray(v, dtype=np.float64), 0.0, dims.height)
    depth = np.asarray(depth, dtype=np.float64)
    if np.any(depth <= 0.0):
        raise ValueError("depth must be positive")
    if not t.any():
        return u, v, depth + 0.0

    phi, theta = pix_to_sph(u, v, dims)
    x, y, z = sph_to_cart(phi, theta, depth)
    x, y, z = x - t[0], y - t[1], z - t[2]
    horiz = np.hypot(x, y)
    new_depth = np.hypot(horiz, z)
    if np.any(new_depth < MIN_CAMERA_DISTANCE):
        raise PointAtCamera("world point coincides with the target camera")
    phi_t = np.arctan2(x, y)
    theta_t = np.arctan2(z, horiz)
    u_t, v_t = sph_to_pix(phi_t, theta_t, dims)
    return u_t, v_t, new_depth


def _as_translation(t) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64).reshape(-1)
    if t.shape != (3,):
        raise ValueError("translation must have exactly 3 components")
    if not np.all(np.isfinite(t)):
        raise ValueError("translation components must be finite")
    return t
