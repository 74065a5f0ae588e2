"""Raster buffers for panoramas plus bit-exact PNG I/O and nearest upsampling.

RGB panoramas are 8-bit PNGs holding values in [0, 1]; depth maps are 16-bit
single-channel PNGs storing integer millimeters; masks are 8-bit PNGs storing
0 or 255.  Buffers are immutable once constructed and safe to share across
threads.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DepthOutOfRange, FormatError, IoError, ZeroDepth
from .sphere import PanoDims

# 16-bit millimeter storage tops out at 65535 mm.
DEPTH_CEILING_M = 65.535


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ImageBuffer:
    """H x W x C raster of finite real values (RGB, features, guidance maps)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] < 1:
            raise ValueError("image data must have shape (H, W, C) with C >= 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("image data must be finite")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def dims(self) -> PanoDims:
        return PanoDims(self.data.shape[1], self.data.shape[0])

    @property
    def channels(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class DepthBuffer:
    """H x W map of radial distances in meters, in (0, 65.535]."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("depth data must have shape (H, W)")
        if not np.all(np.isfinite(arr)):
            raise ValueError("depth data must be finite")
        if np.any(arr <= 0.0):
            raise DepthOutOfRange("depth values must be positive")
        if np.any(arr > DEPTH_CEILING_M):
            raise DepthOutOfRange(f"depth values must be <= {DEPTH_CEILING_M} m")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def dims(self) -> PanoDims:
        return PanoDims(self.data.shape[1], self.data.shape[0])


@dataclass(frozen=True)
class Mask:
    """H x W binary map; nonzero input becomes True."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise ValueError("mask data must have shape (H, W)")
        if arr.dtype != np.bool_:
            vals = np.unique(arr)
            if not np.all(np.isin(vals, (0, 1))):
                raise ValueError("mask values must be 0 or 1")
            arr = arr.astype(bool)
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def dims(self) -> PanoDims:
        return PanoDims(self.data.shape[1], self.data.shape[0])


def _open_png(path) -> Image.Image:
    try:
        img = Image.open(path)
        img.load()
    except UnidentifiedImageError as e:
        # must precede OSError: PIL derives it from OSError
        raise FormatError(f"{path} is not a recognized image") from e
    except (FileNotFoundError, PermissionError, IsADirectoryError, OSError) as e:
        raise IoError(f"cannot read {path}: {e}") from e
    if img.format != "PNG":
        raise FormatError(f"{path} is not a PNG (format={img.format})")
    return img


def _save_png(img: Image.Image, path) -> None:
    try:
        img.save(os.fspath(path), format="PNG")
    except (FileNotFoundError, PermissionError, IsADirectoryError, OSError) as e:
        raise IoError(f"cannot write {path}: {e}") from e


def load_rgb(path) -> ImageBuffer:
    """Read an 8-bit RGB PNG; values become byte/255."""
    img = _open_png(path)
    if img.mode != "RGB":
        raise FormatError(f"{path}: expected 8-bit RGB, got mode {img.mode}")
    data = np.asarray(img, dtype=np.float64) / 255.0
    return ImageBuffer(data)


def save_rgb(buffer: ImageBuffer, path) -> None:
    """Write a 3-channel buffer as 8-bit RGB PNG, round(value*255) clamped."""
    if buffer.channels != 3:
        raise FormatError(f"RGB save needs 3 channels, got {buffer.channels}")
    q = np.clip(np.floor(buffer.data * 255.0 + 0.5), 0, 255).astype(np.uint8)
    _save_png(Image.fromarray(q, mode="RGB"), path)


def load_depth(path) -> DepthBuffer:
    """Read a 16-bit grayscale PNG of millimeters into meters."""
    img = _open_png(path)
    if img.mode not in ("I;16", "I"):
        raise FormatError(f"{path}: expected 16-bit grayscale, got mode {img.mode}")
    stored = np.asarray(img)
    if stored.ndim != 2:
        raise FormatError(f"{path}: depth PNG must be single-channel")
    if np.any(stored == 0):
        raise ZeroDepth(f"{path} contains zero depth values")
    return DepthBuffer(stored.astype(np.float64) / 1000.0)


def save_depth(buffer: DepthBuffer, path) -> None:
    """Write depth as 16-bit grayscale PNG of rounded millimeters."""
    mm = np.floor(buffer.data * 1000.0 + 0.5)
    if np.any(mm > 65535):
        raise DepthOutOfRange("depth exceeds the 65.535 m storage ceiling")
    _save_png(Image.fromarray(mm.astype(np.uint16)), path)


def load_mask(path) -> Mask:
    """Read an 8-bit grayscale PNG of {0, 255} as a binary mask."""
    img = _open_png(path)
    if img.mode != "L":
        raise FormatError(f"{path}: expected 8-bit grayscale, got mode {img.mode}")
    stored = np.asarray(img)
    if not np.all(np.isin(np.unique(stored), (0, 255))):
        raise FormatError(f"{path}: mask PNG must contain only 0 and 255")
    return Mask(stored > 0)


def save_mask(mask: Mask, path) -> None:
    _save_png(Image.fromarray(np.where(mask.data, 255, 0).astype(np.uint8), mode="L"), path)


def save_gray(buffer: ImageBuffer, path) -> None:
    """Write a single-channel [0, 1] buffer as 8-bit grayscale PNG."""
    if buffer.channels != 1:
        raise FormatError(f"grayscale save needs 1 channel, got {buffer.channels}")
    q = np.clip(np.floor(buffer.data[:, :, 0] * 255.0 + 0.5), 0, 255).astype(np.uint8)
    _save_png(Image.fromarray(q, mode="L"), path)


def save_weights(weights: np.ndarray, path) -> None:
    """Write an accumulated-weight map as 16-bit PNG, fixed point 1/1000."""
    q = np.clip(np.floor(np.asarray(weights, dtype=np.float64) * 1000.0 + 0.5), 0, 65535)
    _save_png(Image.fromarray(q.astype(np.uint16)), path)


def load_weights(path) -> np.ndarray:
    img = _open_png(path)
    if img.mode not in ("I;16", "I"):
        raise FormatError(f"{path}: expected 16-bit grayscale, got mode {img.mode}")
    return np.asarray(img).astype(np.float64) / 1000.0


def _check_factor(factor) -> int:
    if int(factor) != factor or factor < 1:
        raise ValueError("upsample factor must be an integer >= 1")
    return int(factor)


def nearest_upsample(buffer: ImageBuffer, factor: int) -> ImageBuffer:
    """Integer nearest-neighbor upsampling: output pixel (u, v) copies source
    pixel (u // factor, v // factor)."""
    f = _check_factor(factor)
    if f == 1:
        return buffer
    data = np.repeat(np.repeat(buffer.data, f, axis=0), f, axis=1)
    return ImageBuffer(data)


def upsampled_depth(buffer: DepthBuffer, factor: int) -> DepthBuffer:
    """Nearest-neighbor upsampling for depth maps; same rule as images."""
    f = _check_factor(factor)
    if f == 1:
        return buffer
    return DepthBuffer(np.repeat(np.repeat(buffer.data, f, axis=0), f, axis=1))
