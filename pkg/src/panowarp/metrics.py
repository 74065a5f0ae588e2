"""Image and layout-map evaluation: L1, PSNR, SSIM, cross entropy.

Masks mark pixels to exclude (hole masks plug in directly); every report
carries the fraction of pixels actually evaluated.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.signal import convolve2d

from .errors import DimsMismatch, EmptyMask, ImageTooSmall, ValueOutOfRange
from .imaging import ImageBuffer, Mask
from .layout import LayoutMaps

PSNR_CAP_DB = 99.0

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


class MetricReport(NamedTuple):
    name: str
    value: float
    mask_coverage: float

    def as_dict(self) -> dict:
        return {"metric": self.name, "value": self.value, "mask_coverage": self.mask_coverage}


def _paired(a: ImageBuffer, b: ImageBuffer, mask: Mask | None):
    """Flatten two buffers to (n, C) over the evaluated pixels."""
    if a.dims != b.dims or a.channels != b.channels:
        raise DimsMismatch("metric inputs must share dims and channel count")
    if mask is None:
        return a.data.reshape(-1, a.channels), b.data.reshape(-1, b.channels), 1.0
    if mask.dims != a.dims:
        raise DimsMismatch("mask dims differ from image dims")
    keep = ~mask.data
    n_keep = int(np.count_nonzero(keep))
    if n_keep == 0:
        raise EmptyMask("mask excludes every pixel")
    coverage = n_keep / keep.size
    return a.data[keep], b.data[keep], coverage


def l1(a: ImageBuffer, b: ImageBuffer, mask: Mask | None = None) -> MetricReport:
    """Mean absolute difference over evaluated pixels and all channels."""
    va, vb, coverage = _paired(a, b, mask)
    return MetricReport("l1", float(np.mean(np.abs(va - vb))), coverage)


def mse(a: ImageBuffer, b: ImageBuffer, mask: Mask | None = None) -> float:
    va, vb, _ = _paired(a, b, mask)
    return float(np.mean((va - vb) ** 2))


def psnr(
    a: ImageBuffer, b: ImageBuffer, mask: Mask | None = None, peak: float = 1.0
) -> MetricReport:
    """Peak signal-to-noise ratio in dB; identical inputs report the 99 dB cap."""
    va, vb, coverage = _paired(a, b, mask)
    err = float(np.mean((va - vb) ** 2))
    if err == 0.0:
        return MetricReport("psnr", PSNR_CAP_DB, coverage)
    return MetricReport("psnr", 10.0 * math.log10(peak * peak / err), coverage)


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    offsets = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    k = np.outer(g, g)
    return k / k.sum()


def ssim(a: ImageBuffer, b: ImageBuffer) -> MetricReport:
    """Mean structural similarity, 11x11 Gaussian window (sigma 1.5),
    K1=0.01, K2=0.03, dynamic range 1.0, averaged over channels."""
    if a.dims != b.dims or a.channels != b.channels:
        raise DimsMismatch("metric inputs must share dims and channel count")
    if a.channels not in (1, 3):
        raise ValueOutOfRange(f"ssim expects 1 or 3 channels, got {a.channels}")
    if min(a.dims.width, a.dims.height) < SSIM_WINDOW:
        raise ImageTooSmall(f"ssim needs at least {SSIM_WINDOW} px per side")

    kernel = _gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA)
    c1 = SSIM_K1**2
    c2 = SSIM_K2**2

    def filt(img2d):
        return convolve2d(img2d, kernel, mode="valid")

    scores = []
    for c in range(a.channels):
        x = a.data[:, :, c]
        y = b.data[:, :, c]
        mu_x = filt(x)
        mu_y = filt(y)
        var_x = filt(x * x) - mu_x**2
        var_y = filt(y * y) - mu_y**2
        cov = filt(x * y) - mu_x * mu_y
        s_map = ((2 * mu_x * mu_y + c1) * (2 * cov + c2)) / (
            (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
        )
        scores.append(float(np.mean(s_map)))
    return MetricReport("ssim", float(np.mean(scores)), 1.0)


def bce_map(pred: ImageBuffer, target: ImageBuffer) -> float:
    """Mean binary cross entropy of two [0, 1] maps, predictions clamped to
    [1e-7, 1 - 1e-7]."""
    if pred.dims != target.dims or pred.channels != target.channels:
        raise DimsMismatch("map inputs must share dims and channel count")
    for name, buf in (("pred", pred), ("target", target)):
        if np.any(buf.data < 0.0) or np.any(buf.data > 1.0):
            raise ValueOutOfRange(f"{name} values must lie in [0, 1]")
    p = np.clip(pred.data, 1e-7, 1.0 - 1e-7)
    tgt = target.data
    return float(-np.mean(tgt * np.log(p) + (1.0 - tgt) * np.log(1.0 - p)))


def layout_consistency(predicted: LayoutMaps, reference: LayoutMaps) -> float:
    """Boundary-map BCE plus corner-map BCE; lower means better agreement."""
    return bce_map(predicted.boundary, reference.boundary) + bce_map(
        predicted.corner, reference.corner
    )
