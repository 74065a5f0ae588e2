"""Analytic cuboid-room renderer: exact panorama, depth, and layout anywhere.

A room is an axis-aligned box with its origin at the floor center.  For any
interior camera, each pixel's ray is intersected with the box in closed form,
so rendered depth is exact and the layout corners are exact projections of
the 8 room corners.  Procedural face textures are anchored to world
coordinates, which makes renders from two camera positions photometrically
consistent views of the same surfaces.

This doubles as the dataset generator: a scene list plus a translation
protocol (easy 0.2-0.3 m, hard 1.0-2.0 m, random horizontal directions)
produces source/target panorama pairs with ground truth and a manifest.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import __version__
from .errors import CameraOutsideRoom, RoomTooSmall, ValidationError
from .imaging import DepthBuffer, ImageBuffer, save_depth, save_rgb
from .layout import CEILING, FLOOR, CameraConfig, Layout, LayoutCorner, save_layout
from .sphere import PanoDims, TWO_PI, cart_to_sph, sph_to_pix

# Face order: 0 x-, 1 x+, 2 y-, 3 y+, 4 floor, 5 ceiling.
N_FACES = 6

TRANSLATION_RANGES = {"easy": (0.2, 0.3), "hard": (1.0, 2.0)}


@dataclass(frozen=True)
class SinusoidTexture:
    """Smooth per-face color waves; gentle gradients keep splatting faithful."""

    frequency: float = 0.5
    phases: tuple[float, ...] = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)

    def __post_init__(self) -> None:
        if not self.frequency > 0:
            raise ValueError("frequency must be positive")
        if len(self.phases) != N_FACES:
            raise ValueError(f"need {N_FACES} per-face phases")
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))

    @classmethod
    def from_seed(cls, seed: int, frequency: float = 0.5) -> "SinusoidTexture":
        rng = np.random.default_rng(seed)
        return cls(frequency, tuple(rng.uniform(0.0, TWO_PI, N_FACES)))

    def shade(self, face: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        phase = np.asarray(self.phases)[face]
        wave = TWO_PI * self.frequency * (a + 0.5 * b) + phase
        rgb = np.empty(face.shape + (3,))
        for c in range(3):
            rgb[..., c] = 0.5 + 0.45 * np.sin(wave + c * TWO_PI / 3.0)
        return rgb

    def describe(self) -> dict:
        return {"kind": "sinusoid", "frequency": self.frequency, "phases": list(self.phases)}


def _color_table(arr) -> tuple:
    arr = np.asarray(arr, dtype=np.float64)
    if arr.shape != (N_FACES, 2, 3):
        raise ValueError("colors must have shape (6, 2, 3)")
    return tuple(tuple(tuple(float(c) for c in pair) for pair in face) for face in arr)


@dataclass(frozen=True)
class CheckerTexture:
    """Two-color checkerboard per face; sharp edges stress the splatter."""

    cell_size: float = 0.5
    colors: tuple | None = None  # (6, 2, 3) nested tuples

    def __post_init__(self) -> None:
        if not self.cell_size > 0:
            raise ValueError("cell_size must be positive")
        colors = self.colors
        if colors is None:
            colors = np.random.default_rng(0).uniform(0.1, 0.9, (N_FACES, 2, 3))
        object.__setattr__(self, "colors", _color_table(colors))

    @classmethod
    def from_seed(cls, seed: int, cell_size: float = 0.5) -> "CheckerTexture":
        rng = np.random.default_rng(seed)
        return cls(cell_size, _color_table(rng.uniform(0.1, 0.9, (N_FACES, 2, 3))))

    def shade(self, face: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        parity = (
            np.floor(a / self.cell_size).astype(np.int64)
            + np.floor(b / self.cell_size).astype(np.int64)
        ) % 2
        palette = np.asarray(self.colors)
        return palette[face, parity]

    def describe(self) -> dict:
        return {
            "kind": "checker",
            "cell_size": self.cell_size,
            "colors": np.asarray(self.colors).tolist(),
        }


Texture = Union[SinusoidTexture, CheckerTexture]


@dataclass(frozen=True)
class CuboidScene:
    """Axis-aligned room, origin at the floor center, camera strictly inside."""

    width: float = 4.0
    depth: float = 4.0
    height: float = 3.0
    camera: tuple[float, float, float] = (0.0, 0.0, 1.5)
    texture: Texture | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if min(self.width, self.depth, self.height) <= 0:
            raise ValueError("room extents must be positive")
        cam = tuple(float(c) for c in self.camera)
        if len(cam) != 3:
            raise ValueError("camera must have 3 components")
        object.__setattr__(self, "camera", cam)
        if self.texture is None:
            object.__setattr__(self, "texture", SinusoidTexture.from_seed(self.seed))
        if not self.contains(cam):
            raise CameraOutsideRoom(
                f"camera {cam} is not strictly inside the "
                f"{self.width}x{self.depth}x{self.height} room"
            )

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([-self.width / 2, -self.depth / 2, 0.0])
        hi = np.array([self.width / 2, self.depth / 2, self.height])
        return lo, hi

    def contains(self, point, margin: float = 1e-9) -> bool:
        lo, hi = self.bounds
        p = np.asarray(point, dtype=np.float64)
        return bool(np.all(p > lo + margin) and np.all(p < hi - margin))

    def corners_3d(self) -> np.ndarray:
        """The 8 room corners in room coordinates, junction-major order."""
        xs = (-self.width / 2, self.width / 2)
        ys = (-self.depth / 2, self.depth / 2)
        pts = []
        for x in xs:
            for y in ys:
                pts.append((x, y, self.height))  # ceiling
                pts.append((x, y, 0.0))          # floor
        return np.array(pts)

    def describe(self) -> dict:
        return {
            "room": [self.width, self.depth, self.height],
            "camera": list(self.camera),
            "texture": self.texture.describe(),
            "seed": self.seed,
        }


@dataclass(frozen=True)
class RenderedView:
    rgb: ImageBuffer
    depth: DepthBuffer
    layout: Layout
    camera: CameraConfig


def ray_distance(scene: CuboidScene, cam_pos, direction) -> float:
    """Exact distance from an interior point to the box along a unit ray."""
    lo, hi = scene.bounds
    p = np.asarray(cam_pos, dtype=np.float64)
    d = np.asarray(direction, dtype=np.float64)
    d = d / np.linalg.norm(d)
    best = math.inf
    for k in range(3):
        if d[k] > 0:
            best = min(best, (hi[k] - p[k]) / d[k])
        elif d[k] < 0:
            best = min(best, (lo[k] - p[k]) / d[k])
    return float(best)


def _exit_distances(scene: CuboidScene, cam: np.ndarray, dirs: np.ndarray):
    """Exit distance and face id for interior-origin rays, vectorized."""
    lo, hi = scene.bounds
    s = np.full(dirs.shape[:-1], np.inf)
    axis = np.zeros(dirs.shape[:-1], dtype=np.int64)
    positive = np.zeros(dirs.shape[:-1], dtype=bool)
    for k in range(3):
        dk = dirs[..., k]
        with np.errstate(divide="ignore"):
            sk = np.where(
                dk > 0,
                (hi[k] - cam[k]) / np.where(dk > 0, dk, 1.0),
                np.where(dk < 0, (lo[k] - cam[k]) / np.where(dk < 0, dk, 1.0), np.inf),
            )
        closer = sk < s
        s = np.where(closer, sk, s)
        axis = np.where(closer, k, axis)
        positive = np.where(closer, dk > 0, positive)
    face = 2 * axis + positive.astype(np.int64)
    return s, face


def analytic_layout(scene: CuboidScene, cam_pos, dims: PanoDims) -> Layout:
    """Exact projections of the 8 room corners, junctions sorted by longitude."""
    cam = np.asarray(cam_pos, dtype=np.float64)
    rel = scene.corners_3d() - cam[None, :]
    phi, theta, _ = cart_to_sph(rel[:, 0], rel[:, 1], rel[:, 2])
    u, v = sph_to_pix(phi, theta, dims)
    order = np.argsort(phi[1::2], kind="stable")
    corners = []
    for k in order:
        corners.append(LayoutCorner(float(u[2 * k]), float(v[2 * k]), CEILING))
        corners.append(LayoutCorner(float(u[2 * k + 1]), float(v[2 * k + 1]), FLOOR))
    return Layout(tuple(corners))


def render_panorama(
    scene: CuboidScene, cam_pos=None, dims: PanoDims = PanoDims(512, 256)
) -> RenderedView:
    """Render the exact panorama/depth/layout seen from ``cam_pos``.

    Each pixel center's ray is intersected with the box analytically; the hit
    face's procedural texture is evaluated at the world-space hit point.
    """
    cam = np.asarray(scene.camera if cam_pos is None else cam_pos, dtype=np.float64)
    if not scene.contains(cam):
        raise CameraOutsideRoom(f"camera {cam.tolist()} is not strictly inside the room")

    W, H = dims.width, dims.height
    phi = TWO_PI * (np.arange(W) + 0.5) / W - np.pi
    theta = 0.5 * np.pi - np.pi * (np.arange(H) + 0.5) / H
    cos_t = np.cos(theta)[:, None]
    dirs = np.empty((H, W, 3))
    dirs[..., 0] = cos_t * np.sin(phi)[None, :]
    dirs[..., 1] = cos_t * np.cos(phi)[None, :]
    dirs[..., 2] = np.broadcast_to(np.sin(theta)[:, None], (H, W))

    dist, face = _exit_distances(scene, cam, dirs)
    hit = cam[None, None, :] + dist[..., None] * dirs

    # Face-plane coordinates: x faces use (y, z), y faces (x, z), z faces (x, y).
    a = np.where(face <= 1, hit[..., 1], hit[..., 0])
    b = np.where(face <= 3, hit[..., 2], hit[..., 1])
    rgb = scene.texture.shade(face, a, b)

    return RenderedView(
        rgb=ImageBuffer(rgb),
        depth=DepthBuffer(dist),
        layout=analytic_layout(scene, cam, dims),
        camera=CameraConfig(float(cam[2])),
    )


def random_scene(seed: int) -> CuboidScene:
    """Deterministic random room: size, interior camera, sinusoid texture."""
    rng = np.random.default_rng(seed)
    w = rng.uniform(3.5, 6.0)
    d = rng.uniform(3.5, 6.0)
    h = rng.uniform(2.6, 3.2)
    cam = (
        rng.uniform(-(w / 2 - 0.9), w / 2 - 0.9),
        rng.uniform(-(d / 2 - 0.9), d / 2 - 0.9),
        rng.uniform(1.3, 1.8),
    )
    texture = SinusoidTexture(
        frequency=rng.uniform(0.3, 0.7),
        phases=tuple(rng.uniform(0.0, TWO_PI, N_FACES)),
    )
    return CuboidScene(w, d, h, cam, texture, seed=int(seed))


def sample_translation(scene: CuboidScene, rng, lo: float, hi: float) -> np.ndarray:
    """Random horizontal translation keeping the target camera in the room."""
    cam = np.asarray(scene.camera)
    for _ in range(100):
        dist = rng.uniform(lo, hi)
        angle = rng.uniform(0.0, TWO_PI)
        t = np.array([dist * math.cos(angle), dist * math.sin(angle), 0.0])
        if scene.contains(cam + t):
            return t
    raise RoomTooSmall(
        f"no interior target at distance [{lo}, {hi}] m found in 100 attempts"
    )


def make_dataset(
    scenes: Sequence[CuboidScene],
    set_name: str,
    targets_per_source: int = 3,
    seed: int = 0,
    out_dir=".",
    dims: PanoDims = PanoDims(512, 256),
    extra: dict | None = None,
) -> dict:
    """Render source/target pairs with ground truth and write a manifest.

    ``set_name`` selects the translation range: "easy" draws |t| uniform in
    [0.2, 0.3] m, "hard" in [1.0, 2.0] m, directions uniform on the
    horizontal circle.  Identical (scenes, seed) inputs produce byte-identical
    files.  Returns the manifest dict (also written to ``manifest.json``).
    """
    if set_name not in TRANSLATION_RANGES:
        raise ValidationError(f"unknown set '{set_name}' (use easy or hard)")
    lo, hi = TRANSLATION_RANGES[set_name]
    rng = np.random.default_rng(seed)

    scene_entries = []
    pairs = []
    for idx, scene in enumerate(scenes):
        scene_id = f"scene_{idx:03d}"
        scene_dir = os.path.join(out_dir, scene_id)
        os.makedirs(scene_dir, exist_ok=True)

        source = render_panorama(scene, dims=dims)
        _write_view(source, os.path.join(scene_dir, "source"), dims)
        files = ["source.png", "source.depth.png", "source.layout.json"]

        for k in range(targets_per_source):
            t = sample_translation(scene, rng, lo, hi)
            target = render_panorama(scene, np.asarray(scene.camera) + t, dims)
            stem = os.path.join(scene_dir, f"target_{k}")
            _write_view(target, stem, dims)
            files += [f"target_{k}.png", f"target_{k}.depth.png", f"target_{k}.layout.json"]
            pairs.append(
                {
                    "source": f"{scene_id}/source.png",
                    "target": f"{scene_id}/target_{k}.png",
                    "t": [float(t[0]), float(t[1]), float(t[2])],
                }
            )
        scene_entries.append({"id": scene_id, **scene.describe(), "files": files})

    manifest = {
        "version": __version__,
        "set": set_name,
        "seed": int(seed),
        "targets_per_source": int(targets_per_source),
        "dims": [dims.width, dims.height],
        "scenes": scene_entries,
        "pairs": pairs,
    }
    if extra:
        manifest.update(extra)
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


def _write_view(view: RenderedView, stem: str, dims: PanoDims) -> None:
    save_rgb(view.rgb, stem + ".png")
    save_depth(view.depth, stem + ".depth.png")
    save_layout(stem + ".layout.json", view.layout, view.camera, dims)
