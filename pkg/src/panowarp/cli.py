"""Command-line surface: render, warp, layout ops, dataset, eval, holes.

Exit codes are a stable scripting contract: 0 success, 2 validation error,
3 I/O error.  Every JSON artifact carries a version field and the exact
invocation parameters.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import IoError, ValidationError
from .imaging import (
    load_depth,
    load_mask,
    load_rgb,
    save_depth,
    save_gray,
    save_mask,
    save_rgb,
    save_weights,
)
from .layout import (
    Layout,
    LayoutCorner,
    load_layout,
    rasterize_layout,
    save_layout,
    transform_layout,
)
from .metrics import l1, psnr, ssim
from .scene import (
    CheckerTexture,
    CuboidScene,
    SinusoidTexture,
    make_dataset,
    random_scene,
    render_panorama,
)
from .splatting import SplatParams, forward_splat, missing_rate, missing_rate_curve
from .sphere import PanoDims

# Fixed default so outputs do not depend on the host's core count.
DEFAULT_WORKERS = 2

METRIC_FNS = {"psnr": psnr, "ssim": ssim, "l1": l1}


def _parse_triple(text: str, name: str, sep: str) -> tuple[float, float, float]:
    parts = text.split(sep)
    if len(parts) != 3:
        raise ValidationError(f"--{name} expects three values separated by '{sep}'")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as e:
        raise ValidationError(f"--{name}: {e}") from e


def _parse_size(text: str) -> PanoDims:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValidationError("--size expects WxH, e.g. 512x256")
    try:
        return PanoDims(int(parts[0]), int(parts[1]))
    except ValueError as e:
        raise ValidationError(f"--size: {e}") from e


def _parse_floats(text: str, name: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p != ""]
    except ValueError as e:
        raise ValidationError(f"--{name}: {e}") from e


def _invocation(args: argparse.Namespace) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _write_json(path, payload: dict) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e


def _make_scene(args: argparse.Namespace) -> CuboidScene:
    w, d, h = _parse_triple(args.room, "room", "x")
    cam = _parse_triple(args.camera, "camera", ",")
    if args.texture == "checker":
        texture = CheckerTexture.from_seed(args.seed)
    else:
        texture = SinusoidTexture.from_seed(args.seed)
    return CuboidScene(w, d, h, cam, texture, seed=args.seed)


def _splat_params(args: argparse.Namespace) -> SplatParams:
    try:
        return SplatParams(
            d_max=args.dmax,
            eps=args.eps,
            upsample_factor=args.upsample,
            hole_threshold=args.tau,
        )
    except ValueError as e:
        raise ValidationError(str(e)) from e


def _ensure_dir(path) -> None:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise IoError(f"cannot create {path}: {e}") from e


def cmd_render(args: argparse.Namespace) -> None:
    scene = _make_scene(args)
    dims = _parse_size(args.size)
    view = render_panorama(scene, dims=dims)
    _ensure_dir(args.out)
    save_rgb(view.rgb, os.path.join(args.out, "source.png"))
    save_depth(view.depth, os.path.join(args.out, "source.depth.png"))
    save_layout(os.path.join(args.out, "source.layout.json"), view.layout, view.camera, dims)


def cmd_warp(args: argparse.Namespace) -> None:
    t = _parse_triple(args.t, "t", ",")
    params = _splat_params(args)
    rgb = load_rgb(args.rgb)
    depth = load_depth(args.depth)
    workers = 1 if args.single_thread else DEFAULT_WORKERS
    out = forward_splat(rgb, depth, t, params, workers=workers)
    _ensure_dir(args.out)
    save_rgb(out.image, os.path.join(args.out, "warped.png"))
    save_weights(out.weights, os.path.join(args.out, "weights.png"))
    save_mask(out.holes, os.path.join(args.out, "holes.png"))
    _write_json(
        os.path.join(args.out, "stats.json"),
        {
            "version": __version__,
            "invocation": _invocation(args),
            "missing_rate": missing_rate(out),
        },
    )


def cmd_layout_warp(args: argparse.Namespace) -> None:
    t = _parse_triple(args.t, "t", ",")
    layout, cam, dims = load_layout(args.layout)
    new_layout, new_cam = transform_layout(layout, t, cam, dims)
    save_layout(args.out, new_layout, new_cam, dims)


def cmd_rasterize(args: argparse.Namespace) -> None:
    layout, cam, file_dims = load_layout(args.layout)
    dims = _parse_size(args.size) if args.size else file_dims
    if args.sigma <= 0:
        raise ValidationError("--sigma must be positive")
    if dims != file_dims:
        # pixel -> longitude/latitude is linear, so rescaling is exact
        layout = Layout(
            tuple(
                LayoutCorner(
                    c.u * dims.width / file_dims.width,
                    c.v * dims.height / file_dims.height,
                    c.kind,
                )
                for c in layout.corners
            )
        )
    maps = rasterize_layout(layout, cam, dims, sigma=args.sigma)
    _ensure_dir(args.out)
    save_rgb(maps.boundary, os.path.join(args.out, "boundary.png"))
    save_gray(maps.corner, os.path.join(args.out, "corner.png"))


def cmd_dataset(args: argparse.Namespace) -> None:
    if args.scenes < 1 or args.targets < 1:
        raise ValidationError("--scenes and --targets must be >= 1")
    dims = _parse_size(args.size)
    seeds = np.random.default_rng(args.seed).integers(0, 2**31 - 1, size=args.scenes)
    scenes = [random_scene(int(s)) for s in seeds]
    _ensure_dir(args.out)
    make_dataset(
        scenes,
        args.set,
        targets_per_source=args.targets,
        seed=args.seed,
        out_dir=args.out,
        dims=dims,
        extra={"invocation": _invocation(args)},
    )


def cmd_eval(args: argparse.Namespace) -> None:
    names = [n.strip() for n in args.metrics.split(",") if n.strip()]
    unknown = [n for n in names if n not in METRIC_FNS and n != "lpips"]
    if unknown or not names:
        raise ValidationError(
            f"unknown metrics {unknown}; choose from {sorted(METRIC_FNS) + ['lpips']}"
        )
    pred = load_rgb(args.pred)
    gt = load_rgb(args.gt)
    mask = load_mask(args.mask) if args.mask else None
    results = []
    for name in names:
        if name == "lpips":
            # needs a pretrained network, which this package does not ship
            results.append({"metric": "lpips", "value": "n/a"})
        elif name == "ssim":
            # SSIM is windowed; it has no masked variant here.
            results.append(ssim(pred, gt).as_dict())
        else:
            results.append(METRIC_FNS[name](pred, gt, mask).as_dict())
    _write_json(
        args.out,
        {"version": __version__, "invocation": _invocation(args), "results": results},
    )


def cmd_holes(args: argparse.Namespace) -> None:
    scene = _make_scene(args)
    dims = _parse_size(args.size)
    distances = _parse_floats(args.distances, "distances")
    if args.trials < 1:
        raise ValidationError("--trials must be >= 1")
    params = _splat_params(args)
    workers = 1 if args.single_thread else DEFAULT_WORKERS
    curve = missing_rate_curve(
        scene,
        distances,
        directions_per_distance=args.trials,
        seed=args.seed,
        dims=dims,
        params=params,
        workers=workers,
    )
    _write_json(
        args.out,
        {"version": __version__, "invocation": _invocation(args), "curve": curve},
    )


def _add_scene_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--room", required=True, help="room extents WxDxH in meters, e.g. 4x4x3")
    p.add_argument("--camera", required=True,
                   help="camera position x,y,z in the room frame; use --camera=-1,0,1.5 for negatives")
    p.add_argument("--size", default="512x256", help="panorama size WxH")
    p.add_argument("--texture", choices=("checker", "sinusoid"), default="sinusoid")
    p.add_argument("--seed", type=int, default=0)


def _add_splat_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dmax", type=float, default=10.0, help="soft z-buffer depth scale")
    p.add_argument("--eps", type=float, default=1e-8, help="weight-sum stabilizer")
    p.add_argument("--upsample", type=int, default=2, help="pre-splat upsampling factor")
    p.add_argument("--tau", type=float, default=1e-4, help="hole weight threshold")
    p.add_argument("--single-thread", action="store_true", help="deterministic sequential splat")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="panowarp",
        description="Panoramic novel-view warping, layout guidance, and evaluation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render an analytic cuboid room")
    _add_scene_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("warp", help="forward-splat a panorama to a translated view")
    p.add_argument("--rgb", required=True)
    p.add_argument("--depth", required=True)
    p.add_argument("--t", required=True,
                   help="translation tx,ty,tz in meters; use --t=-1,0,0 for negatives")
    _add_splat_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_warp)

    p = sub.add_parser("layout-warp", help="transform a layout JSON to a translated view")
    p.add_argument("--layout", required=True)
    p.add_argument("--t", required=True,
                   help="translation tx,ty,tz in meters; use --t=-1,0,0 for negatives")
    p.add_argument("--out", required=True, help="output layout JSON path")
    p.set_defaults(func=cmd_layout_warp)

    p = sub.add_parser("rasterize", help="draw boundary/corner guidance maps")
    p.add_argument("--layout", required=True)
    p.add_argument("--size", default=None, help="panorama size WxH (default: layout grid)")
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_rasterize)

    p = sub.add_parser("dataset", help="generate a synthetic source/target dataset")
    p.add_argument("--set", choices=("easy", "hard"), required=True)
    p.add_argument("--scenes", type=int, default=1)
    p.add_argument("--targets", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", default="512x256", help="panorama size WxH")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("eval", help="compare a prediction against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--mask", default=None, help="hole mask PNG; masked pixels are excluded")
    p.add_argument("--metrics", default="psnr,ssim,l1")
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("holes", help="missing-rate vs translation-distance curve")
    _add_scene_flags(p)
    p.add_argument("--distances", required=True, help="comma-separated meters")
    p.add_argument("--trials", type=int, default=10, help="random directions per distance")
    _add_splat_flags(p)
    p.add_argument("--out", required=True, help="curve JSON path")
    p.set_defaults(func=cmd_holes)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (IoError, OSError) as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
