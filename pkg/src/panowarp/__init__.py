"""panowarp: novel-view geometry for equirectangular indoor panoramas.

Warp a single RGB + depth panorama to a translated camera with soft
z-buffered forward splatting, transform and rasterize room layouts as
structural guidance maps, evaluate against an analytic cuboid-room oracle,
and generate synthetic datasets.
"""

__version__ = "0.1.0"

from .errors import (
    CameraAboveCeiling,
    CameraBelowFloor,
    CameraOutsideRoom,
    DegenerateCorner,
    DepthOutOfRange,
    DimsMismatch,
    EmptyMask,
    FormatError,
    ImageTooSmall,
    InvalidLayout,
    IoError,
    NonPanoramicDims,
    PanowarpError,
    PointAtCamera,
    RoomTooSmall,
    ValidationError,
    ValueOutOfRange,
    ZeroDepth,
    ZeroRadius,
)
from .imaging import (
    DepthBuffer,
    ImageBuffer,
    Mask,
    load_depth,
    load_mask,
    load_rgb,
    nearest_upsample,
    save_depth,
    save_mask,
    save_rgb,
    upsampled_depth,
)
from .layout import (
    CameraConfig,
    Layout,
    LayoutCorner,
    LayoutMaps,
    lift_layout,
    load_layout,
    rasterize_layout,
    save_layout,
    transform_layout,
    validate_layout,
)
from .metrics import MetricReport, bce_map, l1, layout_consistency, psnr, ssim
from .scene import (
    CheckerTexture,
    CuboidScene,
    RenderedView,
    SinusoidTexture,
    analytic_layout,
    make_dataset,
    random_scene,
    ray_distance,
    render_panorama,
)
from .sphere import (
    PanoDims,
    cart_to_sph,
    pix_to_sph,
    reproject_pixel,
    sph_to_cart,
    sph_to_pix,
    transfer_point,
)
from .splatting import (
    SplatParams,
    WarpOutput,
    forward_splat,
    missing_rate,
    missing_rate_curve,
    splat_reference,
)

__all__ = [name for name in dir() if not name.startswith("_")]
