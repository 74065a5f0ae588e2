"""How fast do splatting holes grow with camera translation distance?

Warping a panorama farther from its capture point stretches the sample grid
and exposes occluded regions, so the fraction of empty target pixels rises
with distance.  Pre-splat upsampling densifies the samples and pushes the
whole curve down.
"""

from panowarp import CuboidScene, PanoDims, SplatParams, missing_rate_curve

scene = CuboidScene(4.0, 4.0, 3.0, (0.0, 0.0, 1.5))
dims = PanoDims(512, 256)
distances = [0.0, 0.25, 0.5, 1.0, 1.5]

curves = {}
for factor in (1, 2):
    curves[factor] = missing_rate_curve(
        scene,
        distances,
        directions_per_distance=10,
        seed=5,
        dims=dims,
        params=SplatParams(upsample_factor=factor),
    )

print(f"{'distance':>9} | {'x1 mean':>8} {'x1 max':>8} | {'x2 mean':>8} {'x2 max':>8}")
print("-" * 52)
for row1, row2 in zip(curves[1], curves[2]):
    print(
        f"{row1['distance']:>8.2f}m | {row1['mean']:>8.4f} {row1['max']:>8.4f} | "
        f"{row2['mean']:>8.4f} {row2['max']:>8.4f}"
    )

print("\nmean rates are non-decreasing in distance, and the upsampled")
print("splat never leaves more holes than the plain one.")
