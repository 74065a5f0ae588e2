"""Layout lifting, view transformation, rasterization, and JSON format."""

import json
import math

import numpy as np
import pytest

from panowarp import (
    CameraAboveCeiling,
    CameraBelowFloor,
    CameraConfig,
    CameraOutsideRoom,
    CuboidScene,
    DegenerateCorner,
    FormatError,
    InvalidLayout,
    Layout,
    LayoutCorner,
    PanoDims,
    analytic_layout,
    lift_layout,
    load_layout,
    random_scene,
    rasterize_layout,
    save_layout,
    sph_to_pix,
    transform_layout,
    validate_layout,
)

DIMS = PanoDims(512, 256)


def corner_at(phi, theta, kind, dims=DIMS):
    u, v = sph_to_pix(phi, theta, dims)
    return LayoutCorner(float(u), float(v), kind)


def square_layout(h_cam=1.6, half=2.0, ceil_h=1.4):
    """Four-junction layout of a square room seen from its center."""
    corners = []
    for phi in (-3 * math.pi / 4, -math.pi / 4, math.pi / 4, 3 * math.pi / 4):
        rho = half * math.sqrt(2.0)
        theta_f = -math.atan2(h_cam, rho)
        theta_c = math.atan2(ceil_h, rho)
        corners.append(corner_at(phi, theta_c, "ceiling"))
        corners.append(corner_at(phi, theta_f, "floor"))
    return Layout(tuple(corners))


def wrap_px_err(a: np.ndarray, b: np.ndarray, width: int) -> float:
    du = np.abs(a[:, 0] - b[:, 0])
    du = np.minimum(du, width - du)
    return float(max(du.max(), np.abs(a[:, 1] - b[:, 1]).max()))


class TestValidate:
    def test_oracle_layout_is_valid(self, box_view):
        assert validate_layout(box_view.layout, PanoDims(128, 64)) == []

    def test_odd_corner_count(self):
        lay = square_layout()
        bad = Layout(lay.corners[:-1])
        assert any("odd" in p for p in validate_layout(bad, DIMS))

    def test_too_few_junctions(self):
        lay = square_layout()
        bad = Layout(lay.corners[:6])
        assert any("< 8" in p for p in validate_layout(bad, DIMS))

    def test_unsorted_junctions(self):
        lay = square_layout()
        shuffled = lay.corners[2:] + lay.corners[:2]
        probs = validate_layout(Layout(shuffled), DIMS)
        assert any("order" in p for p in probs)

    def test_mismatched_junction_longitudes(self):
        lay = square_layout()
        c0 = lay.corners[0]
        bad = Layout((LayoutCorner(c0.u + 1.0, c0.v, "ceiling"),) + lay.corners[1:])
        assert any("longitudes differ" in p for p in validate_layout(bad, DIMS))

    def test_wrong_pair_kinds(self):
        lay = square_layout()
        c0, c1 = lay.corners[0], lay.corners[1]
        bad = Layout((c1, c0) + lay.corners[2:])
        assert any("pair" in p for p in validate_layout(bad, DIMS))


class TestLift:
    def test_floor_corner_at_45_degrees(self):
        # theta_f = -pi/4 at phi = 0 with h = 1.6: range rho = 1.6
        corners = []
        for phi in (-3 * math.pi / 4, -math.pi / 4, math.pi / 4, 0.0):
            corners.append(corner_at(phi, math.pi / 4, "ceiling"))
            corners.append(corner_at(phi, -math.pi / 4, "floor"))
        # keep junctions sorted: move phi=0 before pi/4
        corners = corners[0:4] + corners[6:8] + corners[4:6]
        pts = lift_layout(Layout(tuple(corners)), CameraConfig(1.6), DIMS)
        # junction at phi = 0 is index 2: ceiling pt 4, floor pt 5
        np.testing.assert_allclose(pts[5], (0.0, 1.6, -1.6), atol=1e-12)
        np.testing.assert_allclose(pts[4], (0.0, 1.6, 1.6), atol=1e-12)

    def test_oracle_corners_lift_exactly(self):
        scene = CuboidScene(4, 4, 3, (0.3, -0.2, 1.5))
        cam = np.asarray(scene.camera)
        lay = analytic_layout(scene, cam, DIMS)
        pts = lift_layout(lay, CameraConfig(1.5), DIMS)
        true_pts = scene.corners_3d() - cam[None, :]
        for p in pts:
            assert np.linalg.norm(true_pts - p[None, :], axis=1).min() <= 1e-6

    def test_floor_corner_near_horizon_rejected(self):
        lay = square_layout()
        c = lay.corners[1]
        bad_floor = corner_at(float(np.arctan2(-2, -2)), -1e-5, "floor")
        bad = Layout((lay.corners[0], bad_floor) + lay.corners[2:])
        with pytest.raises(DegenerateCorner):
            lift_layout(bad, CameraConfig(1.6), DIMS)
        assert c.kind == "floor"

    def test_invalid_layout_rejected(self):
        bad = Layout(square_layout().corners[:6])
        with pytest.raises(InvalidLayout):
            lift_layout(bad, CameraConfig(1.6), DIMS)


class TestTransform:
    def test_zero_translation_identity(self):
        lay = square_layout()
        out, cam = transform_layout(lay, (0, 0, 0), CameraConfig(1.6), DIMS)
        assert wrap_px_err(out.pixel_array(), lay.pixel_array(), DIMS.width) <= 1e-9
        assert cam.height == 1.6

    def test_reversibility(self):
        lay = square_layout()
        t = (0.5, -0.3, 0.2)
        mid, cam_mid = transform_layout(lay, t, CameraConfig(1.6), DIMS)
        back, cam_back = transform_layout(mid, tuple(-x for x in t), cam_mid, DIMS)
        assert wrap_px_err(back.pixel_array(), lay.pixel_array(), DIMS.width) <= 1e-6
        assert cam_back.height == pytest.approx(1.6)

    def test_matches_oracle_on_cuboids(self, rng):
        for k in range(6):
            scene = random_scene(300 + k)
            cam = np.asarray(scene.camera)
            while True:
                t = rng.uniform(-1.0, 1.0, 3)
                t[2] = rng.uniform(-0.2, 0.2)
                if scene.contains(cam + t):
                    break
            src = analytic_layout(scene, cam, DIMS)
            got, got_cam = transform_layout(src, t, CameraConfig(cam[2]), DIMS)
            want = analytic_layout(scene, cam + t, DIMS)
            assert wrap_px_err(got.pixel_array(), want.pixel_array(), DIMS.width) <= 1e-6
            assert got_cam.height == pytest.approx(cam[2] + t[2])

    def test_preserves_structure(self):
        lay = square_layout()
        out, _ = transform_layout(lay, (0.4, 0.1, 0.0), CameraConfig(1.6), DIMS)
        assert out.n_corners == lay.n_corners
        assert validate_layout(out, DIMS) == []

    def test_camera_outside_room(self):
        with pytest.raises(CameraOutsideRoom):
            transform_layout(square_layout(), (5.0, 0, 0), CameraConfig(1.6), DIMS)

    def test_camera_above_ceiling(self):
        with pytest.raises(CameraAboveCeiling):
            transform_layout(square_layout(), (0, 0, 1.5), CameraConfig(1.6), DIMS)

    def test_camera_below_floor(self):
        with pytest.raises(CameraBelowFloor):
            transform_layout(square_layout(), (0, 0, -1.7), CameraConfig(1.6), DIMS)


class TestRasterize:
    @pytest.fixture(scope="class")
    @staticmethod
    def maps_and_layout():
        # 4x6 room: corners avoid exact pixel-boundary longitudes
        scene = CuboidScene(4, 6, 3, (0.0, 0.0, 1.5))
        lay = analytic_layout(scene, scene.camera, DIMS)
        maps = rasterize_layout(lay, CameraConfig(1.5), DIMS, sigma=2.0)
        return maps, lay

    def test_values_in_unit_range(self, maps_and_layout):
        maps, _ = maps_and_layout
        for buf in (maps.boundary, maps.corner):
            assert buf.data.min() >= 0.0
            assert buf.data.max() <= 1.0

    def test_corner_pixels_peak_at_one(self, maps_and_layout):
        maps, lay = maps_and_layout
        for c in lay.corners:
            iu = int(math.floor(c.u)) % DIMS.width
            iv = min(int(math.floor(c.v)), DIMS.height - 1)
            assert maps.corner.data[iv, iu, 0] == 1.0

    def test_wall_edge_channel_peaks_at_junction(self, maps_and_layout):
        maps, lay = maps_and_layout
        c = lay.corners[0]
        iu = int(math.floor(c.u)) % DIMS.width
        iv = min(int(math.floor(c.v)), DIMS.height - 1)
        assert maps.boundary.data[iv, iu, 1] == 1.0

    def test_truncation_beyond_three_sigma(self, maps_and_layout):
        from scipy.spatial import cKDTree

        maps, lay = maps_and_layout
        sigma = 2.0
        # recompute all stamped centers: nonzero pixels are within 3 sigma of one
        for ch in range(3):
            m = maps.boundary.data[:, :, ch]
            centers = np.argwhere(m == 1.0)  # peak pixels are the stamp centers
            tree = cKDTree(
                np.concatenate(
                    [centers + [0, off] for off in (-DIMS.width, 0, DIMS.width)]
                )
            )
            nz = np.argwhere(m > 0.0)
            d, _ = tree.query(nz)
            assert d.max() <= 3.0 * sigma + 1e-9
            # and pixels farther than 3 sigma + 1 are exactly zero
            far = np.argwhere(m == 0.0)
            d_far, _ = tree.query(far[:: max(1, len(far) // 5000)])
            assert np.all(d_far > 0.0)

    def test_left_right_symmetry_about_forward_column(self, maps_and_layout):
        # symmetric room, centered camera: mirror u -> W-1-u preserves the map
        maps, _ = maps_and_layout
        floor_ch = maps.boundary.data[:, :, 2]
        np.testing.assert_array_equal(floor_ch, floor_ch[:, ::-1])

    def test_channels_are_distinct(self, maps_and_layout):
        maps, _ = maps_and_layout
        b = maps.boundary.data
        # ceiling-wall rows sit above wall-floor rows wherever both peak
        top_rows = np.argwhere(b[:, :, 0] == 1.0)[:, 0]
        bottom_rows = np.argwhere(b[:, :, 2] == 1.0)[:, 0]
        assert top_rows.max() < bottom_rows.min()

    def test_sigma_must_be_positive(self):
        with pytest.raises(ValueError):
            rasterize_layout(square_layout(), CameraConfig(1.6), DIMS, sigma=0.0)


class TestJsonFormat:
    def test_round_trip(self, tmp_path):
        lay = square_layout()
        path = tmp_path / "layout.json"
        save_layout(path, lay, CameraConfig(1.6), DIMS)
        back, cam, dims = load_layout(path)
        assert dims == DIMS
        assert cam.height == 1.6
        assert back.pixel_array().tolist() == lay.pixel_array().tolist()
        assert [c.kind for c in back.corners] == [c.kind for c in lay.corners]

    def test_field_names_are_exact(self, tmp_path):
        path = tmp_path / "layout.json"
        save_layout(path, square_layout(), CameraConfig(1.6), DIMS)
        doc = json.loads(path.read_text())
        assert set(doc) == {"width", "height", "camera_height", "corners"}
        assert set(doc["corners"][0]) == {"u", "v", "kind"}

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(FormatError):
            load_layout(path)

    def test_missing_field(self, tmp_path):
        path = tmp_path / "short.json"
        path.write_text(json.dumps({"width": 512, "height": 256}))
        with pytest.raises(FormatError):
            load_layout(path)
