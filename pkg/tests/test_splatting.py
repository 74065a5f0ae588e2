"""Forward splat semantics: identity, soft z-buffer math, oracle equivalence."""

import math

import numpy as np
import pytest

from panowarp import (
    CuboidScene,
    DepthBuffer,
    DimsMismatch,
    ImageBuffer,
    NonPanoramicDims,
    PanoDims,
    SplatParams,
    forward_splat,
    missing_rate,
    missing_rate_curve,
    render_panorama,
    splat_reference,
)

# Pinned from this implementation: 4x4x3 room, camera at center, t=(1,0,0),
# 512x256 grid, upsample factor 1.
PINNED_MISSING_RATE = 0.109405517578125


def tiny_pair(values, depths):
    """W=2, H=1 panorama: two pixels looking left and right on the horizon."""
    src = ImageBuffer(np.asarray(values, dtype=np.float64).reshape(1, 2, 1))
    dep = DepthBuffer(np.asarray(depths, dtype=np.float64).reshape(1, 2))
    return src, dep


class TestParams:
    def test_defaults(self):
        p = SplatParams()
        assert (p.d_max, p.eps, p.upsample_factor, p.hole_threshold) == (10.0, 1e-8, 2, 1e-4)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"d_max": 0.0},
            {"eps": 0.0},
            {"hole_threshold": -1.0},
            {"upsample_factor": 0},
            {"upsample_factor": 1.5},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            SplatParams(**kwargs)


class TestValidation:
    def test_dims_mismatch(self, box_view):
        dep = DepthBuffer(np.full((32, 64), 2.0))
        with pytest.raises(DimsMismatch):
            forward_splat(box_view.rgb, dep, (0, 0, 0))

    def test_non_panoramic_dims(self):
        src = ImageBuffer(np.full((64, 64, 3), 0.5))
        dep = DepthBuffer(np.full((64, 64), 2.0))
        with pytest.raises(NonPanoramicDims):
            forward_splat(src, dep, (0, 0, 0))


class TestIdentity:
    def test_reproduces_source(self, box_view):
        out = forward_splat(
            box_view.rgb, box_view.depth, (0, 0, 0), SplatParams(upsample_factor=1)
        )
        rel = np.abs(out.image.data - box_view.rgb.data) / np.abs(box_view.rgb.data)
        assert rel.max() <= 1e-4
        assert missing_rate(out) == 0.0

    def test_identity_with_upsampling_still_close(self, box_view):
        out = forward_splat(box_view.rgb, box_view.depth, (0, 0, 0), SplatParams())
        # factor 2 samples off pixel centers: a slight blur, large only at the
        # few pixels straddling face seams
        diff = np.abs(out.image.data - box_view.rgb.data)
        assert diff.mean() < 0.02
        assert np.median(diff) < 0.01
        assert missing_rate(out) == 0.0


class TestSoftZBuffer:
    """Two source samples land exactly on one target pixel center.

    With t = (-2, 0, 0) both horizon pixels of the tiny panorama end up on
    the +x axis: sample depths stay 1 and 10, so the accumulator sees
    weights exp(-0.1) and exp(-1.0) with bilinear weight exactly 1.
    """

    def test_equal_values_pass_through(self):
        src, dep = tiny_pair([0.8, 0.8], [1.0, 10.0])
        out = forward_splat(src, dep, (-2, 0, 0), SplatParams(upsample_factor=1))
        w = math.exp(-0.1) + math.exp(-1.0)
        assert out.image.data[0, 1, 0] == pytest.approx(0.8 * w / (w + 1e-8), rel=1e-12)

    def test_nearer_sample_dominates(self):
        src, dep = tiny_pair([1.0, 0.0], [1.0, 10.0])
        out = forward_splat(src, dep, (-2, 0, 0), SplatParams(upsample_factor=1))
        expected = math.exp(-0.1) / (math.exp(-0.1) + math.exp(-1.0) + 1e-8)
        assert expected == pytest.approx(0.711, abs=5e-4)
        assert out.image.data[0, 1, 0] == pytest.approx(expected, rel=1e-12)

    def test_unreached_pixel_is_hole_and_zero(self):
        src, dep = tiny_pair([1.0, 0.0], [1.0, 10.0])
        out = forward_splat(src, dep, (-2, 0, 0), SplatParams(upsample_factor=1))
        assert bool(out.holes.data[0, 0]) is True
        assert out.image.data[0, 0, 0] == 0.0
        assert missing_rate(out) == 0.5


class TestOutputInvariants:
    def test_holes_match_weight_threshold(self, box_view):
        params = SplatParams(upsample_factor=1)
        out = forward_splat(box_view.rgb, box_view.depth, (0.8, -0.5, 0.2), params)
        assert np.array_equal(out.holes.data, out.weights < params.hole_threshold)
        assert np.all(out.image.data[out.holes.data] == 0.0)

    def test_values_stay_in_source_range(self, box_view):
        out = forward_splat(box_view.rgb, box_view.depth, (0.8, -0.5, 0.2))
        assert out.image.data.max() <= box_view.rgb.data.max() + 1e-12
        assert out.image.data.min() >= 0.0

    def test_repeated_runs_bit_identical(self, box_view):
        a = forward_splat(box_view.rgb, box_view.depth, (0.5, 0.3, 0.0), workers=3)
        b = forward_splat(box_view.rgb, box_view.depth, (0.5, 0.3, 0.0), workers=3)
        assert np.array_equal(a.image.data, b.image.data)
        assert np.array_equal(a.weights, b.weights)


class TestReferenceEquivalence:
    def test_single_thread_matches_reference_tightly(self, box_view):
        params = SplatParams(upsample_factor=1)
        t = (0.4, -0.2, 0.1)
        fast = forward_splat(box_view.rgb, box_view.depth, t, params, workers=1)
        ref = splat_reference(box_view.rgb, box_view.depth, t, params)
        assert np.abs(fast.image.data - ref.image.data).max() <= 1e-9
        assert np.abs(fast.weights - ref.weights).max() <= 1e-9
        assert np.array_equal(fast.holes.data, ref.holes.data)

    def test_parallel_within_tolerance(self, box_view):
        t = (0.4, -0.2, 0.1)
        ref = splat_reference(box_view.rgb, box_view.depth, t, SplatParams())
        multi = forward_splat(box_view.rgb, box_view.depth, t, SplatParams(), workers=4)
        assert np.abs(multi.image.data - ref.image.data).max() <= 1e-6

    def test_zero_translation_case(self, box_view):
        params = SplatParams(upsample_factor=1)
        fast = forward_splat(box_view.rgb, box_view.depth, (0, 0, 0), params)
        ref = splat_reference(box_view.rgb, box_view.depth, (0, 0, 0), params)
        assert np.abs(fast.image.data - ref.image.data).max() <= 1e-9

    def test_random_scenes_and_factors(self, rng):
        from panowarp import random_scene

        dims = PanoDims(64, 32)
        for case in range(4):
            scene = random_scene(900 + case)
            view = render_panorama(scene, dims=dims)
            factor = 1 + case % 2
            t = rng.uniform(-0.6, 0.6, 3)
            params = SplatParams(upsample_factor=factor)
            fast = forward_splat(view.rgb, view.depth, t, params)
            ref = splat_reference(view.rgb, view.depth, t, params)
            assert np.abs(fast.image.data - ref.image.data).max() <= 1e-6


class TestMissingRate:
    def test_zero_translation_zero_rate(self, box_view):
        out = forward_splat(box_view.rgb, box_view.depth, (0, 0, 0))
        assert missing_rate(out) == 0.0

    def test_all_holes(self):
        src, dep = tiny_pair([1.0, 0.0], [1.0, 10.0])
        out = forward_splat(
            src, dep, (0, 0, 0), SplatParams(upsample_factor=1, hole_threshold=10.0)
        )
        assert missing_rate(out) == 1.0

    def test_pinned_regression_value(self, box_room):
        view = render_panorama(box_room, dims=PanoDims(512, 256))
        out = forward_splat(view.rgb, view.depth, (1, 0, 0), SplatParams(upsample_factor=1))
        rate = missing_rate(out)
        assert 0.0 < rate < 0.5
        assert rate == pytest.approx(PINNED_MISSING_RATE, abs=1e-3)


class TestMissingRateCurve:
    def test_zero_distance_zero_mean(self, box_room):
        curve = missing_rate_curve(
            box_room, [0.0], directions_per_distance=3, seed=1, dims=PanoDims(64, 32)
        )
        assert curve[0]["mean"] == 0.0

    def test_nondecreasing_and_upsampling_helps(self, box_room):
        dims = PanoDims(128, 64)
        distances = [0.25, 0.5, 1.0, 1.5]
        coarse = missing_rate_curve(
            box_room, distances, 10, seed=3, dims=dims, params=SplatParams(upsample_factor=1)
        )
        fine = missing_rate_curve(
            box_room, distances, 10, seed=3, dims=dims, params=SplatParams(upsample_factor=2)
        )
        means = [row["mean"] for row in coarse]
        assert all(a <= b + 1e-12 for a, b in zip(means, means[1:]))
        for c_row, f_row in zip(coarse, fine):
            assert f_row["mean"] <= c_row["mean"]

    def test_camera_leaving_room_rejected(self, box_room):
        from panowarp import CameraOutsideRoom

        with pytest.raises(CameraOutsideRoom):
            missing_rate_curve(box_room, [5.0], 4, seed=0, dims=PanoDims(64, 32))
