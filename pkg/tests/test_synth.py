import math

import numpy as np
import numpy.testing as npt
import pytest

from riverkit.errors import ValidationError
from riverkit.segmentation import ndwi_from_raster
from riverkit.synth import Radiometry, RiverShape, SynthSpec, gen_scene, sweep
from riverkit.width import widths_for_scene


def straight_spec(width=30.0, theta=0.0, scene_px=500, ps=3.0, noise=0.0, seed=0, offset=0.0):
    return SynthSpec(
        river=RiverShape("straight", width, theta, center_offset_m=offset),
        scene_px=scene_px,
        pixel_size=ps,
        radiometry=Radiometry(noise_sd=noise),
        seed=seed,
    )


class TestGenScene:
    def test_noiseless_horizontal_river_rasterizes_exactly(self):
        scene = gen_scene(straight_spec())
        per_column = scene.gt_mask.water.sum(axis=0)
        npt.assert_array_equal(per_column, np.full(500, 10))  # 30 m / 3 m
        rad = scene.spec.radiometry
        expected = (rad.water_green - rad.water_nir) / (rad.water_green + rad.water_nir)
        f = ndwi_from_raster(scene.raster)
        npt.assert_allclose(f.values[scene.gt_mask.water], expected, rtol=1e-12)

    def test_river_wider_than_scene_rejected(self):
        with pytest.raises(ValidationError, match="exceeds"):
            gen_scene(straight_spec(width=2000.0))

    def test_same_seed_bit_identical(self):
        a = gen_scene(straight_spec(noise=0.02, seed=1234))
        b = gen_scene(straight_spec(noise=0.02, seed=1234))
        for name in a.raster.band_names:
            npt.assert_array_equal(a.raster.bands[name], b.raster.bands[name])
        npt.assert_array_equal(a.gt_mask.water, b.gt_mask.water)

    def test_different_seed_differs(self):
        a = gen_scene(straight_spec(noise=0.02, seed=1))
        b = gen_scene(straight_spec(noise=0.02, seed=2))
        assert not np.array_equal(a.raster.bands["green"], b.raster.bands["green"])

    def test_orientation_reflection_flips_mask(self):
        theta = 0.37
        up = gen_scene(straight_spec(theta=theta, scene_px=200))
        down = gen_scene(straight_spec(theta=-theta, scene_px=200))
        npt.assert_array_equal(np.flipud(up.gt_mask.water), down.gt_mask.water)

    def test_water_fraction_close_to_width_over_extent(self):
        spec = straight_spec(width=90.0)
        scene = gen_scene(spec)
        frac = scene.gt_mask.water.mean()
        extent = spec.extent_m
        assert abs(frac - 90.0 / extent) <= 2 * spec.pixel_size / extent

    def test_nodes_spaced_and_inside_scene(self):
        spec = straight_spec(width=90.0, theta=0.3)
        scene = gen_scene(spec)
        nodes = scene.reach.nodes
        assert len(nodes) >= 2
        margin = 45.0  # half width
        for node in nodes:
            assert margin <= node.x <= spec.extent_m - margin
            assert margin <= node.y <= spec.extent_m - margin
        for a, b in zip(nodes, nodes[1:]):
            npt.assert_allclose(math.hypot(b.x - a.x, b.y - a.y), 200.0, atol=1e-6)

    def test_analytic_width_constant_and_delta_free(self):
        for ps in (10.0, 3.0, 1.0):
            scene = gen_scene(straight_spec(width=75.0, ps=ps, scene_px=int(1500 / ps)))
            assert scene.analytic_width() == 75.0
            assert scene.analytic_width(scene.reach.nodes[0]) == 75.0

    def test_width_recovery_converges_with_resolution(self):
        thetas = [0.0, 0.3, math.pi / 4, 1.2]
        max_err = {}
        for ps in (10.0, 3.0, 1.0):
            worst = 0.0
            for theta in thetas:
                spec = straight_spec(width=150.0, theta=theta, ps=ps, scene_px=int(1500 / ps), offset=0.37 * ps)
                scene = gen_scene(spec)
                ests, _ = widths_for_scene(scene.gt_mask, [scene.reach])
                worst = max(worst, max(abs(e.width_m - 150.0) for e in ests))
            max_err[ps] = worst
        assert max_err[10.0] >= max_err[3.0] >= max_err[1.0]
        for ps, err in max_err.items():
            assert err <= 2 * math.sqrt(2) * ps

    def test_noise_clamped_to_unit_interval(self):
        scene = gen_scene(straight_spec(noise=0.4, seed=9))
        for plane in scene.raster.bands.values():
            assert plane.min() >= 0.0
            assert plane.max() <= 1.0


class TestSineRivers:
    def sine_spec(self, width=90.0, amp=40.0, wavelength=900.0, theta=0.2, ps=3.0):
        return SynthSpec(
            river=RiverShape("sine", width, theta, amplitude_m=amp, wavelength_m=wavelength),
            scene_px=500,
            pixel_size=ps,
        )

    def test_mask_nonempty_and_width_recovered(self):
        spec = self.sine_spec()
        scene = gen_scene(spec)
        assert scene.gt_mask.water.any()
        ests, _ = widths_for_scene(scene.gt_mask, [scene.reach])
        assert len(ests) >= 2
        for est in ests:
            # discretization bound plus a little slack for the chord-estimated
            # tangent direction on a curved centerline
            assert abs(est.width_m - spec.river.width_m) <= 2 * math.sqrt(2) * 3.0 + 0.02 * spec.river.width_m

    def test_overlapping_banks_rejected(self):
        with pytest.raises(ValidationError, match="overlap"):
            RiverShape("sine", 200.0, 0.0, amplitude_m=200.0, wavelength_m=300.0)

    def test_sine_needs_wavelength(self):
        with pytest.raises(ValidationError):
            RiverShape("sine", 50.0, 0.0, amplitude_m=10.0, wavelength_m=0.0)


class TestSpecValidation:
    def test_bad_reflectance_rejected(self):
        with pytest.raises(ValidationError):
            Radiometry(water_green=1.5)

    def test_negative_noise_rejected(self):
        with pytest.raises(ValidationError):
            Radiometry(noise_sd=-0.1)

    def test_zero_width_rejected(self):
        with pytest.raises(ValidationError):
            RiverShape("straight", 0.0)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValidationError):
            RiverShape("braided", 50.0)


class TestSweep:
    def test_edge_aligned_axis_rows_are_exact(self):
        rows = sweep([30.0, 90.0], [0.0, math.pi / 2], 3.0, trials=1, seed=0, scene_px=300)
        for row in rows:
            assert row["max_abs_err_m"] == 0.0

    def test_all_orientations_within_diagonal_bound(self):
        thetas = [k * math.pi / 8 for k in range(8)]
        rows = sweep([30.0, 150.0], thetas, 3.0, trials=2, seed=0, scene_px=300)
        for row in rows:
            assert row["max_abs_err_m"] <= 2 * math.sqrt(2) * 3.0

    def test_deterministic_given_seed(self):
        a = sweep([90.0], [0.4], 3.0, trials=3, seed=5, scene_px=200)
        b = sweep([90.0], [0.4], 3.0, trials=3, seed=5, scene_px=200)
        assert a == b

    def test_width_over_500_rejected(self):
        with pytest.raises(ValidationError):
            sweep([600.0], [0.0], 3.0)
