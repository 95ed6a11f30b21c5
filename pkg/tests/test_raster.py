import numpy as np
import numpy.testing as npt
import pytest

import oracles
from riverkit.errors import ValidationError
from riverkit.raster import (
    GridGeometry,
    Raster,
    WaterMask,
    minmax_normalize,
    resample_band,
    resample_mask,
)


def grid(w=5, h=5, ps=10.0, ox=0.0, oy=None, crs="local"):
    if oy is None:
        oy = h * ps
    return GridGeometry(ox, oy, ps, w, h, crs)


class TestGridGeometry:
    def test_pixel_map_round_trip_is_exact(self):
        g = grid(w=40, h=30, ps=3.0, ox=12345.5, oy=98765.25)
        cols, rows = np.meshgrid(np.arange(g.width_px), np.arange(g.height_px))
        x, y = g.pixel_to_map(rows, cols)
        r2, c2 = g.map_to_pixel(x, y)
        npt.assert_allclose(r2, rows, atol=1e-9)
        npt.assert_allclose(c2, cols, atol=1e-9)

    def test_rejects_bad_dimensions(self):
        with pytest.raises(ValidationError):
            GridGeometry(0, 0, -1.0, 5, 5)
        with pytest.raises(ValidationError):
            GridGeometry(0, 0, 1.0, 0, 5)

    def test_bounds_and_contains(self):
        g = grid(w=4, h=2, ps=5.0)
        assert g.bounds() == (0.0, 0.0, 20.0, 10.0)
        assert g.contains(0.0, 0.0) and g.contains(20.0, 10.0)
        assert not g.contains(-0.1, 5.0)
        assert not g.contains(5.0, 10.1)


class TestMinmaxNormalize:
    def test_affine_example(self):
        g = grid(w=3, h=1, ps=1.0)
        r = Raster(g, {"b": np.array([[2.0, 4.0, 6.0]])})
        out = minmax_normalize(r)
        npt.assert_allclose(out.bands["b"], [[0.0, 0.5, 1.0]])

    def test_constant_band_maps_to_zero(self):
        g = grid(w=2, h=1, ps=1.0)
        out = minmax_normalize(Raster(g, {"b": np.array([[5.0, 5.0]])}))
        npt.assert_allclose(out.bands["b"], [[0.0, 0.0]])

    def test_all_bands_land_in_unit_interval(self):
        rng = np.random.default_rng(42)
        g = grid(w=16, h=12, ps=3.0)
        bands = {f"b{i}": rng.normal(10, 50, g.shape) for i in range(4)}
        validity = rng.random(g.shape) > 0.2
        out = minmax_normalize(Raster(g, bands, validity))
        for plane in out.bands.values():
            # exhaustive scan over valid pixels
            for r in range(g.height_px):
                for c in range(g.width_px):
                    if validity[r, c]:
                        assert 0.0 <= plane[r, c] <= 1.0
                    else:
                        assert plane[r, c] == 0.0

    def test_idempotent_on_valid_pixels(self):
        rng = np.random.default_rng(7)
        g = grid(w=10, h=10, ps=1.0)
        validity = rng.random(g.shape) > 0.3
        r = Raster(g, {"b": rng.normal(size=g.shape)}, validity)
        once = minmax_normalize(r)
        twice = minmax_normalize(once)
        npt.assert_array_equal(once.bands["b"], twice.bands["b"])

    def test_no_valid_pixels_errors_with_band_name(self):
        g = grid(w=2, h=2, ps=1.0)
        r = Raster(g, {"nir": np.zeros(g.shape)}, np.zeros(g.shape, dtype=bool))
        with pytest.raises(ValidationError, match="nir"):
            minmax_normalize(r)


class TestWaterMask:
    def test_water_on_nodata_rejected(self):
        g = grid(w=2, h=1, ps=1.0)
        with pytest.raises(ValidationError):
            WaterMask(g, np.array([[True, False]]), np.array([[False, True]]))


class TestResampleMask:
    def test_identity_geometry_is_identity(self):
        rng = np.random.default_rng(0)
        g = grid(w=8, h=6, ps=5.0)
        validity = rng.random(g.shape) > 0.2
        water = (rng.random(g.shape) > 0.5) & validity
        m = WaterMask(g, water, validity)
        out = resample_mask(m, g)
        npt.assert_array_equal(out.water, m.water)
        npt.assert_array_equal(out.validity, m.validity)

    def test_upsample_matches_brute_force_oracle(self):
        rng = np.random.default_rng(3)
        src = grid(w=5, h=5, ps=10.0)
        validity = rng.random(src.shape) > 0.15
        water = (rng.random(src.shape) > 0.5) & validity
        m = WaterMask(src, water, validity)
        target = GridGeometry(0.0, 50.0, 3.0, 17, 17, "local")
        out = resample_mask(m, target)
        ow, ov = oracles.nearest_resample(water, validity, src, target)
        npt.assert_array_equal(out.water, ow)
        npt.assert_array_equal(out.validity, ov)

    def test_equidistant_centers_match_oracle(self):
        # target centers sit exactly on source pixel edges -> 4-way ties
        rng = np.random.default_rng(9)
        src = grid(w=5, h=5, ps=2.0, ox=0.0, oy=10.0)
        water = rng.random(src.shape) > 0.5
        m = WaterMask(src, water)
        target = GridGeometry(1.0, 9.0, 2.0, 4, 4, "local")
        out = resample_mask(m, target)
        ow, ov = oracles.nearest_resample(water, np.ones(src.shape, bool), src, target)
        npt.assert_array_equal(out.water, ow)
        npt.assert_array_equal(out.validity, ov)

    def test_target_outside_source_is_invalid(self):
        src = grid(w=5, h=5, ps=10.0)
        m = WaterMask(src, np.ones(src.shape, dtype=bool))
        target = GridGeometry(1000.0, 2000.0, 10.0, 5, 5, "local")
        out = resample_mask(m, target)
        assert not out.validity.any()
        assert not out.water.any()

    def test_crs_mismatch_rejected(self):
        src = grid()
        m = WaterMask(src, np.zeros(src.shape, dtype=bool))
        target = grid(crs="EPSG:32633")
        with pytest.raises(ValidationError, match="CRS"):
            resample_mask(m, target)

    def test_never_invents_values(self):
        # all-water source stays all-water wherever valid
        src = grid(w=4, h=4, ps=10.0)
        m = WaterMask(src, np.ones(src.shape, dtype=bool))
        target = GridGeometry(-5.0, 45.0, 7.0, 8, 8, "local")
        out = resample_mask(m, target)
        assert out.water[out.validity].all()


class TestResampleBand:
    def test_bilinear_midpoint(self):
        g = grid(w=2, h=1, ps=10.0)
        r = Raster(g, {"b": np.array([[0.0, 1.0]])})
        # target center halfway between the two source centers
        target = GridGeometry(5.0, 10.0, 10.0, 1, 1, "local")
        values, validity = resample_band(r, "b", target, "bilinear")
        assert validity[0, 0]
        npt.assert_allclose(values[0, 0], 0.5)

    def test_nearest_identity(self):
        rng = np.random.default_rng(1)
        g = grid(w=6, h=4, ps=2.0)
        plane = rng.normal(size=g.shape)
        r = Raster(g, {"b": plane})
        values, validity = resample_band(r, "b", g, "nearest")
        npt.assert_array_equal(values, plane)
        assert validity.all()

    def test_bilinear_identity(self):
        rng = np.random.default_rng(2)
        g = grid(w=6, h=4, ps=2.0)
        plane = rng.normal(size=g.shape)
        values, validity = resample_band(Raster(g, {"b": plane}), "b", g, "bilinear")
        npt.assert_allclose(values, plane)
        assert validity.all()

    def test_upsample_matches_formula_oracle(self):
        rng = np.random.default_rng(5)
        src = grid(w=8, h=8, ps=8.0)
        plane = rng.normal(size=src.shape)
        r = Raster(src, {"b": plane})
        target = GridGeometry(8.0, 56.0, 4.0, 12, 12, "local")
        values, validity = resample_band(r, "b", target, "bilinear")
        valid_all = np.ones(src.shape, dtype=bool)
        for tr in range(target.height_px):
            for tc in range(target.width_px):
                x, y = target.pixel_to_map(tr, tc)
                expected = oracles.bilinear_point(plane, valid_all, src, float(x), float(y))
                assert expected is not None
                assert validity[tr, tc]
                npt.assert_allclose(values[tr, tc], expected, rtol=1e-12)

    def test_invalid_neighbor_falls_back_to_nearest(self):
        g = grid(w=2, h=1, ps=10.0)
        validity = np.array([[True, False]])
        r = Raster(g, {"b": np.array([[3.0, 100.0]])}, validity)
        # midpoint between a valid and an invalid center
        target = GridGeometry(4.0, 10.0, 10.0, 1, 1, "local")
        values, out_valid = resample_band(r, "b", target, "bilinear")
        assert out_valid[0, 0]
        npt.assert_allclose(values[0, 0], 3.0)  # nearest valid pixel

    def test_unknown_method_rejected(self):
        g = grid(w=2, h=2, ps=1.0)
        r = Raster(g, {"b": np.zeros(g.shape)})
        with pytest.raises(ValidationError):
            resample_band(r, "b", g, "cubic")
