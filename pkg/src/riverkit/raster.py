"""Multiband rasters on square-pixel grids, normalization, and grid-to-grid resampling.

Grid convention: ``origin_x, origin_y`` is the map position of the top-left
corner of pixel (0, 0); x grows with columns and y shrinks with rows (north-up).
The center of pixel ``(row, col)`` sits at::

    x = origin_x + (col + 0.5) * pixel_size
    y = origin_y - (row + 0.5) * pixel_size

Rasters are treated as immutable after construction; every operation here
returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class GridGeometry:
    """Placement of a pixel grid in projected map coordinates (meters)."""

    origin_x: float
    origin_y: float
    pixel_size: float
    width_px: int
    height_px: int
    crs_id: str = "local"

    def __post_init__(self):
        if self.pixel_size <= 0:
            raise ValidationError(f"pixel_size must be > 0, got {self.pixel_size}")
        if self.width_px < 1 or self.height_px < 1:
            raise ValidationError(
                f"grid must be at least 1x1, got {self.width_px}x{self.height_px}"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height_px, self.width_px)

    def pixel_to_map(self, rows, cols):
        """Map coordinates of pixel centers. Accepts scalars or arrays."""
        x = self.origin_x + (np.asarray(cols, dtype=float) + 0.5) * self.pixel_size
        y = self.origin_y - (np.asarray(rows, dtype=float) + 0.5) * self.pixel_size
        return x, y

    def map_to_pixel(self, x, y):
        """Fractional (row, col); integer values land exactly on pixel centers."""
        col = (np.asarray(x, dtype=float) - self.origin_x) / self.pixel_size - 0.5
        row = (self.origin_y - np.asarray(y, dtype=float)) / self.pixel_size - 0.5
        return row, col

    def bounds(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax) of the grid extent."""
        return (
            self.origin_x,
            self.origin_y - self.height_px * self.pixel_size,
            self.origin_x + self.width_px * self.pixel_size,
            self.origin_y,
        )

    def contains(self, x, y):
        """True where (x, y) lies inside the closed grid extent."""
        xmin, ymin, xmax, ymax = self.bounds()
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return (x >= xmin) & (x <= xmax) & (y >= ymin) & (y <= ymax)

    def pixel_centers(self):
        """Meshgrid (x, y) arrays of all pixel centers, shape (height_px, width_px)."""
        cols, rows = np.meshgrid(np.arange(self.width_px), np.arange(self.height_px))
        return self.pixel_to_map(rows, cols)


def _check_plane(name: str, plane: np.ndarray, geometry: GridGeometry) -> None:
    if plane.shape != geometry.shape:
        raise ValidationError(
            f"{name} plane shape {plane.shape} does not match grid {geometry.shape}"
        )


@dataclass
class Raster:
    """Named 2-D bands sharing one grid, plus a per-pixel validity plane."""

    geometry: GridGeometry
    bands: dict[str, np.ndarray]
    validity: np.ndarray = None

    def __post_init__(self):
        if not self.bands:
            raise ValidationError("raster must have at least one band")
        for name, plane in self.bands.items():
            _check_plane(f"band '{name}'", plane, self.geometry)
        if self.validity is None:
            self.validity = np.ones(self.geometry.shape, dtype=bool)
        self.validity = np.asarray(self.validity, dtype=bool)
        _check_plane("validity", self.validity, self.geometry)

    @property
    def band_names(self) -> list[str]:
        return list(self.bands.keys())

    def band(self, name: str) -> np.ndarray:
        if name not in self.bands:
            raise ValidationError(
                f"no band named '{name}' (available: {', '.join(self.band_names)})"
            )
        return self.bands[name]


@dataclass
class WaterMask:
    """Binary water/non-water plane aligned to a grid. Water implies valid."""

    geometry: GridGeometry
    water: np.ndarray
    validity: np.ndarray = None

    def __post_init__(self):
        self.water = np.asarray(self.water, dtype=bool)
        _check_plane("water", self.water, self.geometry)
        if self.validity is None:
            self.validity = np.ones(self.geometry.shape, dtype=bool)
        self.validity = np.asarray(self.validity, dtype=bool)
        _check_plane("validity", self.validity, self.geometry)
        if np.any(self.water & ~self.validity):
            raise ValidationError("mask marks nodata pixels as water")


def minmax_normalize(r: Raster) -> Raster:
    """Rescale every band so its valid pixels span [0, 1].

    Invalid pixels are set to 0 and stay invalid. A band with a single
    distinct valid value maps to all-0 (keeps downstream indices finite).
    Raises if a band has no valid pixels.
    """
    valid = r.validity
    out = {}
    for name, plane in r.bands.items():
        vals = np.asarray(plane, dtype=float)
        if not np.any(valid):
            raise ValidationError(f"band '{name}' has no valid pixels to normalize")
        vmin = vals[valid].min()
        vmax = vals[valid].max()
        scaled = np.zeros_like(vals)
        if vmax > vmin:
            scaled[valid] = (vals[valid] - vmin) / (vmax - vmin)
        out[name] = scaled
    return Raster(r.geometry, out, valid.copy())


def _require_same_crs(src: GridGeometry, dst: GridGeometry) -> None:
    if src.crs_id != dst.crs_id:
        raise ValidationError(
            f"CRS mismatch: source '{src.crs_id}' vs target '{dst.crs_id}' "
            "(reprojection is out of scope; resample within one CRS)"
        )


def _nearest_indices(src: GridGeometry, target: GridGeometry):
    """Nearest source (row, col) for every target pixel center, plus inside-extent mask.

    Equidistant centers resolve to the smaller row, then smaller column.
    """
    tx, ty = target.pixel_centers()
    row_f, col_f = src.map_to_pixel(tx, ty)
    # ceil(f - 0.5) is the nearest integer with exact .5 ties going DOWN
    rows = np.ceil(row_f - 0.5).astype(np.int64)
    cols = np.ceil(col_f - 0.5).astype(np.int64)
    inside = src.contains(tx, ty)
    # points exactly on the extent boundary round to the edge pixel
    np.clip(rows, 0, src.height_px - 1, out=rows)
    np.clip(cols, 0, src.width_px - 1, out=cols)
    return rows, cols, inside


def resample_mask(m: WaterMask, target: GridGeometry) -> WaterMask:
    """Nearest-neighbor reassignment of a mask onto another grid in the same CRS.

    Each target pixel takes the source pixel whose center is nearest to its
    own center; target pixels whose center falls outside the source extent
    come back invalid.
    """
    _require_same_crs(m.geometry, target)
    rows, cols, inside = _nearest_indices(m.geometry, target)
    water = np.where(inside, m.water[rows, cols], False)
    validity = np.where(inside, m.validity[rows, cols], False)
    return WaterMask(target, water, validity)


def resample_class_plane(plane: np.ndarray, src: GridGeometry, target: GridGeometry):
    """Nearest-neighbor resampling for categorical planes (e.g. land-cover ids).

    Returns (values, validity); values outside the source extent are 0/invalid.
    """
    _require_same_crs(src, target)
    arr = np.asarray(plane)
    _check_plane("class", arr, src)
    rows, cols, inside = _nearest_indices(src, target)
    values = np.where(inside, arr[rows, cols], 0)
    return values, inside


def resample_band(
    r: Raster, band: str, target: GridGeometry, method: str = "bilinear"
):
    """Resample one band onto another grid in the same CRS.

    ``bilinear`` interpolates among the 4 surrounding source centers and
    falls back to the nearest pixel whenever any of those neighbors is
    invalid or off-grid. Returns (values, validity) on the target grid.
    """
    if method not in ("nearest", "bilinear"):
        raise ValidationError(f"unknown resampling method '{method}'")
    _require_same_crs(r.geometry, target)
    src = r.geometry
    plane = np.asarray(r.band(band), dtype=float)

    rows_n, cols_n, inside = _nearest_indices(src, target)
    nearest_vals = np.where(inside & r.validity[rows_n, cols_n], plane[rows_n, cols_n], 0.0)
    nearest_ok = inside & r.validity[rows_n, cols_n]
    if method == "nearest":
        return nearest_vals, nearest_ok

    tx, ty = target.pixel_centers()
    row_f, col_f = src.map_to_pixel(tx, ty)
    r0 = np.floor(row_f).astype(np.int64)
    c0 = np.floor(col_f).astype(np.int64)
    fy = row_f - r0
    fx = col_f - c0
    # a target center sitting exactly on a source center needs no second neighbor
    r1 = np.where(fy == 0, r0, r0 + 1)
    c1 = np.where(fx == 0, c0, c0 + 1)

    def ok(rr, cc):
        in_grid = (rr >= 0) & (rr < src.height_px) & (cc >= 0) & (cc < src.width_px)
        rr_c = np.clip(rr, 0, src.height_px - 1)
        cc_c = np.clip(cc, 0, src.width_px - 1)
        return in_grid & r.validity[rr_c, cc_c], rr_c, cc_c

    ok00, r0c, c0c = ok(r0, c0)
    ok01, _, c1c = ok(r0, c1)
    ok10, r1c, _ = ok(r1, c0)
    ok11, _, _ = ok(r1, c1)
    all_ok = ok00 & ok01 & ok10 & ok11

    v00 = plane[r0c, c0c]
    v01 = plane[r0c, c1c]
    v10 = plane[r1c, c0c]
    v11 = plane[r1c, c1c]
    top = v00 * (1 - fx) + v01 * fx
    bot = v10 * (1 - fx) + v11 * fx
    interp = top * (1 - fy) + bot * fy

    values = np.where(inside & all_ok, interp, nearest_vals)
    validity = inside & (all_ok | nearest_ok)
    values = np.where(validity, values, 0.0)
    return values, validity
