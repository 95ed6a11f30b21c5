"""Raster file I/O: GeoTIFF (via tifffile) and the npy-stack test format.

GeoTIFF support covers the tags this toolkit needs: ModelPixelScale +
ModelTiepoint (or an axis-aligned ModelTransformation), the GeoKey
directory for a CRS id, and GDAL's nodata tag. Striped and tiled layouts
both read through :mod:`tifffile`. Full CRS machinery is deliberately
absent; ``crs_id`` is an opaque string used only for same-CRS checks.

The npy-stack format is a directory holding one ``<band>.npy`` per band
and a ``geometry.json`` sidecar::

    {"origin_x": 0.0, "origin_y": 1500.0, "pixel_size": 3.0,
     "crs_id": "local", "band_names": ["green", "nir"], "nodata": null}
"""

from __future__ import annotations

import json
import os

import numpy as np
import tifffile

from .errors import ValidationError
from .raster import GridGeometry, Raster, WaterMask

_TAG_PIXEL_SCALE = 33550
_TAG_TIEPOINT = 33922
_TAG_TRANSFORM = 34264
_TAG_GEO_KEYS = 34735
_TAG_GEO_ASCII = 34737
_TAG_GDAL_NODATA = 42113

_KEY_GT_CITATION = 1026
_KEY_GEOGRAPHIC_CS = 2048
_KEY_PROJECTED_CS = 3072

MASK_NODATA = 255

SIDECAR_NAME = "geometry.json"


# ---------------------------------------------------------------------------
# GeoTIFF tag plumbing


def _geo_extratags(geometry: GridGeometry, nodata=None):
    ps = float(geometry.pixel_size)
    tags = [
        (_TAG_PIXEL_SCALE, 12, 3, (ps, ps, 0.0), False),
        (
            _TAG_TIEPOINT,
            12,
            6,
            (0.0, 0.0, 0.0, float(geometry.origin_x), float(geometry.origin_y), 0.0),
            False,
        ),
    ]
    keys = []
    crs = geometry.crs_id
    if crs.upper().startswith("EPSG:"):
        try:
            code = int(crs.split(":", 1)[1])
            keys.append((_KEY_PROJECTED_CS, 0, 1, code))
        except ValueError:
            pass
    citation = crs + "|"
    keys.append((_KEY_GT_CITATION, _TAG_GEO_ASCII, len(citation), 0))
    directory = [1, 1, 0, len(keys)]
    for k in sorted(keys):
        directory.extend(k)
    tags.append((_TAG_GEO_KEYS, 3, len(directory), tuple(directory), False))
    tags.append((_TAG_GEO_ASCII, 2, len(citation) + 1, citation, False))
    if nodata is not None:
        text = str(nodata)
        tags.append((_TAG_GDAL_NODATA, 2, len(text) + 1, text, False))
    return tags


def _tag_value(page, code):
    tag = page.tags.get(code)
    return None if tag is None else tag.value


def _parse_crs(page) -> str:
    directory = _tag_value(page, _TAG_GEO_KEYS)
    ascii_params = _tag_value(page, _TAG_GEO_ASCII) or ""
    if directory is None:
        return "unknown"
    directory = list(np.asarray(directory).ravel())
    n_keys = int(directory[3]) if len(directory) >= 4 else 0
    citation = None
    for i in range(n_keys):
        key_id, location, count, value = directory[4 + 4 * i : 8 + 4 * i]
        if key_id in (_KEY_PROJECTED_CS, _KEY_GEOGRAPHIC_CS) and location == 0:
            return f"EPSG:{int(value)}"
        if key_id == _KEY_GT_CITATION and location == _TAG_GEO_ASCII:
            citation = ascii_params[int(value) : int(value) + int(count)].rstrip("|")
    return citation if citation else "unknown"


def _parse_geometry(page, path: str) -> tuple[float, float, float]:
    """(origin_x, origin_y, pixel_size) from geo tags; rejects non-square pixels."""
    scale = _tag_value(page, _TAG_PIXEL_SCALE)
    tiepoint = _tag_value(page, _TAG_TIEPOINT)
    transform = _tag_value(page, _TAG_TRANSFORM)
    if scale is not None and tiepoint is not None:
        sx, sy = float(scale[0]), float(scale[1])
        i, j, _k, x, y, _z = (float(v) for v in tiepoint[:6])
        origin_x = x - i * sx
        origin_y = y + j * sy
    elif transform is not None:
        m = np.asarray(transform, dtype=float).reshape(4, 4)
        if m[0, 1] != 0 or m[1, 0] != 0:
            raise ValidationError(f"{path}: rotated geotransforms are not supported")
        sx, sy = m[0, 0], -m[1, 1]
        origin_x, origin_y = m[0, 3], m[1, 3]
    else:
        raise ValidationError(
            f"{path}: missing geometry (no ModelPixelScale/ModelTiepoint tags)"
        )
    if sx <= 0 or sy <= 0:
        raise ValidationError(f"{path}: pixel scale must be positive, got ({sx}, {sy})")
    if abs(sx - sy) > 1e-9 * max(sx, sy):
        raise ValidationError(
            f"{path}: non-square pixels ({sx} x {sy} m) are not supported"
        )
    return origin_x, origin_y, sx


def _parse_nodata(page):
    raw = _tag_value(page, _TAG_GDAL_NODATA)
    if raw is None:
        return None
    try:
        return float(str(raw).strip().strip("\x00"))
    except ValueError:
        return None


def read_geotiff(path: str, band_names=None) -> Raster:
    """Read a single- or multi-band GeoTIFF into a Raster.

    Bands are named ``band_1..band_n`` unless ``band_names`` is given.
    Validity is false where a pixel equals the file's nodata value (or is
    NaN) in any band.
    """
    try:
        with tifffile.TiffFile(path) as tif:
            series = tif.series[0]
            arr = series.asarray()
            axes = series.axes
            page = tif.pages[0]
            origin_x, origin_y, pixel_size = _parse_geometry(page, path)
            crs_id = _parse_crs(page)
            nodata = _parse_nodata(page)
    except (tifffile.TiffFileError, FileNotFoundError, OSError) as exc:
        raise ValidationError(f"unreadable GeoTIFF {path}: {exc}") from exc

    # canonicalize to (bands, H, W): move Y and X last, flatten the rest
    y_ax, x_ax = axes.find("Y"), axes.find("X")
    if y_ax < 0 or x_ax < 0:
        raise ValidationError(f"{path}: unsupported TIFF layout (axes={axes})")
    other = [i for i in range(arr.ndim) if i not in (y_ax, x_ax)]
    arr = np.transpose(arr, other + [y_ax, x_ax])
    arr = arr.reshape(-1, arr.shape[-2], arr.shape[-1])

    n_bands, height, width = arr.shape
    if band_names is None:
        band_names = [f"band_{i + 1}" for i in range(n_bands)]
    if len(band_names) != n_bands:
        raise ValidationError(
            f"{path}: {len(band_names)} band names given for {n_bands} bands"
        )
    geometry = GridGeometry(origin_x, origin_y, pixel_size, width, height, crs_id)

    planes = arr.astype(np.float64)
    validity = np.ones((height, width), dtype=bool)
    for plane in planes:
        validity &= np.isfinite(plane)
        if nodata is not None and np.isfinite(nodata):
            validity &= plane != nodata
    # zero-fill nodata so NaN never leaks into band math
    bands = {name: np.where(validity, plane, 0.0) for name, plane in zip(band_names, planes)}
    return Raster(geometry, bands, validity)


def _write_geotiff(path: str, data: np.ndarray, geometry: GridGeometry, nodata=None, tile=None):
    kwargs = {"photometric": "minisblack", "metadata": None}
    if tile is not None:
        kwargs["tile"] = tile
    tifffile.imwrite(path, data, extratags=_geo_extratags(geometry, nodata), **kwargs)


def write_mask_geotiff(mask: WaterMask, path: str) -> None:
    """Write a mask as single-band uint8 GeoTIFF: 0 land, 1 water, 255 nodata."""
    data = np.where(mask.water, 1, 0).astype(np.uint8)
    data[~mask.validity] = MASK_NODATA
    _write_geotiff(path, data, mask.geometry, nodata=MASK_NODATA)


def read_mask_geotiff(path: str) -> WaterMask:
    """Read a {0,1,nodata} uint8 mask GeoTIFF back into a WaterMask."""
    r = read_geotiff(path)
    if len(r.bands) != 1:
        raise ValidationError(f"{path}: mask GeoTIFF must be single-band")
    plane = next(iter(r.bands.values()))
    water = (plane == 1) & r.validity
    return WaterMask(r.geometry, water, r.validity)


def write_field_geotiff(values: np.ndarray, validity: np.ndarray, geometry: GridGeometry, path: str) -> None:
    """Write a scalar field as float32 GeoTIFF with NaN nodata."""
    data = np.asarray(values, dtype=np.float32).copy()
    data[~validity] = np.nan
    _write_geotiff(path, data, geometry, nodata="nan")


def write_raster_geotiff(r: Raster, path: str, dtype=np.float32, nodata=None, tile=None) -> None:
    """Write all bands of a raster to a multiband GeoTIFF (band-sequential pages)."""
    stack = np.stack([np.asarray(p) for p in r.bands.values()]).astype(dtype)
    if nodata is not None:
        stack[:, ~r.validity] = nodata
    _write_geotiff(path, stack, r.geometry, nodata=nodata, tile=tile)


# ---------------------------------------------------------------------------
# npy-stack format


def _read_sidecar(directory: str) -> dict:
    sidecar = os.path.join(directory, SIDECAR_NAME)
    if not os.path.isfile(sidecar):
        raise ValidationError(f"missing geometry sidecar {sidecar}")
    with open(sidecar) as fh:
        try:
            meta = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed sidecar {sidecar}: {exc}") from exc
    for key in ("origin_x", "origin_y", "pixel_size", "crs_id", "band_names"):
        if key not in meta:
            raise ValidationError(f"sidecar {sidecar} missing key '{key}'")
    return meta


def read_npy_stack(directory: str) -> Raster:
    """Read a npy-stack directory (one .npy per band + geometry.json)."""
    meta = _read_sidecar(directory)
    band_names = list(meta["band_names"])
    planes = {}
    shape = None
    for name in band_names:
        band_path = os.path.join(directory, f"{name}.npy")
        if not os.path.isfile(band_path):
            raise ValidationError(f"npy-stack {directory} missing band file {name}.npy")
        plane = np.load(band_path).astype(np.float64)
        if plane.ndim != 2:
            raise ValidationError(f"{band_path}: expected a 2-D array")
        if shape is None:
            shape = plane.shape
        elif plane.shape != shape:
            raise ValidationError(f"{band_path}: band shapes differ")
        planes[name] = plane
    geometry = GridGeometry(
        float(meta["origin_x"]),
        float(meta["origin_y"]),
        float(meta["pixel_size"]),
        shape[1],
        shape[0],
        str(meta["crs_id"]),
    )
    nodata = meta.get("nodata")
    validity = np.ones(shape, dtype=bool)
    for plane in planes.values():
        validity &= np.isfinite(plane)
        if nodata is not None:
            validity &= plane != float(nodata)
    planes = {name: np.where(validity, plane, 0.0) for name, plane in planes.items()}
    return Raster(geometry, planes, validity)


def write_npy_stack(r: Raster, directory: str, nodata=None) -> None:
    """Write a raster as a npy-stack directory; nodata pixels get the fill value."""
    os.makedirs(directory, exist_ok=True)
    meta = {
        "origin_x": r.geometry.origin_x,
        "origin_y": r.geometry.origin_y,
        "pixel_size": r.geometry.pixel_size,
        "crs_id": r.geometry.crs_id,
        "band_names": r.band_names,
        "nodata": nodata,
    }
    with open(os.path.join(directory, SIDECAR_NAME), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name, plane in r.bands.items():
        out = np.asarray(plane, dtype=np.float64).copy()
        if nodata is not None:
            out[~r.validity] = float(nodata)
        np.save(os.path.join(directory, f"{name}.npy"), out)


# ---------------------------------------------------------------------------
# format dispatch


def _looks_like_npy_stack(path: str) -> bool:
    return os.path.isdir(path)


def load_raster(path: str, format: str = None, band_names=None) -> Raster:
    """Load a raster from GeoTIFF or an npy-stack directory.

    ``format`` may be 'geotiff' or 'npy-stack'; by default it is inferred
    from the path (directories are npy-stacks).
    """
    if format is None:
        format = "npy-stack" if _looks_like_npy_stack(path) else "geotiff"
    if format == "npy-stack":
        if band_names is not None:
            raise ValidationError("npy-stack band names come from the sidecar")
        return read_npy_stack(path)
    if format == "geotiff":
        return read_geotiff(path, band_names=band_names)
    raise ValidationError(f"unknown raster format '{format}'")


def read_mask(path: str) -> WaterMask:
    """Load a water mask from a {0,1,nodata} GeoTIFF or a single-band npy-stack."""
    if _looks_like_npy_stack(path):
        r = read_npy_stack(path)
        if len(r.bands) != 1:
            raise ValidationError(f"{path}: mask npy-stack must be single-band")
        plane = next(iter(r.bands.values()))
        water = (plane == 1) & r.validity
        return WaterMask(r.geometry, water, r.validity)
    return read_mask_geotiff(path)
