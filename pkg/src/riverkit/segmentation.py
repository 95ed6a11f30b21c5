"""Classical water segmentation and mask evaluation.

The detection chain is NDWI -> Otsu threshold -> binary mask. Evaluation
covers pixel-count confusion metrics, binary cross entropy on probability
maps, and attribution of false positives to land-cover classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .raster import GridGeometry, Raster, WaterMask

BCE_EPS = 1e-7

# ESA WorldCover class ids -> report rows. Ids outside this table (including
# the water class itself) are tallied under the invalid/no-data row.
WORLDCOVER_CLASSES = {
    10: "Tree Cover",
    20: "Shrubland",
    30: "Grassland",
    40: "Cropland",
    50: "Built-up",
    60: "Bare / sparse vegetation",
    70: "Snow and Ice",
    90: "Herbaceous Wetland",
    95: "Mangroves",
    100: "Moss and lichen",
}
INVALID_CLASS = "Invalid / no data"
ATTRIBUTION_ROWS = list(WORLDCOVER_CLASSES.values()) + [INVALID_CLASS]


@dataclass
class ScalarField:
    """A real-valued plane (e.g. a water index) on a grid with validity."""

    geometry: GridGeometry
    values: np.ndarray
    validity: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.validity = np.asarray(self.validity, dtype=bool)
        if self.values.shape != self.geometry.shape or self.validity.shape != self.geometry.shape:
            raise ValidationError("field planes must match the grid shape")


@dataclass
class SegMetrics:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float


@dataclass
class FpAttribution:
    """Share of false-positive pixels per land-cover class."""

    shares: dict[str, float]
    fp_total: int
    empty: bool


def _require_same_grid(a: GridGeometry, b: GridGeometry) -> None:
    if a != b:
        raise ValidationError(f"grid geometries differ: {a} vs {b}")


def ndwi(green: np.ndarray, nir: np.ndarray, validity: np.ndarray, geometry: GridGeometry) -> ScalarField:
    """(green - nir) / (green + nir) over valid pixels.

    Inputs must be non-negative (reflectance-like). Pixels where the two
    bands sum to zero carry no information and come back invalid with
    value 0.
    """
    green = np.asarray(green, dtype=float)
    nir = np.asarray(nir, dtype=float)
    validity = np.asarray(validity, dtype=bool)
    if green.shape != nir.shape or green.shape != geometry.shape:
        raise ValidationError("green/nir planes must share the grid shape")
    if np.any((green < 0) & validity) or np.any((nir < 0) & validity):
        raise ValidationError("NDWI expects non-negative reflectance values")
    total = green + nir
    ok = validity & (total > 0)
    values = np.zeros_like(green)
    values[ok] = (green[ok] - nir[ok]) / total[ok]
    return ScalarField(geometry, values, ok)


def ndwi_from_raster(r: Raster, green: str = "green", nir: str = "nir") -> ScalarField:
    return ndwi(r.band(green), r.band(nir), r.validity, r.geometry)


def otsu_threshold(f: ScalarField, nbins: int = 256) -> float:
    """Between-class-variance-maximizing threshold over the field's valid values.

    Bins are equal-width over [min, max] of the valid values. The returned
    threshold is the upper edge of the chosen split bin; a mask follows as
    ``value > t``. Ties go to the smallest threshold.
    """
    vals = f.values[f.validity]
    if vals.size == 0:
        raise ValidationError("otsu: field has no valid pixels")
    lo = float(vals.min())
    hi = float(vals.max())
    if lo == hi:
        raise ValidationError("otsu: all valid values are equal; no threshold exists")
    hist, edges = np.histogram(vals, bins=nbins, range=(lo, hi))
    p = hist.astype(float) / hist.sum()
    centers = (edges[:-1] + edges[1:]) / 2.0

    w0 = np.cumsum(p)[:-1]
    w1 = 1.0 - w0
    cum_mean = np.cumsum(p * centers)
    total_mean = cum_mean[-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        mu0 = cum_mean[:-1] / w0
        mu1 = (total_mean - cum_mean[:-1]) / w1
        between = w0 * w1 * (mu0 - mu1) ** 2
    between = np.where((w0 > 0) & (w1 > 0), between, -np.inf)
    split = int(np.argmax(between))  # first max == smallest threshold
    return float(edges[split + 1])


def threshold_mask(f: ScalarField, t: float) -> WaterMask:
    """Binary water mask: value strictly above the threshold, on valid pixels."""
    water = (f.values > t) & f.validity
    return WaterMask(f.geometry, water, f.validity.copy())


def seg_metrics(pred: WaterMask, gt: WaterMask) -> SegMetrics:
    """Confusion counts and precision/recall/F1 over jointly valid pixels.

    When neither mask contains water the scene is perfectly predicted and
    all three scores are 1; one-sided empty cases score 0 on the undefined
    ratio rather than raising.
    """
    _require_same_grid(pred.geometry, gt.geometry)
    joint = pred.validity & gt.validity
    p = pred.water & joint
    g = gt.water & joint
    tp = int(np.sum(p & g))
    fp = int(np.sum(p & ~g))
    fn = int(np.sum(~p & g & joint))
    tn = int(np.sum(~p & ~g & joint))

    if tp + fp == 0 and tp + fn == 0:
        precision = recall = f1 = 1.0
    else:
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = (
            2.0 * precision * recall / (precision + recall)
            if precision + recall > 0
            else 0.0
        )
    return SegMetrics(tp, fp, fn, tn, precision, recall, f1)


def bce_loss(prob, gt: WaterMask) -> float:
    """Mean binary cross entropy of a probability map against a mask.

    ``prob`` is a ScalarField or a bare plane in [0, 1] (bare planes are
    treated as valid everywhere). Predictions are clamped away from 0/1 so
    the loss stays finite.
    """
    if isinstance(prob, ScalarField):
        _require_same_grid(prob.geometry, gt.geometry)
        values = prob.values
        joint = prob.validity & gt.validity
    else:
        values = np.asarray(prob, dtype=float)
        if values.shape != gt.geometry.shape:
            raise ValidationError("probability plane must match the mask grid")
        joint = gt.validity
    if not np.any(joint):
        raise ValidationError("bce: no jointly valid pixels")
    vals = values[joint]
    if vals.min() < 0 or vals.max() > 1:
        raise ValidationError("bce: probabilities must lie in [0, 1]")
    y = gt.water[joint].astype(float)
    yhat = np.clip(vals, BCE_EPS, 1.0 - BCE_EPS)
    return float(np.mean(-(y * np.log(yhat) + (1.0 - y) * np.log(1.0 - yhat))))


def fp_attribution(pred: WaterMask, gt: WaterMask, lulc: np.ndarray) -> FpAttribution:
    """Histogram the land-cover classes under false-positive pixels.

    ``lulc`` is a class-id plane already resampled onto the prediction
    grid. Unknown ids count toward the invalid/no-data row. Shares sum to
    1 when any false positive exists; otherwise all shares are 0 and the
    result is flagged empty.
    """
    _require_same_grid(pred.geometry, gt.geometry)
    lulc = np.asarray(lulc)
    if lulc.shape != pred.geometry.shape:
        raise ValidationError("lulc plane must match the mask grid")
    joint = pred.validity & gt.validity
    fp_px = pred.water & ~gt.water & joint
    fp_total = int(np.sum(fp_px))
    shares = {row: 0.0 for row in ATTRIBUTION_ROWS}
    if fp_total == 0:
        return FpAttribution(shares, 0, True)
    ids, counts = np.unique(lulc[fp_px], return_counts=True)
    for class_id, count in zip(ids, counts):
        row = WORLDCOVER_CLASSES.get(int(class_id), INVALID_CLASS)
        shares[row] += count / fp_total
    return FpAttribution(shares, fp_total, False)
