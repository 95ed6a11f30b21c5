"""Per-node river width from a water mask, and width error statistics.

Width at a node is measured along the transect orthogonal to the local
centerline tangent: step along the line once per pixel-length, look up the
mask cell under each step, count the water hits, and multiply by the
resolution. With a correct mask this is exact when the banks align with
pixel edges and off by at most one pixel per bank otherwise -- up to
``2*delta`` when the line runs along a grid axis and ``2*sqrt(2)*delta``
when it cuts pixels diagonally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .centerline import Reach, Transect, make_transect, node_tangent, transect_pixels, transect_samples
from .errors import ValidationError
from .raster import WaterMask

DEFAULT_HALF_LENGTH = 500.0
DEFAULT_MAX_WIDTH = 500.0

WIDTH_MODES = ("pixel-count", "contiguous-run")


@dataclass
class WidthEstimate:
    node_id: str
    reach_id: str
    width_m: float
    water_px: int
    mode: str
    truncated_at_boundary: bool = False
    contains_nodata: bool = False
    no_water: bool = False

    def flag_names(self) -> list[str]:
        names = []
        if self.truncated_at_boundary:
            names.append("truncated_at_boundary")
        if self.contains_nodata:
            names.append("contains_nodata")
        if self.no_water:
            names.append("no_water")
        return names

    @property
    def flagged(self) -> bool:
        return self.truncated_at_boundary or self.contains_nodata


@dataclass
class WidthErrorStats:
    """Aggregate signed/absolute width errors over (predicted, truth) pairs."""

    n_nodes: int
    bias_m: float
    pct_bias: float
    mean_abs_m: float
    median_abs_m: float
    n_excluded_gt_over_max: int = 0
    n_zero_gt: int = 0


def _longest_run_near(water: np.ndarray, center_idx: int) -> int:
    """Length of the water run containing ``center_idx``, else the nearest run."""
    runs = []
    start = None
    for i, w in enumerate(water):
        if w and start is None:
            start = i
        elif not w and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(water) - 1))
    if not runs:
        return 0

    def distance(run):
        lo, hi = run
        if lo <= center_idx <= hi:
            return 0
        return min(abs(center_idx - lo), abs(center_idx - hi))

    best = min(runs, key=lambda run: (distance(run), run[0]))
    return best[1] - best[0] + 1


def node_width(mask: WaterMask, t: Transect, mode: str = "pixel-count") -> WidthEstimate:
    """Width of the water crossing at one transect.

    ``pixel-count`` counts every water hit along the line; ``contiguous-run``
    keeps only the run of consecutive water hits containing (or nearest to)
    the transect center, which keeps parallel channels crossed by the same
    line out of the measurement. Flags record grid truncation, nodata under
    the traversal, and dry transects.
    """
    if mode not in WIDTH_MODES:
        raise ValidationError(f"unknown width mode '{mode}'")
    g = mask.geometry
    rows, cols, in_bounds = transect_samples(t, g)
    water = np.zeros(rows.shape, dtype=bool)
    if np.any(in_bounds):
        r_in = rows[in_bounds]
        c_in = cols[in_bounds]
        water[in_bounds] = mask.water[r_in, c_in]

    if mode == "pixel-count":
        water_px = int(np.sum(water))
    else:
        water_px = _longest_run_near(water, len(water) // 2)

    truncated = False
    nodata = False
    for r, c, ok in transect_pixels(t, g):
        if not ok:
            truncated = True
        elif not mask.validity[r, c]:
            nodata = True

    width_m = water_px * g.pixel_size
    return WidthEstimate(
        node_id=t.node_id,
        reach_id="",
        width_m=width_m,
        water_px=water_px,
        mode=mode,
        truncated_at_boundary=truncated,
        contains_nodata=nodata,
        no_water=water_px == 0,
    )


def widths_for_scene(
    mask: WaterMask,
    reaches: list[Reach],
    half_length: float = DEFAULT_HALF_LENGTH,
    mode: str = "pixel-count",
) -> tuple[list[WidthEstimate], int]:
    """One width estimate per node whose transect touches the mask grid.

    Nodes whose transect misses the grid entirely, and nodes where no
    tangent exists (single-node reaches, coincident neighbors), are
    skipped; the second return value counts them. Results are ordered by
    (reach_id, node order).
    """
    estimates = []
    skipped = 0
    for reach in sorted(reaches, key=lambda r: r.reach_id):
        for idx, node in enumerate(reach.nodes):
            try:
                tangent = node_tangent(reach, idx)
            except ValidationError:
                skipped += 1
                continue
            transect = make_transect(node, tangent, half_length)
            _, _, in_bounds = transect_samples(transect, mask.geometry)
            if not np.any(in_bounds):
                skipped += 1
                continue
            est = node_width(mask, transect, mode=mode)
            est.reach_id = reach.reach_id
            estimates.append(est)
    return estimates, skipped


def width_error_stats(pairs, max_width: float = DEFAULT_MAX_WIDTH) -> WidthErrorStats:
    """Bias, % bias, and mean/median absolute error over (predicted, truth) pairs.

    Pairs whose truth exceeds ``max_width`` are dropped before any
    statistic. Pairs with non-positive truth stay in the signed/absolute
    errors but are left out of % bias (and counted separately).
    """
    pred = np.asarray([p for p, _ in pairs], dtype=float)
    truth = np.asarray([t for _, t in pairs], dtype=float)
    keep = truth <= max_width
    n_excluded = int(np.sum(~keep))
    pred = pred[keep]
    truth = truth[keep]
    if pred.size == 0:
        raise ValidationError(f"no pairs left after the {max_width} m truth cutoff")

    err = pred - truth
    positive = truth > 0
    n_zero_gt = int(np.sum(~positive))
    pct = float(np.mean(err[positive] / truth[positive])) if np.any(positive) else math.nan
    return WidthErrorStats(
        n_nodes=int(pred.size),
        bias_m=float(np.mean(err)),
        pct_bias=pct,
        mean_abs_m=float(np.mean(np.abs(err))),
        median_abs_m=float(np.median(np.abs(err))),
        n_excluded_gt_over_max=n_excluded,
        n_zero_gt=n_zero_gt,
    )


def pixel_error_bound(delta: float, alignment: str) -> float:
    """Worst-case width error from one misclassified pixel per bank.

    ``edge``: the line runs along a grid axis, each bank pixel spans one
    pixel of line -> 2*delta. ``diagonal``: the line cuts pixels corner to
    corner -> 2*sqrt(2)*delta.
    """
    if delta <= 0:
        raise ValidationError("delta must be > 0")
    if alignment == "edge":
        return 2.0 * delta
    if alignment == "diagonal":
        return 2.0 * math.sqrt(2.0) * delta
    raise ValidationError(f"unknown alignment '{alignment}' (use 'edge' or 'diagonal')")
