"""Reach/node centerline geometry: tangents, orthogonal transects, grid traversal.

Nodes are ~200 m-spaced points along a river centerline; a transect is the
line through a node perpendicular to the locally estimated tangent. Two
traversals of a transect over a pixel grid are provided:

* :func:`transect_pixels` -- the supercover: every cell whose (closed)
  square the segment intersects, ordered along the segment. Used to detect
  nodata and grid truncation along the line.
* :func:`transect_samples` -- points stepped every ``pixel_size`` along the
  segment, mapped to their containing cells. Width counting walks the line
  this way: one sample per pixel-length of line, so the count times the
  resolution measures length along the line.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .raster import GridGeometry

_CORNER_TOL = 1e-9


@dataclass
class Node:
    node_id: str
    reach_id: str
    x: float
    y: float
    ref_widths: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"node {self.node_id}: non-finite position")


@dataclass
class Reach:
    reach_id: str
    nodes: list[Node]

    def __post_init__(self):
        if not self.nodes:
            raise ValidationError(f"reach {self.reach_id} has no nodes")


@dataclass
class Transect:
    """Line of length 2*half_length through ``center``, unit ``direction``."""

    node_id: str
    center: tuple[float, float]
    direction: tuple[float, float]
    half_length: float

    def __post_init__(self):
        norm = math.hypot(*self.direction)
        if abs(norm - 1.0) > 1e-9:
            raise ValidationError(f"transect {self.node_id}: direction is not unit length")
        if self.half_length <= 0:
            raise ValidationError(f"transect {self.node_id}: half_length must be > 0")

    def endpoints(self):
        cx, cy = self.center
        dx, dy = self.direction
        h = self.half_length
        return (cx - h * dx, cy - h * dy), (cx + h * dx, cy + h * dy)


def parse_centerlines(path: str) -> list[Reach]:
    """Read reaches from a GeoJSON FeatureCollection of node Points.

    Required properties per feature: node_id, reach_id, order. Reference
    widths come either from a ``ref_widths`` object or from numeric
    properties named ``<source>_width``.
    """
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid GeoJSON: {exc}") from exc
    if doc.get("type") != "FeatureCollection":
        raise ValidationError(f"{path}: expected a FeatureCollection")

    by_reach: dict[str, dict[int, Node]] = {}
    for feature in doc.get("features", []):
        geom = feature.get("geometry") or {}
        if geom.get("type") != "Point":
            continue
        props = feature.get("properties") or {}
        for key in ("node_id", "reach_id", "order"):
            if key not in props:
                raise ValidationError(f"{path}: node feature missing property '{key}'")
        node_id = str(props["node_id"])
        reach_id = str(props["reach_id"])
        order = int(props["order"])
        x, y = (float(v) for v in geom["coordinates"][:2])
        ref_widths = {}
        if isinstance(props.get("ref_widths"), dict):
            ref_widths.update({str(k): float(v) for k, v in props["ref_widths"].items()})
        for key, value in props.items():
            if key.endswith("_width") and isinstance(value, (int, float)):
                ref_widths[key[: -len("_width")]] = float(value)
        nodes = by_reach.setdefault(reach_id, {})
        if order in nodes:
            raise ValidationError(
                f"{path}: duplicate order {order} in reach {reach_id} (node {node_id})"
            )
        nodes[order] = Node(node_id, reach_id, x, y, ref_widths)

    reaches = []
    for reach_id in sorted(by_reach):
        nodes = [by_reach[reach_id][order] for order in sorted(by_reach[reach_id])]
        reaches.append(Reach(reach_id, nodes))
    return reaches


def node_tangent(reach: Reach, idx: int) -> np.ndarray:
    """Unit tangent at node ``idx``: central difference inside, one-sided at the ends."""
    nodes = reach.nodes
    if len(nodes) < 2:
        raise ValidationError(f"reach {reach.reach_id}: tangent needs at least 2 nodes")
    if idx < 0 or idx >= len(nodes):
        raise ValidationError(f"reach {reach.reach_id}: node index {idx} out of range")
    lo = nodes[max(idx - 1, 0)]
    hi = nodes[min(idx + 1, len(nodes) - 1)]
    dx = hi.x - lo.x
    dy = hi.y - lo.y
    norm = math.hypot(dx, dy)
    if norm == 0:
        raise ValidationError(
            f"reach {reach.reach_id}: coincident neighbors around node index {idx}"
        )
    return np.array([dx / norm, dy / norm])


def make_transect(node: Node, tangent, half_length: float) -> Transect:
    """Rotate the tangent +90 degrees and anchor the transect at the node."""
    tx, ty = float(tangent[0]), float(tangent[1])
    return Transect(node.node_id, (node.x, node.y), (-ty, tx), half_length)


# ---------------------------------------------------------------------------
# grid traversal


def _to_grid_units(t: Transect, g: GridGeometry):
    """Transect endpoints in corner-based pixel units (u right, v down)."""
    (x0, y0), (x1, y1) = t.endpoints()
    u0 = (x0 - g.origin_x) / g.pixel_size
    v0 = (g.origin_y - y0) / g.pixel_size
    u1 = (x1 - g.origin_x) / g.pixel_size
    v1 = (g.origin_y - y1) / g.pixel_size
    return (u0, v0), (u1, v1)


def _point_cells(u: float, v: float):
    """Cells whose closed square contains point (u, v): up to 4 at a corner."""
    on_u_edge = abs(u - round(u)) <= _CORNER_TOL
    on_v_edge = abs(v - round(v)) <= _CORNER_TOL
    cols = [round(u) - 1, round(u)] if on_u_edge else [math.floor(u)]
    rows = [round(v) - 1, round(v)] if on_v_edge else [math.floor(v)]
    return [(int(r), int(c)) for r in rows for c in cols]


def transect_pixels(t: Transect, g: GridGeometry) -> list[tuple[int, int, bool]]:
    """Supercover traversal of a transect over a grid.

    Returns every cell whose square the segment intersects, once each,
    ordered along the segment from the negative to the positive end;
    ``in_bounds`` is False for cells outside the grid. Cells the segment
    only touches at a corner or shared edge are included.
    """
    (u0, v0), (u1, v1) = _to_grid_units(t, g)
    du = u1 - u0
    dv = v1 - v0

    # parameters where the segment crosses integer grid lines
    ts = [0.0, 1.0]
    if du != 0:
        lo, hi = sorted((u0, u1))
        for k in range(math.ceil(lo), math.floor(hi) + 1):
            ts.append((k - u0) / du)
    if dv != 0:
        lo, hi = sorted((v0, v1))
        for k in range(math.ceil(lo), math.floor(hi) + 1):
            ts.append((k - v0) / dv)
    ts = sorted({min(max(tt, 0.0), 1.0) for tt in ts})

    first_t: dict[tuple[int, int], float] = {}

    def visit(cell, tt):
        if cell not in first_t or tt < first_t[cell]:
            first_t[cell] = tt

    # interval midpoints give the cell the open sub-segment lies in
    for ta, tb in zip(ts[:-1], ts[1:]):
        if tb <= ta:
            continue
        tm = (ta + tb) / 2.0
        um = u0 + tm * du
        vm = v0 + tm * dv
        cell = (math.floor(vm), math.floor(um))
        visit(cell, ta)
        # a segment running exactly along a grid line touches both sides
        if du == 0 and abs(u0 - round(u0)) <= _CORNER_TOL:
            visit((cell[0], int(round(u0)) - 1), ta)
        if dv == 0 and abs(v0 - round(v0)) <= _CORNER_TOL:
            visit((int(round(v0)) - 1, cell[1]), ta)

    # crossings through lattice corners (and endpoints on edges) touch extra cells
    for tt in ts:
        uu = u0 + tt * du
        vv = v0 + tt * dv
        on_u = abs(uu - round(uu)) <= _CORNER_TOL
        on_v = abs(vv - round(vv)) <= _CORNER_TOL
        if tt in (0.0, 1.0):
            if on_u or on_v:
                for cell in _point_cells(uu, vv):
                    visit(cell, tt)
        elif on_u and on_v:
            for cell in _point_cells(uu, vv):
                visit(cell, tt)

    ordered = sorted(first_t.items(), key=lambda item: (item[1], item[0]))
    return [
        (r, c, 0 <= r < g.height_px and 0 <= c < g.width_px)
        for (r, c), _ in ordered
    ]


def transect_samples(t: Transect, g: GridGeometry, step: float = None):
    """Cells under points stepped every ``step`` meters along the transect.

    The ladder is centered on the transect center (the node) so sample 0
    always sits on the centerline. Returns (rows, cols, in_bounds) arrays,
    one entry per sample, ordered along the segment. Default step is the
    grid's pixel size.
    """
    if step is None:
        step = g.pixel_size
    if step <= 0:
        raise ValidationError("sample step must be > 0")
    m = int(math.floor(t.half_length / step + 1e-12))
    offsets = np.arange(-m, m + 1, dtype=float) * step
    cx, cy = t.center
    dx, dy = t.direction
    xs = cx + offsets * dx
    ys = cy + offsets * dy
    cols = np.floor((xs - g.origin_x) / g.pixel_size).astype(np.int64)
    rows = np.floor((g.origin_y - ys) / g.pixel_size).astype(np.int64)
    in_bounds = (rows >= 0) & (rows < g.height_px) & (cols >= 0) & (cols < g.width_px)
    return rows, cols, in_bounds


def transect_geojson(transects: list[Transect]) -> dict:
    """Debug output: one LineString feature per transect."""
    features = []
    for t in transects:
        (x0, y0), (x1, y1) = t.endpoints()
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": [[x0, y0], [x1, y1]]},
                "properties": {"node_id": t.node_id, "half_length": t.half_length},
            }
        )
    return {"type": "FeatureCollection", "features": features}
